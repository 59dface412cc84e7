#include "o2o/datasets/dataset.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "dataset format is little endian; big-endian hosts need byte swaps");

namespace o2o::data {

namespace {

constexpr char kMagic[4] = {'O', '2', 'O', 'D'};

template <typename T>
void write_pod(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("dataset file truncated");
    return v;
}

void write_f32_vec(std::ostream& out, const std::vector<double>& v) {
    for (double x : v) write_pod(out, static_cast<float>(x));
}

void read_f32_vec(std::istream& in, std::vector<double>& v, std::size_t n) {
    v.resize(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(read_pod<float>(in));
}

}  // namespace

Recipe parse_recipe(std::string_view name) {
    if (name == "medium") return Recipe::Medium;
    if (name == "medium_replay" || name == "medium-replay") return Recipe::MediumReplay;
    throw std::invalid_argument("unknown dataset recipe: " + std::string(name));
}

const char* recipe_name(Recipe r) {
    switch (r) {
        case Recipe::Medium: return "medium";
        case Recipe::MediumReplay: return "medium_replay";
    }
    throw std::invalid_argument("unknown Recipe");
}

void save(const OfflineDataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for write: " + path.string());

    out.write(kMagic, 4);
    write_pod<std::uint32_t>(out, kDatasetFormatVersion);
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ds.env_id.size()));
    out.write(ds.env_id.data(), static_cast<std::streamsize>(ds.env_id.size()));
    write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(ds.recipe));
    write_pod<std::uint32_t>(out, ds.state_dim);
    write_pod<std::uint32_t>(out, ds.action_dim);
    write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(ds.transitions.size()));
    write_pod<std::uint64_t>(out, ds.meta.seed);

    for (const Transition& t : ds.transitions) {
        write_f32_vec(out, t.state);
        write_f32_vec(out, t.action);
        write_pod<float>(out, static_cast<float>(t.reward));
        write_f32_vec(out, t.next_state);
        write_pod<std::uint8_t>(out, t.terminal ? 1 : 0);
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
    out.close();

    nlohmann::json sidecar{{"env_id", ds.env_id},
                           {"recipe", recipe_name(ds.recipe)},
                           {"seed", ds.meta.seed},
                           {"count", ds.transitions.size()},
                           {"state_dim", ds.state_dim},
                           {"action_dim", ds.action_dim},
                           {"behavior_score_mean", ds.meta.behavior_score_mean},
                           {"behavior_score_std", ds.meta.behavior_score_std},
                           {"format_version", kDatasetFormatVersion}};
    std::ofstream side(path.string() + ".json");
    if (!side) throw std::runtime_error("cannot open for write: " + path.string() + ".json");
    side << sidecar.dump(2) << '\n';
}

OfflineDataset load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());

    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("bad dataset magic in " + path.string());
    const auto version = read_pod<std::uint32_t>(in);
    if (version != kDatasetFormatVersion)
        throw std::runtime_error("unsupported dataset version " + std::to_string(version));

    OfflineDataset ds;
    const auto id_len = read_pod<std::uint32_t>(in);
    ds.env_id.resize(id_len);
    in.read(ds.env_id.data(), id_len);
    if (!in) throw std::runtime_error("dataset file truncated");
    const auto recipe = read_pod<std::uint8_t>(in);
    if (recipe > 1) throw std::runtime_error("bad recipe byte");
    ds.recipe = static_cast<Recipe>(recipe);
    ds.state_dim = read_pod<std::uint32_t>(in);
    ds.action_dim = read_pod<std::uint32_t>(in);
    if (ds.state_dim == 0 || ds.state_dim > 64 || ds.action_dim == 0 || ds.action_dim > 64)
        throw std::runtime_error("implausible dataset dimensions");
    const auto count = read_pod<std::uint64_t>(in);
    ds.meta.seed = read_pod<std::uint64_t>(in);

    ds.transitions.resize(count);
    for (Transition& t : ds.transitions) {
        read_f32_vec(in, t.state, ds.state_dim);
        read_f32_vec(in, t.action, ds.action_dim);
        t.reward = static_cast<double>(read_pod<float>(in));
        read_f32_vec(in, t.next_state, ds.state_dim);
        t.terminal = read_pod<std::uint8_t>(in) != 0;
        t.provenance = Provenance::Offline;
    }
    char extra;
    if (in.read(&extra, 1)) throw std::runtime_error("trailing bytes after dataset records");

    const std::filesystem::path side = path.string() + ".json";
    if (std::filesystem::exists(side)) {
        std::ifstream sin(side);
        nlohmann::json doc = nlohmann::json::parse(sin);
        ds.meta.behavior_score_mean = doc.value("behavior_score_mean", 0.0);
        ds.meta.behavior_score_std = doc.value("behavior_score_std", 0.0);
    }
    return ds;
}

}  // namespace o2o::data
