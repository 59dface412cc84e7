#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "o2o/datasets/transition.hpp"

namespace o2o::data {

enum class Recipe : std::uint8_t { Medium = 0, MediumReplay = 1 };

Recipe parse_recipe(std::string_view name);  // throws std::invalid_argument
const char* recipe_name(Recipe r);

struct DatasetMeta {
    std::uint64_t seed = 0;
    double behavior_score_mean = 0.0;
    double behavior_score_std = 0.0;
};

// Immutable offline transition collection. Values are quantized to f32 at
// generation time so the on-disk format round-trips exactly.
struct OfflineDataset {
    std::string env_id;
    Recipe recipe = Recipe::Medium;
    std::uint32_t state_dim = 0;
    std::uint32_t action_dim = 0;
    std::vector<Transition> transitions;
    DatasetMeta meta;

    std::size_t size() const { return transitions.size(); }

    bool operator==(const OfflineDataset&) const = default;
};

// Binary layout (little endian):
//   magic "O2OD", version u32, env-id length u32 + UTF-8 bytes, recipe u8,
//   state_dim u32, action_dim u32, count u64, seed u64;
//   then per record: state f32[state_dim], action f32[action_dim], reward f32,
//   next_state f32[state_dim], terminal u8.
// Behavior-score statistics travel in a JSON sidecar at <path>.json.
inline constexpr std::uint32_t kDatasetFormatVersion = 1;

void save(const OfflineDataset& ds, const std::filesystem::path& path);
OfflineDataset load(const std::filesystem::path& path);

}  // namespace o2o::data
