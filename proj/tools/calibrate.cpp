// Derives the frozen score anchors (data/*.json) and prints scripted-policy
// statistics used to pin environment constants. Not part of the main CLI.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "o2o/envs/env.hpp"

using namespace o2o;

namespace {

struct Stats {
    double mean = 0.0;
    double stddev = 0.0;
    double min = 0.0;
    double max = 0.0;
};

Stats stats_of(const std::vector<double>& xs) {
    Stats s{};
    if (xs.empty()) return s;
    double sum = 0.0;
    s.min = xs[0];
    s.max = xs[0];
    for (double x : xs) {
        sum += x;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
    }
    s.mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    int episodes = 10000;
    std::uint64_t seed = 20240001;
    std::string out_dir = "data";
    bool sweep = false;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--episodes" && i + 1 < argc) episodes = std::atoi(argv[++i]);
        else if (arg == "--seed" && i + 1 < argc) seed = std::strtoull(argv[++i], nullptr, 10);
        else if (arg == "--out" && i + 1 < argc) out_dir = argv[++i];
        else if (arg == "--sweep") sweep = true;
    }

    for (envs::EnvId id : {envs::EnvId::PointMass2D, envs::EnvId::Pendulum1D}) {
        const envs::EnvSpec spec = envs::make_spec(id);
        num::Rng master(seed);
        num::Rng rng_random = master.split(std::string(envs::env_name(id)) + ".random");
        num::Rng rng_expert = master.split(std::string(envs::env_name(id)) + ".expert");
        num::Rng rng_medium = master.split(std::string(envs::env_name(id)) + ".medium");

        std::vector<double> random_returns, expert_returns, medium_returns;
        int expert_failures = 0;
        for (int e = 0; e < episodes; ++e) {
            random_returns.push_back(envs::episode_return(
                spec,
                [&](const envs::EnvState&, std::span<double> a) {
                    envs::random_action(spec, rng_random, a);
                },
                rng_random));
            expert_returns.push_back(envs::episode_return(
                spec,
                [&](const envs::EnvState& s, std::span<double> a) {
                    envs::expert_action(spec, s, a);
                    if (s.failed) ++expert_failures;
                },
                rng_expert));
            medium_returns.push_back(envs::episode_return(
                spec,
                [&](const envs::EnvState& s, std::span<double> a) {
                    envs::medium_action(spec, s, rng_medium, a);
                },
                rng_medium));
        }

        const Stats r = stats_of(random_returns);
        const Stats x = stats_of(expert_returns);
        const Stats m = stats_of(medium_returns);
        envs::ScoreReference ref{envs::env_name(id), r.mean, x.mean};
        const double med_score = envs::normalized_score(ref, m.mean);

        std::printf("%s (%d episodes)\n", envs::env_name(id), episodes);
        std::printf("  random : mean %.4f  std %.2f  [%.1f, %.1f]\n", r.mean, r.stddev, r.min, r.max);
        std::printf("  expert : mean %.4f  std %.2f  [%.1f, %.1f]  failures %d\n", x.mean, x.stddev,
                    x.min, x.max, expert_failures);
        std::printf("  medium : mean %.4f  std %.2f  -> normalized %.2f\n", m.mean, m.stddev, med_score);

        const std::filesystem::path out =
            std::filesystem::path(out_dir) / (std::string(envs::env_name(id)) + "_scores.json");
        envs::save_score_reference(ref, out);
        std::printf("  wrote %s\n", out.string().c_str());

        if (sweep) {
            for (double sigma : {0.5, 0.8, 1.2, 1.8, 2.5, 3.5, 5.0, 7.0, 10.0}) {
                envs::EnvSpec noisy = spec;
                noisy.medium_noise_std = sigma;
                num::Rng rng_s = master.split("sweep." + std::to_string(sigma));
                std::vector<double> rets;
                for (int e = 0; e < episodes / 4; ++e)
                    rets.push_back(envs::episode_return(
                        noisy,
                        [&](const envs::EnvState& s, std::span<double> a) {
                            envs::medium_action(noisy, s, rng_s, a);
                        },
                        rng_s));
                const Stats ms = stats_of(rets);
                std::printf("  sweep sigma %.2f -> return %.2f  normalized %.2f\n", sigma, ms.mean,
                            envs::normalized_score(ref, ms.mean));
            }
        }
    }
    return 0;
}
