#pragma once

#include <cstdint>

#include "o2o/agents/agent.hpp"
#include "o2o/datasets/dataset.hpp"
#include "o2o/envs/env.hpp"
#include "o2o/numerics/rng.hpp"

namespace o2o::data {

// Rollouts of the scripted medium policy totalling n transitions (the last
// episode is truncated as needed). Behavior statistics are normalized scores
// over every rolled episode.
OfflineDataset generate_medium(const envs::EnvSpec& spec, num::Rng& rng, std::size_t n_transitions);

struct MediumReplayOptions {
    double band_threshold = 45.0;      // stop at the first evaluation >= this
    std::int64_t eval_every = 1000;    // environment steps between evaluations
    int eval_episodes = 10;
    std::int64_t max_steps = 200000;   // training budget before giving up
    agents::AgentHyper hyper{};        // TD3 defaults
};

// Runs TD3 online from scratch until evaluation first reaches the medium
// band, then dumps its replay buffer: truncated to the most recent n when the
// run collected more, padded by rolling the frozen early-stopped policy when
// it collected less. Throws with diagnostics if the band is never reached.
OfflineDataset generate_medium_replay(const envs::EnvSpec& spec, num::Rng& rng,
                                      std::size_t n_transitions,
                                      const MediumReplayOptions& options = {});

}  // namespace o2o::data
