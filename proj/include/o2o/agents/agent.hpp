#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "o2o/numerics/mlp.hpp"
#include "o2o/numerics/optim.hpp"
#include "o2o/numerics/rng.hpp"
#include "o2o/replay/buffer.hpp"

namespace o2o::agents {

enum class AgentKind { TD3, TD3BC, TD3C };

AgentKind parse_agent_kind(std::string_view name);  // throws std::invalid_argument
const char* agent_name(AgentKind k);

struct AgentHyper {
    double discount = 0.99;
    double tau = 5e-3;
    int policy_delay = 2;
    double exploration_noise = 0.1;
    double target_noise = 0.2;
    double target_noise_clip = 0.5;
    std::size_t batch_size = 256;
    double actor_lr = 3e-4;
    double critic_lr = 3e-4;
    double bc_alpha = 2.5;        // TD3-BC
    double epsilon = 1e-5;        // TD3-C constraint level
    double dual_lr = 1e-2;        // TD3-C dual step size
    bool action_grad_clip = true;
    bool reset_dual_on_finetune = false;
    std::size_t hidden_dim = 256;

    void validate() const;  // throws std::invalid_argument
};

// Everything one agent learns: actor, twin critics, their target copies,
// optimizer moments, the TD3-C dual variable, and the learner step counter.
struct ParamSet {
    num::MlpParams actor, critic1, critic2;
    num::MlpParams actor_target, critic1_target, critic2_target;
    num::AdamState actor_opt, critic1_opt, critic2_opt;
    double dual_lambda = 0.0;
    std::int64_t learner_step = 0;

    std::size_t state_dim = 0;
    std::size_t action_dim = 0;
    double action_bound = 1.0;
};

ParamSet init_param_set(std::size_t state_dim, std::size_t action_dim, double action_bound,
                        const AgentHyper& hyper, num::Rng& rng);

enum class ActionMode { Explore, Evaluate };

// Evaluate: pi(s). Explore: pi(s) + N(0, exploration_noise^2), clipped to the
// action box either way.
void select_action(const ParamSet& params, const AgentHyper& hyper,
                   std::span<const double> state, ActionMode mode, num::Rng& rng,
                   std::span<double> out);

// y = r + discount * (1 - terminal) * min(Q1', Q2')(s', a') with smoothed
// target action a' = clip(pi'(s') + clip(noise, +-target_noise_clip), bounds).
// The smoothing noise is shared between the twin critics.
num::RealArray critic_target(const ParamSet& params, const AgentHyper& hyper,
                             const replay::Batch& batch, num::Rng& rng);

// One Adam step on each critic's mean squared error against the shared
// target. Returns the summed pre-update loss.
double critic_update(ParamSet& params, const AgentHyper& hyper, const replay::Batch& batch,
                     num::Rng& rng);

// Delayed policy update for the given flavor, then a Polyak update of all
// three targets.
void actor_update(AgentKind kind, ParamSet& params, const AgentHyper& hyper,
                  const replay::Batch& batch);

// Sample one batch, always update the critics, update the actor every
// policy_delay-th step. Returns the critic loss.
double learner_step(AgentKind kind, ParamSet& params, const AgentHyper& hyper,
                    const replay::ReplayBuffer& buffer, num::Rng& rng);

}  // namespace o2o::agents
