#include "o2o/agents/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace o2o::agents {

namespace {

using num::MlpCache;
using num::MlpParams;
using num::RealArray;

RealArray concat_state_action(const RealArray& states, const RealArray& actions) {
    const std::size_t b = states.rows();
    const std::size_t sd = states.cols();
    const std::size_t ad = actions.cols();
    RealArray out = RealArray::mat(b, sd + ad);
    for (std::size_t r = 0; r < b; ++r) {
        for (std::size_t j = 0; j < sd; ++j) out[r * (sd + ad) + j] = states[r * sd + j];
        for (std::size_t j = 0; j < ad; ++j) out[r * (sd + ad) + sd + j] = actions[r * ad + j];
    }
    return out;
}

RealArray action_slice(const RealArray& sa_grad, std::size_t state_dim, std::size_t action_dim) {
    const std::size_t b = sa_grad.rows();
    const std::size_t w = state_dim + action_dim;
    RealArray out = RealArray::mat(b, action_dim);
    for (std::size_t r = 0; r < b; ++r)
        for (std::size_t j = 0; j < action_dim; ++j) out[r * action_dim + j] = sa_grad[r * w + state_dim + j];
    return out;
}

}  // namespace

AgentKind parse_agent_kind(std::string_view name) {
    if (name == "td3") return AgentKind::TD3;
    if (name == "td3bc" || name == "td3-bc") return AgentKind::TD3BC;
    if (name == "td3c" || name == "td3-c") return AgentKind::TD3C;
    throw std::invalid_argument("unknown agent kind: " + std::string(name));
}

const char* agent_name(AgentKind k) {
    switch (k) {
        case AgentKind::TD3: return "td3";
        case AgentKind::TD3BC: return "td3bc";
        case AgentKind::TD3C: return "td3c";
    }
    throw std::invalid_argument("unknown AgentKind");
}

void AgentHyper::validate() const {
    if (!(discount > 0.0 && discount < 1.0)) throw std::invalid_argument("hyper: discount outside (0, 1)");
    if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("hyper: tau outside [0, 1]");
    if (policy_delay < 1) throw std::invalid_argument("hyper: policy_delay must be >= 1");
    if (exploration_noise < 0.0 || target_noise < 0.0 || target_noise_clip < 0.0)
        throw std::invalid_argument("hyper: noise parameters must be non-negative");
    if (batch_size == 0) throw std::invalid_argument("hyper: batch_size must be positive");
    if (actor_lr <= 0.0 || critic_lr <= 0.0) throw std::invalid_argument("hyper: learning rates must be positive");
    if (bc_alpha < 0.0) throw std::invalid_argument("hyper: bc_alpha must be >= 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("hyper: epsilon must be positive");
    if (dual_lr <= 0.0) throw std::invalid_argument("hyper: dual_lr must be positive");
    if (hidden_dim == 0) throw std::invalid_argument("hyper: hidden_dim must be positive");
}

ParamSet init_param_set(std::size_t state_dim, std::size_t action_dim, double action_bound,
                        const AgentHyper& hyper, num::Rng& rng) {
    hyper.validate();
    if (state_dim == 0 || action_dim == 0 || action_bound <= 0.0)
        throw std::invalid_argument("init_param_set: bad environment dimensions");
    ParamSet p;
    p.state_dim = state_dim;
    p.action_dim = action_dim;
    p.action_bound = action_bound;

    num::Rng actor_rng = rng.split("init.actor");
    num::Rng c1_rng = rng.split("init.critic1");
    num::Rng c2_rng = rng.split("init.critic2");
    p.actor = num::make_mlp(state_dim, hyper.hidden_dim, action_dim, true, actor_rng);
    p.critic1 = num::make_mlp(state_dim + action_dim, hyper.hidden_dim, 1, false, c1_rng);
    p.critic2 = num::make_mlp(state_dim + action_dim, hyper.hidden_dim, 1, false, c2_rng);
    p.actor_target = p.actor;
    p.critic1_target = p.critic1;
    p.critic2_target = p.critic2;
    p.actor_opt = num::make_adam(p.actor, hyper.actor_lr);
    p.critic1_opt = num::make_adam(p.critic1, hyper.critic_lr);
    p.critic2_opt = num::make_adam(p.critic2, hyper.critic_lr);
    return p;
}

void select_action(const ParamSet& params, const AgentHyper& hyper,
                   std::span<const double> state, ActionMode mode, num::Rng& rng,
                   std::span<double> out) {
    if (state.size() != params.state_dim) throw std::invalid_argument("select_action: state dim mismatch");
    RealArray s({params.state_dim}, std::vector<double>(state.begin(), state.end()));
    RealArray a = num::mlp_forward(params.actor, s);
    for (std::size_t i = 0; i < params.action_dim; ++i) {
        double v = params.action_bound * a[i];
        if (mode == ActionMode::Explore) v += hyper.exploration_noise * rng.normal();
        out[i] = std::clamp(v, -params.action_bound, params.action_bound);
    }
}

num::RealArray critic_target(const ParamSet& params, const AgentHyper& hyper,
                             const replay::Batch& batch, num::Rng& rng) {
    const std::size_t b = batch.states.rows();
    RealArray next_action = num::mlp_forward(params.actor_target, batch.next_states);
    for (std::size_t i = 0; i < next_action.size(); ++i) {
        const double noise = std::clamp(hyper.target_noise * rng.normal(),
                                        -hyper.target_noise_clip, hyper.target_noise_clip);
        next_action[i] = std::clamp(params.action_bound * next_action[i] + noise,
                                    -params.action_bound, params.action_bound);
    }
    RealArray sa = concat_state_action(batch.next_states, next_action);
    RealArray q1 = num::mlp_forward(params.critic1_target, sa);
    RealArray q2 = num::mlp_forward(params.critic2_target, sa);

    RealArray y = RealArray::vec(b);
    for (std::size_t i = 0; i < b; ++i) {
        const double q_min = std::min(q1[i], q2[i]);
        y[i] = batch.rewards[i] + hyper.discount * (1.0 - batch.terminals[i]) * q_min;
    }
    num::check_finite(y, "critic target");
    return y;
}

double critic_update(ParamSet& params, const AgentHyper& hyper, const replay::Batch& batch,
                     num::Rng& rng) {
    const std::size_t b = batch.states.rows();
    const RealArray y = critic_target(params, hyper, batch, rng);
    const RealArray sa = concat_state_action(batch.states, batch.actions);

    double total_loss = 0.0;
    MlpCache cache;
    for (auto [critic, opt] : {std::pair{&params.critic1, &params.critic1_opt},
                               std::pair{&params.critic2, &params.critic2_opt}}) {
        RealArray q = num::mlp_forward(*critic, sa, cache);
        RealArray cot = RealArray::mat(b, 1);
        double loss = 0.0;
        for (std::size_t i = 0; i < b; ++i) {
            const double r = q[i] - y[i];
            loss += r * r;
            cot[i] = 2.0 * r / static_cast<double>(b);
        }
        loss /= static_cast<double>(b);
        if (!std::isfinite(loss)) throw std::runtime_error("critic loss diverged");
        total_loss += loss;

        MlpParams grads = num::zeros_like(*critic);
        num::mlp_backward(*critic, cache, cot, grads, nullptr);
        num::adam_step(*opt, *critic, grads);
    }
    return total_loss;
}

void actor_update(AgentKind kind, ParamSet& params, const AgentHyper& hyper,
                  const replay::Batch& batch) {
    const std::size_t b = batch.states.rows();
    const std::size_t ad = params.action_dim;
    const double bound = params.action_bound;

    MlpCache actor_cache;
    RealArray pi_raw = num::mlp_forward(params.actor, batch.states, actor_cache);
    RealArray pi = pi_raw;
    for (double& v : pi.flat()) v *= bound;

    const RealArray sa = concat_state_action(batch.states, pi);
    MlpCache critic_cache;
    RealArray q = num::mlp_forward(params.critic1, sa, critic_cache);

    RealArray ones = RealArray::mat(b, 1);
    ones.fill(1.0);
    RealArray dq_dsa = num::mlp_input_gradient(params.critic1, critic_cache, ones);
    RealArray dq_da = action_slice(dq_dsa, params.state_dim, ad);
    if (hyper.action_grad_clip) num::clip_to_unit_norm_inplace(dq_da);

    // gradient ascent on the policy objective == Adam descent on its negation
    const double inv_b = 1.0 / static_cast<double>(b);
    RealArray cot = RealArray::mat(b, ad);

    switch (kind) {
        case AgentKind::TD3: {
            for (std::size_t i = 0; i < cot.size(); ++i) cot[i] = -bound * inv_b * dq_da[i];
            break;
        }
        case AgentKind::TD3BC: {
            // adaptive weight from the original TD3-BC: alpha / mean |Q|
            double mean_abs_q = 0.0;
            for (std::size_t i = 0; i < b; ++i) mean_abs_q += std::fabs(q[i]);
            mean_abs_q = std::max(mean_abs_q * inv_b, 1e-12);
            const double lambda = hyper.bc_alpha / mean_abs_q;
            // behavior-cloning penalty: mean over batch and action dims
            const double bc_scale = 2.0 * inv_b / static_cast<double>(ad);
            for (std::size_t i = 0; i < cot.size(); ++i)
                cot[i] = bound * (-lambda * inv_b * dq_da[i] + bc_scale * (pi[i] - batch.actions[i]));
            break;
        }
        case AgentKind::TD3C: {
            RealArray pi_target = num::mlp_forward(params.actor_target, batch.states);
            for (double& v : pi_target.flat()) v *= bound;
            double c_val = 0.0;
            for (std::size_t i = 0; i < pi.size(); ++i) {
                const double d = pi[i] - pi_target[i];
                c_val += d * d;
            }
            c_val *= inv_b;

            for (std::size_t i = 0; i < cot.size(); ++i) cot[i] = -bound * inv_b * dq_da[i];
            if (params.dual_lambda > 0.0) {
                const double pen = 2.0 * params.dual_lambda * inv_b * bound;
                for (std::size_t i = 0; i < cot.size(); ++i) cot[i] += pen * (pi[i] - pi_target[i]);
            }

            // clamped dual ascent on (c_val - epsilon)
            params.dual_lambda = std::max(0.0, params.dual_lambda + hyper.dual_lr * (c_val - hyper.epsilon));
            if (!(params.dual_lambda >= 0.0)) throw std::runtime_error("dual variable left [0, inf)");
            break;
        }
    }

    MlpParams grads = num::zeros_like(params.actor);
    num::mlp_backward(params.actor, actor_cache, cot, grads, nullptr);
    num::adam_step(params.actor_opt, params.actor, grads);

    num::polyak_update(params.actor_target, params.actor, hyper.tau);
    num::polyak_update(params.critic1_target, params.critic1, hyper.tau);
    num::polyak_update(params.critic2_target, params.critic2, hyper.tau);
}

double learner_step(AgentKind kind, ParamSet& params, const AgentHyper& hyper,
                    const replay::ReplayBuffer& buffer, num::Rng& rng) {
    params.learner_step += 1;
    replay::Batch batch;
    buffer.sample_into(batch, hyper.batch_size, rng);
    const double loss = critic_update(params, hyper, batch, rng);
    if (params.learner_step % hyper.policy_delay == 0) actor_update(kind, params, hyper, batch);
    return loss;
}

}  // namespace o2o::agents
