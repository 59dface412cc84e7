#include "o2o/datasets/generate.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace o2o::data {

namespace {

double quantize(double v) { return static_cast<double>(static_cast<float>(v)); }

Transition make_transition(const envs::EnvSpec& spec, const envs::EnvState& s,
                           std::span<const double> action, double reward,
                           const envs::EnvState& next) {
    Transition t;
    t.state.resize(spec.state_dim);
    t.next_state.resize(spec.state_dim);
    t.action.resize(spec.action_dim);
    for (std::size_t j = 0; j < spec.state_dim; ++j) {
        t.state[j] = quantize(s.obs[j]);
        t.next_state[j] = quantize(next.obs[j]);
    }
    for (std::size_t j = 0; j < spec.action_dim; ++j) t.action[j] = quantize(action[j]);
    t.reward = quantize(reward);
    t.terminal = next.failed;
    t.provenance = Provenance::Offline;
    return t;
}

struct EpisodeStats {
    std::vector<double> scores;

    void add_return(const envs::ScoreReference& ref, double ret) {
        scores.push_back(envs::normalized_score(ref, ret));
    }
    double mean() const {
        if (scores.empty()) return 0.0;
        double s = 0.0;
        for (double x : scores) s += x;
        return s / static_cast<double>(scores.size());
    }
    double stddev() const {
        if (scores.size() < 2) return 0.0;
        const double m = mean();
        double ss = 0.0;
        for (double x : scores) ss += (x - m) * (x - m);
        return std::sqrt(ss / static_cast<double>(scores.size() - 1));
    }
};

}  // namespace

OfflineDataset generate_medium(const envs::EnvSpec& spec, num::Rng& rng, std::size_t n_transitions) {
    if (n_transitions == 0) throw std::invalid_argument("generate_medium: need n >= 1");
    const envs::ScoreReference ref = envs::score_reference(spec.id);
    num::Rng env_rng = rng.split("medium.env");
    num::Rng policy_rng = rng.split("medium.policy");

    OfflineDataset ds;
    ds.env_id = envs::env_name(spec.id);
    ds.recipe = Recipe::Medium;
    ds.state_dim = static_cast<std::uint32_t>(spec.state_dim);
    ds.action_dim = static_cast<std::uint32_t>(spec.action_dim);
    ds.transitions.reserve(n_transitions);

    EpisodeStats stats;
    std::array<double, 2> action{};
    while (ds.transitions.size() < n_transitions) {
        envs::EnvState state = envs::reset(spec, env_rng);
        double ep_return = 0.0;
        while (!state.done) {
            envs::medium_action(spec, state, policy_rng, std::span<double>(action.data(), spec.action_dim));
            const envs::StepResult r =
                envs::step(spec, state, std::span<const double>(action.data(), spec.action_dim));
            ep_return += r.reward;
            if (ds.transitions.size() < n_transitions)
                ds.transitions.push_back(make_transition(spec, state, {action.data(), spec.action_dim},
                                                         r.reward, r.next));
            state = r.next;
        }
        stats.add_return(ref, ep_return);
    }
    ds.meta.behavior_score_mean = stats.mean();
    ds.meta.behavior_score_std = stats.stddev();
    return ds;
}

OfflineDataset generate_medium_replay(const envs::EnvSpec& spec, num::Rng& rng,
                                      std::size_t n_transitions, const MediumReplayOptions& options) {
    if (n_transitions == 0) throw std::invalid_argument("generate_medium_replay: need n >= 1");
    const envs::ScoreReference ref = envs::score_reference(spec.id);
    options.hyper.validate();

    num::Rng init_rng = rng.split("mr.init");
    num::Rng env_rng = rng.split("mr.env");
    num::Rng explore_rng = rng.split("mr.explore");
    num::Rng learner_rng = rng.split("mr.learner");
    num::Rng eval_rng = rng.split("mr.eval");

    agents::ParamSet params = agents::init_param_set(spec.state_dim, spec.action_dim,
                                                     spec.action_bound, options.hyper, init_rng);
    replay::ReplayBuffer buffer({.capacity = 1'000'000,
                                 .min_size = 1000,
                                 .regime = replay::Regime::OnlineOnly,
                                 .state_dim = spec.state_dim,
                                 .action_dim = spec.action_dim});

    auto evaluate = [&]() {
        double sum = 0.0;
        for (int e = 0; e < options.eval_episodes; ++e)
            sum += envs::episode_return(
                spec,
                [&](const envs::EnvState& s, std::span<double> a) {
                    agents::select_action(params, options.hyper, {s.obs.data(), spec.state_dim},
                                          agents::ActionMode::Evaluate, eval_rng, a);
                },
                eval_rng);
        return envs::normalized_score(ref, sum / options.eval_episodes);
    };

    std::vector<Transition> log;
    std::vector<std::size_t> episode_start{0};
    std::vector<double> episode_returns;

    envs::EnvState state = envs::reset(spec, env_rng);
    double ep_return = 0.0;
    std::array<double, 2> action{};
    const std::span<double> act(action.data(), spec.action_dim);

    double last_score = 0.0;
    bool reached_band = false;
    std::int64_t step_count = 0;
    while (step_count < options.max_steps) {
        ++step_count;
        // uniform actions until the learner gate opens, then noisy policy
        if (buffer.online_count() < buffer.config().min_size)
            envs::random_action(spec, explore_rng, act);
        else
            agents::select_action(params, options.hyper, {state.obs.data(), spec.state_dim},
                                  agents::ActionMode::Explore, explore_rng, act);
        const envs::StepResult r = envs::step(spec, state, act);
        Transition t = make_transition(spec, state, act, r.reward, r.next);
        buffer.push(t);
        log.push_back(std::move(t));
        ep_return += r.reward;
        if (r.next.done) {
            episode_returns.push_back(ep_return);
            episode_start.push_back(log.size());
            ep_return = 0.0;
            state = envs::reset(spec, env_rng);
        } else {
            state = r.next;
        }
        if (buffer.can_sample())
            agents::learner_step(agents::AgentKind::TD3, params, options.hyper, buffer, learner_rng);
        if (step_count % options.eval_every == 0) {
            last_score = evaluate();
            if (last_score >= options.band_threshold) {
                reached_band = true;
                break;
            }
        }
    }
    if (!reached_band)
        throw std::runtime_error(
            "generate_medium_replay: TD3 never reached the medium band (last score " +
            std::to_string(last_score) + " after " + std::to_string(step_count) + " steps)");

    // pad with the frozen early-stopped policy until n transitions exist
    while (log.size() < n_transitions) {
        agents::select_action(params, options.hyper, {state.obs.data(), spec.state_dim},
                              agents::ActionMode::Explore, explore_rng, act);
        const envs::StepResult r = envs::step(spec, state, act);
        log.push_back(make_transition(spec, state, act, r.reward, r.next));
        ep_return += r.reward;
        if (r.next.done) {
            episode_returns.push_back(ep_return);
            episode_start.push_back(log.size());
            ep_return = 0.0;
            state = envs::reset(spec, env_rng);
        } else {
            state = r.next;
        }
    }

    // keep the most recent n (replay semantics: oldest entries are evicted)
    const std::size_t start = log.size() > n_transitions ? log.size() - n_transitions : 0;

    OfflineDataset ds;
    ds.env_id = envs::env_name(spec.id);
    ds.recipe = Recipe::MediumReplay;
    ds.state_dim = static_cast<std::uint32_t>(spec.state_dim);
    ds.action_dim = static_cast<std::uint32_t>(spec.action_dim);
    ds.transitions.assign(log.begin() + static_cast<std::ptrdiff_t>(start), log.end());

    // behavior statistics over completed episodes overlapping the dump
    EpisodeStats stats;
    for (std::size_t e = 0; e < episode_returns.size(); ++e)
        if (episode_start[e + 1] > start) stats.add_return(ref, episode_returns[e]);
    ds.meta.behavior_score_mean = stats.mean();
    ds.meta.behavior_score_std = stats.stddev();
    return ds;
}

}  // namespace o2o::data
