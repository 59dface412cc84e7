#include "o2o/envs/env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

namespace o2o::envs {

namespace {

constexpr double kPi = std::numbers::pi;

// PointMass2D scripted controller (PD, near-critically damped)
constexpr double kPmKp = 2.0;
constexpr double kPmKd = 2.8;

// Pendulum1D scripted controller
constexpr double kPdEnergyGain = 2.0;
constexpr double kPdEnergyTarget = 5.5;  // slightly above the upright energy of 5
constexpr double kPdCatchCos = 0.95;
constexpr double kPdCatchSpeed = 2.5;
constexpr double kPdKp = 12.0;
constexpr double kPdKd = 2.5;

// Entering the failure set costs a flat penalty so that failing early never
// scores better than surviving a full bad episode.
constexpr double kPdFailPenalty = -1000.0;

double wrap_angle(double theta) { return std::remainder(theta, 2.0 * kPi); }

double pendulum_energy(double cos_theta, double omega) {
    // rod pivoting at one end: I = m l^2 / 3, PE = m g (l/2) cos(theta)
    return omega * omega / 6.0 + 5.0 * cos_theta;
}

}  // namespace

EnvId parse_env_id(std::string_view name) {
    if (name == "pointmass2d") return EnvId::PointMass2D;
    if (name == "pendulum1d") return EnvId::Pendulum1D;
    throw std::invalid_argument("unknown environment id: " + std::string(name));
}

const char* env_name(EnvId id) {
    switch (id) {
        case EnvId::PointMass2D: return "pointmass2d";
        case EnvId::Pendulum1D: return "pendulum1d";
    }
    throw std::invalid_argument("unknown EnvId");
}

EnvSpec make_spec(EnvId id) {
    EnvSpec s{};
    s.id = id;
    s.episode_length = 200;
    s.dt = 0.05;
    switch (id) {
        case EnvId::PointMass2D:
            s.state_dim = 4;
            s.action_dim = 2;
            s.action_bound = 1.0;
            s.init_box = 1.5;
            s.medium_noise_std = 4.3;
            break;
        case EnvId::Pendulum1D:
            s.state_dim = 3;
            s.action_dim = 1;
            s.action_bound = 2.0;
            s.gravity = 10.0;
            s.mass = 1.0;
            s.length = 1.0;
            s.speed_fail_limit = 8.5;
            s.speed_hard_clip = 10.0;
            s.medium_noise_std = 2.3;
            break;
    }
    return s;
}

EnvState reset(const EnvSpec& spec, num::Rng& rng) {
    EnvState st{};
    switch (spec.id) {
        case EnvId::PointMass2D:
            st.obs[0] = rng.uniform(-spec.init_box, spec.init_box);
            st.obs[1] = rng.uniform(-spec.init_box, spec.init_box);
            st.obs[2] = 0.0;
            st.obs[3] = 0.0;
            break;
        case EnvId::Pendulum1D: {
            const double theta = rng.uniform(-kPi, kPi);
            st.obs[0] = std::cos(theta);
            st.obs[1] = std::sin(theta);
            st.obs[2] = rng.uniform(-1.0, 1.0);
            break;
        }
    }
    return st;
}

void clip_action(const EnvSpec& spec, std::span<double> action) {
    for (std::size_t i = 0; i < spec.action_dim; ++i)
        action[i] = std::clamp(action[i], -spec.action_bound, spec.action_bound);
}

StepResult step(const EnvSpec& spec, const EnvState& state, std::span<const double> action) {
    if (state.done) throw std::invalid_argument("step: episode already over");
    for (std::size_t i = 0; i < spec.action_dim; ++i)
        if (!std::isfinite(action[i])) throw std::runtime_error("step: non-finite action");

    StepResult result{};
    EnvState& next = result.next;
    next.step_count = state.step_count + 1;

    switch (spec.id) {
        case EnvId::PointMass2D: {
            // semi-implicit Euler double integrator:
            //   v' = v + a dt,  p' = p + v' dt,  reward = -|p' - goal|, goal = 0
            const double ax = std::clamp(action[0], -spec.action_bound, spec.action_bound);
            const double ay = std::clamp(action[1], -spec.action_bound, spec.action_bound);
            const double vx = state.obs[2] + ax * spec.dt;
            const double vy = state.obs[3] + ay * spec.dt;
            const double px = state.obs[0] + vx * spec.dt;
            const double py = state.obs[1] + vy * spec.dt;
            next.obs = {px, py, vx, vy};
            result.reward = -std::sqrt(px * px + py * py);
            break;
        }
        case EnvId::Pendulum1D: {
            // rod pendulum, angle 0 = upright:
            //   theta'' = (3g / 2l) sin(theta) + (3 / m l^2) u
            // cost on the pre-step state (gym convention):
            //   -(wrap(theta)^2 + 0.1 omega^2 + 0.001 u^2)
            // |omega| beyond speed_fail_limit enters the failure set.
            const double u = std::clamp(action[0], -spec.action_bound, spec.action_bound);
            const double theta = std::atan2(state.obs[1], state.obs[0]);
            const double omega = state.obs[2];
            const double a = wrap_angle(theta);
            result.reward = -(a * a + 0.1 * omega * omega + 0.001 * u * u);

            const double ml2 = spec.mass * spec.length * spec.length;
            const double accel =
                1.5 * spec.gravity / spec.length * std::sin(theta) + 3.0 / ml2 * u;
            double omega_next = omega + accel * spec.dt;
            const double theta_next = theta + omega_next * spec.dt;
            if (std::fabs(omega_next) > spec.speed_fail_limit) {
                next.failed = true;
                result.reward += kPdFailPenalty;
            }
            omega_next = std::clamp(omega_next, -spec.speed_hard_clip, spec.speed_hard_clip);
            next.obs = {std::cos(theta_next), std::sin(theta_next), omega_next, 0.0};
            break;
        }
    }

    if (next.failed || next.step_count >= spec.episode_length) next.done = true;
    return result;
}

void expert_action(const EnvSpec& spec, const EnvState& state, std::span<double> out) {
    switch (spec.id) {
        case EnvId::PointMass2D:
            out[0] = -kPmKp * state.obs[0] - kPmKd * state.obs[2];
            out[1] = -kPmKp * state.obs[1] - kPmKd * state.obs[3];
            break;
        case EnvId::Pendulum1D: {
            const double cos_t = state.obs[0];
            const double sin_t = state.obs[1];
            const double omega = state.obs[2];
            const double theta = std::atan2(sin_t, cos_t);
            if (cos_t > kPdCatchCos && std::fabs(omega) < kPdCatchSpeed) {
                out[0] = -kPdKp * wrap_angle(theta) - kPdKd * omega;
            } else {
                // pump energy toward the upright level
                const double gap = kPdEnergyTarget - pendulum_energy(cos_t, omega);
                double direction = omega;
                if (std::fabs(direction) < 1e-3) direction = 1.0;  // kick off dead rest
                out[0] = kPdEnergyGain * gap * (direction > 0.0 ? 1.0 : -1.0);
            }
            break;
        }
    }
    clip_action(spec, out);
}

void medium_action(const EnvSpec& spec, const EnvState& state, num::Rng& rng,
                   std::span<double> out) {
    expert_action(spec, state, out);
    for (std::size_t i = 0; i < spec.action_dim; ++i) out[i] += spec.medium_noise_std * rng.normal();
    clip_action(spec, out);
}

void random_action(const EnvSpec& spec, num::Rng& rng, std::span<double> out) {
    for (std::size_t i = 0; i < spec.action_dim; ++i)
        out[i] = rng.uniform(-spec.action_bound, spec.action_bound);
}

double episode_return(const EnvSpec& spec, const Policy& policy, num::Rng& rng) {
    EnvState state = reset(spec, rng);
    std::array<double, 2> action{};
    double total = 0.0;
    while (!state.done) {
        policy(state, std::span<double>(action.data(), spec.action_dim));
        clip_action(spec, std::span<double>(action.data(), spec.action_dim));
        StepResult r = step(spec, state, std::span<const double>(action.data(), spec.action_dim));
        total += r.reward;
        state = r.next;
    }
    return total;
}

ScoreReference score_reference(EnvId id) {
    // Derived by tools/calibrate (10,000-episode Monte Carlo, seed 20240001)
    // and frozen; data/*.json mirrors these values.
    switch (id) {
        case EnvId::PointMass2D: return {"pointmass2d", -316.9521, -43.4800};
        case EnvId::Pendulum1D: return {"pendulum1d", -1163.3173, -266.0447};
    }
    throw std::invalid_argument("unknown EnvId");
}

double normalized_score(const ScoreReference& ref, double episodic_return) {
    if (ref.expert_return == ref.random_return)
        throw std::invalid_argument("normalized_score: expert and random returns coincide");
    return 100.0 * (episodic_return - ref.random_return) / (ref.expert_return - ref.random_return);
}

void save_score_reference(const ScoreReference& ref, const std::filesystem::path& path) {
    nlohmann::json doc{{"env_id", ref.env_id},
                       {"random_return", ref.random_return},
                       {"expert_return", ref.expert_return}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path.string());
    out << doc.dump(2) << '\n';
}

ScoreReference load_score_reference(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    nlohmann::json doc = nlohmann::json::parse(in);
    ScoreReference ref;
    ref.env_id = doc.at("env_id").get<std::string>();
    ref.random_return = doc.at("random_return").get<double>();
    ref.expert_return = doc.at("expert_return").get<double>();
    if (!(ref.expert_return > ref.random_return))
        throw std::runtime_error("score reference invariant violated: expert <= random");
    return ref;
}

}  // namespace o2o::envs
