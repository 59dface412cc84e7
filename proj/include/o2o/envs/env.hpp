#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>

#include "o2o/numerics/rng.hpp"

namespace o2o::envs {

enum class EnvId { PointMass2D, Pendulum1D };

EnvId parse_env_id(std::string_view name);  // throws std::invalid_argument
const char* env_name(EnvId id);

// Analytic toy environments. Dynamics are documented next to step() in
// env.cpp; all parameters live here so specs are self-describing.
struct EnvSpec {
    EnvId id;
    std::size_t state_dim;
    std::size_t action_dim;
    double action_bound;         // symmetric box
    std::size_t episode_length;
    double dt;

    // PointMass2D: double integrator toward a goal at the origin
    double init_box = 0.0;       // initial position uniform per coordinate

    // Pendulum1D (angle 0 = upright)
    double gravity = 0.0;
    double mass = 0.0;
    double length = 0.0;
    double speed_fail_limit = 0.0;  // |angular velocity| beyond this fails
    double speed_hard_clip = 0.0;

    // scripted medium policy: expert + N(0, medium_noise_std^2), clipped
    double medium_noise_std = 0.0;
};

EnvSpec make_spec(EnvId id);

struct EnvState {
    std::array<double, 4> obs{};  // first state_dim entries are meaningful
    std::size_t step_count = 0;
    bool done = false;    // episode over (failure set or time limit)
    bool failed = false;  // entered the documented failure set
};

EnvState reset(const EnvSpec& spec, num::Rng& rng);

struct StepResult {
    EnvState next;
    double reward;
};

// Deterministic transition. Actions outside the box are clipped; callers that
// need the executed action should clip with clip_action first.
StepResult step(const EnvSpec& spec, const EnvState& state, std::span<const double> action);

void clip_action(const EnvSpec& spec, std::span<double> action);

// Scripted reference policies.
void expert_action(const EnvSpec& spec, const EnvState& state, std::span<double> out);
void medium_action(const EnvSpec& spec, const EnvState& state, num::Rng& rng, std::span<double> out);
void random_action(const EnvSpec& spec, num::Rng& rng, std::span<double> out);

using Policy = std::function<void(const EnvState&, std::span<double>)>;

// Roll one episode from reset() until done; returns the summed reward.
double episode_return(const EnvSpec& spec, const Policy& policy, num::Rng& rng);

// Frozen per-environment return anchors for normalized scores, derived once
// by tools/calibrate and committed under data/.
struct ScoreReference {
    std::string env_id;
    double random_return;
    double expert_return;
};

ScoreReference score_reference(EnvId id);

// 100 * (return - random) / (expert - random); may leave [0, 100].
double normalized_score(const ScoreReference& ref, double episodic_return);

void save_score_reference(const ScoreReference& ref, const std::filesystem::path& path);
ScoreReference load_score_reference(const std::filesystem::path& path);

}  // namespace o2o::envs
