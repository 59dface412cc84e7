#pragma once

#include <cstdint>

#include "o2o/numerics/array.hpp"
#include "o2o/numerics/mlp.hpp"

namespace o2o::num {

struct AdamHyper {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Moments mirror the parameter shapes; step counts completed updates.
struct AdamState {
    AdamHyper hyper;
    std::int64_t step = 0;
    MlpParams m;
    MlpParams v;
};

AdamState make_adam(const MlpParams& params, double lr);

// Standard bias-corrected Adam on a single array.
void adam_update_array(RealArray& param, const RealArray& grad, RealArray& m, RealArray& v,
                       std::int64_t step, const AdamHyper& hyper);

// One Adam step over every parameter array. Throws on non-finite gradients.
void adam_step(AdamState& state, MlpParams& params, const MlpParams& grads);

// target = (1 - tau) * target + tau * online, elementwise. tau in [0, 1].
void polyak_update(RealArray& target, const RealArray& online, double tau);
void polyak_update(MlpParams& target, const MlpParams& online, double tau);

}  // namespace o2o::num
