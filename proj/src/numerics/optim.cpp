#include "o2o/numerics/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace o2o::num {

AdamState make_adam(const MlpParams& params, double lr) {
    AdamState st;
    st.hyper.lr = lr;
    st.m = zeros_like(params);
    st.v = zeros_like(params);
    return st;
}

void adam_update_array(RealArray& param, const RealArray& grad, RealArray& m, RealArray& v,
                       std::int64_t step, const AdamHyper& hyper) {
    if (!param.same_shape(grad) || !param.same_shape(m) || !param.same_shape(v))
        throw std::invalid_argument("adam_update_array: shape mismatch");
    check_finite(grad, "adam gradient");
    const double b1 = hyper.beta1;
    const double b2 = hyper.beta2;
    const double bias1 = 1.0 - std::pow(b1, static_cast<double>(step));
    const double bias2 = 1.0 - std::pow(b2, static_cast<double>(step));
    const std::size_t n = param.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double g = grad[i];
        m[i] = b1 * m[i] + (1.0 - b1) * g;
        v[i] = b2 * v[i] + (1.0 - b2) * g * g;
        const double m_hat = m[i] / bias1;
        const double v_hat = v[i] / bias2;
        param[i] -= hyper.lr * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
    }
}

void adam_step(AdamState& state, MlpParams& params, const MlpParams& grads) {
    state.step += 1;
    auto ps = params.arrays();
    auto gs = grads.arrays();
    auto ms = state.m.arrays();
    auto vs = state.v.arrays();
    for (std::size_t i = 0; i < ps.size(); ++i)
        adam_update_array(*ps[i], *gs[i], *ms[i], *vs[i], state.step, state.hyper);
    for (const RealArray* a : params.arrays()) check_finite(*a, "adam-updated parameters");
}

void polyak_update(RealArray& target, const RealArray& online, double tau) {
    if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("polyak_update: tau outside [0, 1]");
    if (!target.same_shape(online)) throw std::invalid_argument("polyak_update: shape mismatch");
    const std::size_t n = target.size();
    for (std::size_t i = 0; i < n; ++i) target[i] = (1.0 - tau) * target[i] + tau * online[i];
}

void polyak_update(MlpParams& target, const MlpParams& online, double tau) {
    auto ts = target.arrays();
    auto os = online.arrays();
    for (std::size_t i = 0; i < ts.size(); ++i) polyak_update(*ts[i], *os[i], tau);
}

}  // namespace o2o::num
