#pragma once

#include <array>
#include <cstddef>

#include "o2o/numerics/array.hpp"
#include "o2o/numerics/rng.hpp"

namespace o2o::num {

inline constexpr double kLayerNormEpsilon = 1e-5;
inline constexpr double kEluAlpha = 1.0;

// Layer-norm MLP: linear -> layer norm -> tanh -> linear -> ELU -> linear,
// with an optional tanh output head (actor). Hidden width defaults to 256 in
// production configs but stays a parameter so gradient checks can run on
// small instances.
struct MlpParams {
    std::size_t in_dim = 0;
    std::size_t hidden_dim = 0;
    std::size_t out_dim = 0;
    bool tanh_head = false;

    RealArray w1, b1;              // hidden x in, hidden
    RealArray ln_gain, ln_offset;  // hidden
    RealArray w2, b2;              // hidden x hidden, hidden
    RealArray w3, b3;              // out x hidden, out

    std::array<RealArray*, 8> arrays();
    std::array<const RealArray*, 8> arrays() const;
    static const char* array_name(std::size_t i);
};

// Weights drawn uniform in +-1/sqrt(fan_in); a tanh head's final layer is
// drawn uniform in +-1e-3 with zero bias. Layer-norm starts at gain 1,
// offset 0. Draw order is fixed (w1, b1, w2, b2, w3[, b3]).
MlpParams make_mlp(std::size_t in_dim, std::size_t hidden_dim, std::size_t out_dim,
                   bool tanh_head, Rng& rng);

// Same shapes, all entries zero. Used for gradient and moment buffers.
MlpParams zeros_like(const MlpParams& p);

// Forward intermediates; reusable across calls so the hot path does not
// reallocate.
struct MlpCache {
    RealArray input;     // batch x in
    RealArray xhat;      // batch x hidden (normalized pre-gain activations)
    RealArray inv_std;   // batch
    RealArray h1;        // batch x hidden (tanh output)
    RealArray z2;        // batch x hidden (second linear pre-activation)
    RealArray h2;        // batch x hidden (ELU output)
    RealArray output;    // batch x out
};

// Input is rank-1 [in] or rank-2 [batch x in]; output rank matches.
RealArray mlp_forward(const MlpParams& p, const RealArray& input);
RealArray mlp_forward(const MlpParams& p, const RealArray& input, MlpCache& cache);

struct MlpGradients {
    MlpParams params;     // gradient arrays, same shapes as the parameters
    RealArray input;      // gradient w.r.t. the input
};

// Gradients of sum(cotangent * output) w.r.t. every parameter and the input.
// The cotangent must match the forward output shape.
MlpGradients mlp_backward(const MlpParams& p, const RealArray& input, const RealArray& cotangent);

// Cache variant for the hot path; `param_grads` must be zeros_like-shaped and
// is overwritten. Pass nullptr for `input_grad` when it is not needed.
void mlp_backward(const MlpParams& p, const MlpCache& cache, const RealArray& cotangent,
                  MlpParams& param_grads, RealArray* input_grad);

// Input gradient only; skips every weight-gradient GEMM. Used where a frozen
// network is differentiated w.r.t. its input.
RealArray mlp_input_gradient(const MlpParams& p, const MlpCache& cache, const RealArray& cotangent);

}  // namespace o2o::num
