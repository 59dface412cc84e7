#include "o2o/numerics/mlp.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace o2o::num {

namespace {

using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<MatrixRM>;
using MapCM = Eigen::Map<const MatrixRM>;
using MapV = Eigen::Map<Eigen::VectorXd>;
using MapCV = Eigen::Map<const Eigen::VectorXd>;

MapCM as_matrix(const RealArray& a, std::size_t rows, std::size_t cols) {
    return MapCM(a.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

MapM as_matrix(RealArray& a, std::size_t rows, std::size_t cols) {
    return MapM(a.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

void resize_to(RealArray& a, std::size_t rows, std::size_t cols) {
    if (a.rank() != 2 || a.rows() != rows || a.cols() != cols) a = RealArray::mat(rows, cols);
}

void resize_to(RealArray& a, std::size_t n) {
    if (a.rank() != 1 || a.size() != n) a = RealArray::vec(n);
}

double elu_derivative(double z, double h) { return z > 0.0 ? 1.0 : h + kEluAlpha; }

// Eigen vectorizes exp (not tanh/expm1) for doubles, so both activations are
// phrased through exp. tanh(x) = 1 - 2 / (exp(2x) + 1) is exact at the
// saturated ends and loses only ~1 ulp near zero.
template <typename Dst, typename Src>
void tanh_into(Dst dst, const Src& src) {
    dst = 1.0 - 2.0 * ((2.0 * src).exp() + 1.0).inverse();
}

void fill_uniform(RealArray& a, double lo, double hi, Rng& rng) {
    for (double& v : a.flat()) v = rng.uniform(lo, hi);
}

}  // namespace

std::array<RealArray*, 8> MlpParams::arrays() {
    return {&w1, &b1, &ln_gain, &ln_offset, &w2, &b2, &w3, &b3};
}

std::array<const RealArray*, 8> MlpParams::arrays() const {
    return {&w1, &b1, &ln_gain, &ln_offset, &w2, &b2, &w3, &b3};
}

const char* MlpParams::array_name(std::size_t i) {
    static const char* names[] = {"w1", "b1", "ln_gain", "ln_offset", "w2", "b2", "w3", "b3"};
    return names[i];
}

MlpParams make_mlp(std::size_t in_dim, std::size_t hidden_dim, std::size_t out_dim,
                   bool tanh_head, Rng& rng) {
    if (in_dim == 0 || hidden_dim == 0 || out_dim == 0)
        throw std::invalid_argument("make_mlp: dimensions must be positive");
    MlpParams p;
    p.in_dim = in_dim;
    p.hidden_dim = hidden_dim;
    p.out_dim = out_dim;
    p.tanh_head = tanh_head;

    p.w1 = RealArray::mat(hidden_dim, in_dim);
    p.b1 = RealArray::vec(hidden_dim);
    p.ln_gain = RealArray::vec(hidden_dim);
    p.ln_offset = RealArray::vec(hidden_dim);
    p.w2 = RealArray::mat(hidden_dim, hidden_dim);
    p.b2 = RealArray::vec(hidden_dim);
    p.w3 = RealArray::mat(out_dim, hidden_dim);
    p.b3 = RealArray::vec(out_dim);

    const double s1 = 1.0 / std::sqrt(static_cast<double>(in_dim));
    fill_uniform(p.w1, -s1, s1, rng);
    fill_uniform(p.b1, -s1, s1, rng);
    p.ln_gain.fill(1.0);
    p.ln_offset.fill(0.0);
    const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    fill_uniform(p.w2, -s2, s2, rng);
    fill_uniform(p.b2, -s2, s2, rng);
    if (tanh_head) {
        fill_uniform(p.w3, -1e-3, 1e-3, rng);
        p.b3.fill(0.0);
    } else {
        fill_uniform(p.w3, -s2, s2, rng);
        fill_uniform(p.b3, -s2, s2, rng);
    }
    return p;
}

MlpParams zeros_like(const MlpParams& p) {
    MlpParams z;
    z.in_dim = p.in_dim;
    z.hidden_dim = p.hidden_dim;
    z.out_dim = p.out_dim;
    z.tanh_head = p.tanh_head;
    z.w1 = RealArray::mat(p.hidden_dim, p.in_dim);
    z.b1 = RealArray::vec(p.hidden_dim);
    z.ln_gain = RealArray::vec(p.hidden_dim);
    z.ln_offset = RealArray::vec(p.hidden_dim);
    z.w2 = RealArray::mat(p.hidden_dim, p.hidden_dim);
    z.b2 = RealArray::vec(p.hidden_dim);
    z.w3 = RealArray::mat(p.out_dim, p.hidden_dim);
    z.b3 = RealArray::vec(p.out_dim);
    return z;
}

namespace {

void forward_impl(const MlpParams& p, const RealArray& input, MlpCache& c) {
    if (input.cols() != p.in_dim) throw std::invalid_argument("mlp_forward: input width mismatch");
    const std::size_t batch = input.rows();
    const std::size_t hid = p.hidden_dim;

    resize_to(c.input, batch, p.in_dim);
    c.input.flat() = input.flat();
    resize_to(c.xhat, batch, hid);
    resize_to(c.inv_std, batch);
    resize_to(c.h1, batch, hid);
    resize_to(c.z2, batch, hid);
    resize_to(c.h2, batch, hid);
    resize_to(c.output, batch, p.out_dim);

    auto x = as_matrix(c.input, batch, p.in_dim);
    auto w1 = as_matrix(p.w1, hid, p.in_dim);
    auto xhat = as_matrix(c.xhat, batch, hid);

    // z1 = x * w1' + b1, staged into xhat before normalization
    xhat.noalias() = x * w1.transpose();
    xhat.rowwise() += MapCV(p.b1.data(), hid).transpose();

    // layer norm over the feature dimension
    for (std::size_t r = 0; r < batch; ++r) {
        auto row = xhat.row(static_cast<Eigen::Index>(r));
        const double mean = row.mean();
        row.array() -= mean;
        const double var = row.squaredNorm() / static_cast<double>(hid);
        const double inv_std = 1.0 / std::sqrt(var + kLayerNormEpsilon);
        row *= inv_std;
        c.inv_std[r] = inv_std;
    }

    // h1 = tanh(gain .* xhat + offset)
    auto h1 = as_matrix(c.h1, batch, hid);
    auto gain_row = MapCV(p.ln_gain.data(), hid).transpose().array();
    auto offset_row = MapCV(p.ln_offset.data(), hid).transpose().array();
    h1.array() = ((xhat.array().rowwise() * gain_row).rowwise() + offset_row).tanh();

    auto z2 = as_matrix(c.z2, batch, hid);
    auto w2 = as_matrix(p.w2, hid, hid);
    z2.noalias() = h1 * w2.transpose();
    z2.rowwise() += MapCV(p.b2.data(), hid).transpose();

    auto h2m = as_matrix(c.h2, batch, hid);
    h2m.array() = z2.array().max(0.0) + kEluAlpha * z2.array().min(0.0).expm1();

    auto w3 = as_matrix(p.w3, p.out_dim, hid);
    auto out = as_matrix(c.output, batch, p.out_dim);
    out.noalias() = h2m * w3.transpose();
    out.rowwise() += MapCV(p.b3.data(), p.out_dim).transpose();

    if (p.tanh_head) out.array() = out.array().tanh();

    check_finite(c.output, "mlp_forward output");
}

RealArray shaped_output(const MlpParams& p, const RealArray& input, const MlpCache& c) {
    if (input.rank() == 1) return RealArray({p.out_dim}, c.output.flat());
    return c.output;
}

// Shared spine of the backward pass: everything up to (and excluding) the
// parameter-gradient GEMMs. Produces d_z1 (gradient at the first linear's
// output) and optionally the earlier deltas needed for parameter gradients.
struct BackwardWork {
    RealArray d3;    // batch x out   (gradient at third linear output)
    RealArray dz2;   // batch x hidden
    RealArray du;    // batch x hidden (gradient at gain*xhat+offset)
    RealArray dz1;   // batch x hidden
};

void backward_spine(const MlpParams& p, const MlpCache& c, const RealArray& cotangent,
                    BackwardWork& w) {
    const std::size_t batch = c.input.rows();
    const std::size_t hid = p.hidden_dim;
    if (cotangent.cols() != p.out_dim || cotangent.rows() != batch)
        throw std::invalid_argument("mlp_backward: cotangent shape mismatch");

    resize_to(w.d3, batch, p.out_dim);
    if (p.tanh_head) {
        auto outm = as_matrix(c.output, batch, p.out_dim);
        as_matrix(w.d3, batch, p.out_dim).array() =
            as_matrix(cotangent, batch, p.out_dim).array() * (1.0 - outm.array().square());
    } else {
        w.d3.flat() = cotangent.flat();
    }

    resize_to(w.dz2, batch, hid);
    auto d3 = as_matrix(w.d3, batch, p.out_dim);
    auto w3 = as_matrix(p.w3, p.out_dim, hid);
    auto dz2 = as_matrix(w.dz2, batch, hid);
    dz2.noalias() = d3 * w3;  // gradient at h2
    for (std::size_t i = 0; i < batch * hid; ++i)
        w.dz2[i] *= elu_derivative(c.z2[i], c.h2[i]);

    resize_to(w.du, batch, hid);
    auto du = as_matrix(w.du, batch, hid);
    auto w2 = as_matrix(p.w2, hid, hid);
    du.noalias() = dz2 * w2;  // gradient at h1
    auto h1m = as_matrix(c.h1, batch, hid);
    du.array() *= 1.0 - h1m.array().square();

    // through gain, then the layer-norm row transform
    resize_to(w.dz1, batch, hid);
    const double* gain = p.ln_gain.data();
    const double inv_n = 1.0 / static_cast<double>(hid);
    for (std::size_t r = 0; r < batch; ++r) {
        const double* du_row = w.du.data() + r * hid;
        const double* xh = c.xhat.data() + r * hid;
        double* out = w.dz1.data() + r * hid;
        double sum_dxhat = 0.0;
        double sum_dxhat_xhat = 0.0;
        for (std::size_t j = 0; j < hid; ++j) {
            const double dxhat = du_row[j] * gain[j];
            out[j] = dxhat;
            sum_dxhat += dxhat;
            sum_dxhat_xhat += dxhat * xh[j];
        }
        const double mean_dxhat = sum_dxhat * inv_n;
        const double mean_dxhat_xhat = sum_dxhat_xhat * inv_n;
        const double inv_std = c.inv_std[r];
        for (std::size_t j = 0; j < hid; ++j)
            out[j] = inv_std * (out[j] - mean_dxhat - xh[j] * mean_dxhat_xhat);
    }
}

}  // namespace

RealArray mlp_forward(const MlpParams& p, const RealArray& input) {
    MlpCache cache;
    forward_impl(p, input, cache);
    return shaped_output(p, input, cache);
}

RealArray mlp_forward(const MlpParams& p, const RealArray& input, MlpCache& cache) {
    forward_impl(p, input, cache);
    return shaped_output(p, input, cache);
}

void mlp_backward(const MlpParams& p, const MlpCache& cache, const RealArray& cotangent,
                  MlpParams& param_grads, RealArray* input_grad) {
    const std::size_t batch = cache.input.rows();
    const std::size_t hid = p.hidden_dim;

    // rank-1 cotangents are treated as a single row
    const RealArray* cot = &cotangent;
    RealArray cot_row;
    if (cotangent.rank() == 1) {
        cot_row = RealArray({1, cotangent.size()}, cotangent.flat());
        cot = &cot_row;
    }

    BackwardWork w;
    backward_spine(p, cache, *cot, w);

    auto d3 = as_matrix(w.d3, batch, p.out_dim);
    auto dz2 = as_matrix(w.dz2, batch, hid);
    auto dz1 = as_matrix(w.dz1, batch, hid);
    auto h2 = as_matrix(cache.h2, batch, hid);
    auto h1 = as_matrix(cache.h1, batch, hid);
    auto x = as_matrix(cache.input, batch, p.in_dim);

    as_matrix(param_grads.w3, p.out_dim, hid).noalias() = d3.transpose() * h2;
    MapV(param_grads.b3.data(), p.out_dim) = d3.colwise().sum();

    as_matrix(param_grads.w2, hid, hid).noalias() = dz2.transpose() * h1;
    MapV(param_grads.b2.data(), hid) = dz2.colwise().sum();

    // layer-norm parameter gradients
    double* g_gain = param_grads.ln_gain.data();
    double* g_offset = param_grads.ln_offset.data();
    for (std::size_t j = 0; j < hid; ++j) {
        g_gain[j] = 0.0;
        g_offset[j] = 0.0;
    }
    for (std::size_t r = 0; r < batch; ++r) {
        const double* du_row = w.du.data() + r * hid;
        const double* xh = cache.xhat.data() + r * hid;
        for (std::size_t j = 0; j < hid; ++j) {
            g_gain[j] += du_row[j] * xh[j];
            g_offset[j] += du_row[j];
        }
    }

    as_matrix(param_grads.w1, hid, p.in_dim).noalias() = dz1.transpose() * x;
    MapV(param_grads.b1.data(), hid) = dz1.colwise().sum();

    if (input_grad != nullptr) {
        resize_to(*input_grad, batch, p.in_dim);
        auto w1 = as_matrix(p.w1, hid, p.in_dim);
        as_matrix(*input_grad, batch, p.in_dim).noalias() = dz1 * w1;
        check_finite(*input_grad, "mlp_backward input gradient");
    }

    for (const RealArray* a : param_grads.arrays()) check_finite(*a, "mlp_backward parameter gradient");
}

MlpGradients mlp_backward(const MlpParams& p, const RealArray& input, const RealArray& cotangent) {
    MlpCache cache;
    forward_impl(p, input, cache);
    MlpGradients g;
    g.params = zeros_like(p);
    RealArray input_grad;
    mlp_backward(p, cache, cotangent, g.params, &input_grad);
    if (input.rank() == 1)
        g.input = RealArray({p.in_dim}, input_grad.flat());
    else
        g.input = std::move(input_grad);
    return g;
}

RealArray mlp_input_gradient(const MlpParams& p, const MlpCache& cache, const RealArray& cotangent) {
    const std::size_t batch = cache.input.rows();
    BackwardWork w;
    backward_spine(p, cache, cotangent, w);
    RealArray input_grad = RealArray::mat(batch, p.in_dim);
    auto w1 = as_matrix(p.w1, p.hidden_dim, p.in_dim);
    as_matrix(input_grad, batch, p.in_dim).noalias() =
        as_matrix(w.dz1, batch, p.hidden_dim) * w1;
    check_finite(input_grad, "mlp_input_gradient");
    return input_grad;
}

}  // namespace o2o::num
