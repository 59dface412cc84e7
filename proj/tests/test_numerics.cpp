#include "doctest.h"

#include <cmath>
#include <set>
#include <vector>

#include "o2o/numerics/array.hpp"
#include "o2o/numerics/mlp.hpp"
#include "o2o/numerics/optim.hpp"
#include "o2o/numerics/rng.hpp"

using namespace o2o::num;

namespace {

// Independent oracle: central finite differences of sum(cot * forward).
double scalar_objective(const MlpParams& p, const RealArray& input, const RealArray& cot) {
    RealArray out = mlp_forward(p, input);
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) s += cot[i] * out[i];
    return s;
}

bool grad_close(double analytic, double numeric) {
    const double tol = std::max(1e-8, 1e-4 * std::max(std::fabs(analytic), std::fabs(numeric)));
    return std::fabs(analytic - numeric) <= tol;
}

MlpParams random_small_mlp(std::size_t in, std::size_t hid, std::size_t out, bool tanh_head,
                           Rng& rng) {
    MlpParams p = make_mlp(in, hid, out, tanh_head, rng);
    // perturb layer norm parameters away from the identity so their gradients
    // are exercised at generic values
    for (double& v : p.ln_gain.flat()) v = 1.0 + 0.3 * rng.normal();
    for (double& v : p.ln_offset.flat()) v = 0.2 * rng.normal();
    // a tanh head initialized at +-1e-3 has near-zero output gradients; widen
    if (tanh_head)
        for (double& v : p.w3.flat()) v = 0.5 * rng.normal();
    return p;
}

RealArray random_array(std::vector<std::size_t> shape, Rng& rng) {
    RealArray a(std::move(shape));
    for (double& v : a.flat()) v = rng.normal();
    return a;
}

}  // namespace

TEST_CASE("rng: identical seeds give identical streams, splits differ") {
    Rng a(1234), b(1234);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng base(7);
    Rng s1 = base.split("init");
    Rng s2 = base.split("explore");
    Rng s1b = Rng(7).split("init");
    std::vector<std::uint64_t> v1, v2, v1b;
    for (int i = 0; i < 32; ++i) {
        v1.push_back(s1.next_u64());
        v2.push_back(s2.next_u64());
        v1b.push_back(s1b.next_u64());
    }
    CHECK(v1 == v1b);
    CHECK(v1 != v2);
}

TEST_CASE("rng: uniform in [0,1), normal has sane moments") {
    Rng rng(99);
    double sum = 0.0, sumsq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
        sumsq += u * u;
    }
    CHECK(std::fabs(sum / n - 0.5) < 0.01);

    double nsum = 0.0, nsumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        nsum += z;
        nsumsq += z * z;
    }
    CHECK(std::fabs(nsum / n) < 3.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::fabs(nsumsq / n - 1.0) < 0.05);
}

TEST_CASE("mlp_forward: zero params propagate to f(0)") {
    Rng rng(0);
    for (bool head : {false, true}) {
        MlpParams p = make_mlp(3, 8, 2, head, rng);
        for (RealArray* a : p.arrays()) a->fill(0.0);
        p.ln_gain.fill(1.0);
        RealArray x({3}, {0.4, -1.2, 2.5});
        RealArray y = mlp_forward(p, x);
        for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == doctest::Approx(0.0));
    }
}

TEST_CASE("mlp_forward: batched rows equal single-input forwards") {
    Rng rng(5);
    MlpParams p = random_small_mlp(4, 8, 3, false, rng);
    RealArray batch = random_array({6, 4}, rng);
    RealArray out = mlp_forward(p, batch);
    for (std::size_t r = 0; r < 6; ++r) {
        RealArray row({4});
        for (std::size_t c = 0; c < 4; ++c) row[c] = batch.at(r, c);
        RealArray single = mlp_forward(p, row);
        for (std::size_t c = 0; c < 3; ++c) CHECK(single[c] == doctest::Approx(out.at(r, c)).epsilon(1e-12));
    }
}

TEST_CASE("mlp_forward: deterministic and shape-checked") {
    Rng rng(17);
    MlpParams p = random_small_mlp(4, 8, 2, true, rng);
    RealArray x = random_array({4}, rng);
    RealArray y1 = mlp_forward(p, x);
    RealArray y2 = mlp_forward(p, x);
    CHECK(y1 == y2);
    RealArray bad = random_array({5}, rng);
    CHECK_THROWS_AS(mlp_forward(p, bad), std::invalid_argument);
}

TEST_CASE("mlp gradients match central finite differences on >=20 random instances") {
    Rng rng(2024);
    const double h = 1e-5;
    int instances = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t in = 1 + rng.uniform_index(5);
        const std::size_t out = 1 + rng.uniform_index(4);
        const std::size_t batch = 1 + rng.uniform_index(4);
        const bool head = trial % 2 == 0;
        MlpParams p = random_small_mlp(in, 8, out, head, rng);
        RealArray x = random_array({batch, in}, rng);
        RealArray cot = random_array({batch, out}, rng);

        MlpGradients g = mlp_backward(p, x, cot);

        auto arrays = p.arrays();
        auto grads = g.params.arrays();
        for (std::size_t ai = 0; ai < arrays.size(); ++ai) {
            RealArray& a = *arrays[ai];
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double saved = a[i];
                a[i] = saved + h;
                const double fp = scalar_objective(p, x, cot);
                a[i] = saved - h;
                const double fm = scalar_objective(p, x, cot);
                a[i] = saved;
                const double numeric = (fp - fm) / (2.0 * h);
                const double analytic = (*grads[ai])[i];
                INFO("array ", MlpParams::array_name(ai), " index ", i);
                CHECK(grad_close(analytic, numeric));
            }
        }

        // input gradient against the same oracle
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double saved = x[i];
            x[i] = saved + h;
            const double fp = scalar_objective(p, x, cot);
            x[i] = saved - h;
            const double fm = scalar_objective(p, x, cot);
            x[i] = saved;
            const double numeric = (fp - fm) / (2.0 * h);
            CHECK(grad_close(g.input[i], numeric));
        }
        ++instances;
    }
    CHECK(instances >= 20);
}

TEST_CASE("mlp_backward: zero cotangent gives zero gradients") {
    Rng rng(3);
    MlpParams p = random_small_mlp(3, 8, 2, false, rng);
    RealArray x = random_array({2, 3}, rng);
    RealArray cot({2, 2});
    MlpGradients g = mlp_backward(p, x, cot);
    for (const RealArray* a : g.params.arrays())
        for (double v : a->flat()) CHECK(v == 0.0);
    for (double v : g.input.flat()) CHECK(v == 0.0);
}

TEST_CASE("mlp_input_gradient agrees with full backward") {
    Rng rng(11);
    MlpParams p = random_small_mlp(5, 8, 3, false, rng);
    RealArray x = random_array({4, 5}, rng);
    RealArray cot = random_array({4, 3}, rng);
    MlpGradients g = mlp_backward(p, x, cot);
    MlpCache cache;
    mlp_forward(p, x, cache);
    RealArray gi = mlp_input_gradient(p, cache, cot);
    REQUIRE(gi.size() == g.input.size());
    for (std::size_t i = 0; i < gi.size(); ++i) CHECK(gi[i] == doctest::Approx(g.input[i]).epsilon(1e-12));
}

TEST_CASE("make_mlp: deterministic per seed, small actor head") {
    Rng r1(42), r2(42);
    MlpParams a = make_mlp(4, 16, 2, true, r1);
    MlpParams b = make_mlp(4, 16, 2, true, r2);
    for (std::size_t i = 0; i < 8; ++i) CHECK(*a.arrays()[i] == *b.arrays()[i]);
    for (double v : a.w3.flat()) CHECK(std::fabs(v) <= 1e-3);
    for (double v : a.b3.flat()) CHECK(v == 0.0);
    for (double v : a.ln_gain.flat()) CHECK(v == 1.0);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
    Rng rng(8);
    MlpParams p = make_mlp(2, 4, 1, false, rng);
    MlpParams before = p;
    AdamState st = make_adam(p, 3e-4);
    MlpParams zero = zeros_like(p);
    adam_step(st, p, zero);
    for (std::size_t i = 0; i < 8; ++i) CHECK(*p.arrays()[i] == *before.arrays()[i]);
    CHECK(st.step == 1);
}

TEST_CASE("adam: first step with unit gradient moves by about -lr") {
    // scalar reference: m_hat = v_hat = 1 after one step, so delta = -lr / (1 + eps)
    Rng rng(9);
    MlpParams p = make_mlp(2, 4, 1, false, rng);
    MlpParams before = p;
    AdamState st = make_adam(p, 3e-4);
    MlpParams ones = zeros_like(p);
    for (RealArray* a : ones.arrays()) a->fill(1.0);
    adam_step(st, p, ones);
    for (std::size_t i = 0; i < 8; ++i) {
        const RealArray& now = *p.arrays()[i];
        const RealArray& was = *before.arrays()[i];
        for (std::size_t j = 0; j < now.size(); ++j)
            CHECK(now[j] - was[j] == doctest::Approx(-3e-4).epsilon(1e-6));
    }
}

TEST_CASE("adam: constant gradient walks opposite to its sign") {
    Rng rng(10);
    MlpParams p = make_mlp(2, 4, 1, false, rng);
    const double start = p.w1[0];
    AdamState st = make_adam(p, 3e-4);
    MlpParams grad = zeros_like(p);
    for (RealArray* a : grad.arrays()) a->fill(2.5);
    for (int i = 0; i < 50; ++i) adam_step(st, p, grad);
    CHECK(p.w1[0] < start);

    MlpParams q = make_mlp(2, 4, 1, false, rng);
    const double qstart = q.w2[3];
    AdamState st2 = make_adam(q, 3e-4);
    for (RealArray* a : grad.arrays()) a->fill(-0.7);
    for (int i = 0; i < 50; ++i) adam_step(st2, q, grad);
    CHECK(q.w2[3] > qstart);
}

TEST_CASE("adam: rejects non-finite gradients") {
    Rng rng(12);
    MlpParams p = make_mlp(2, 4, 1, false, rng);
    AdamState st = make_adam(p, 3e-4);
    MlpParams grad = zeros_like(p);
    grad.w1[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(adam_step(st, p, grad), std::runtime_error);
}

TEST_CASE("polyak: endpoint and midpoint behavior") {
    RealArray target({3}, {0.0, 0.0, 0.0});
    RealArray online({3}, {2.0, -4.0, 6.0});

    RealArray t1 = target;
    polyak_update(t1, online, 1.0);
    CHECK(t1 == online);

    RealArray t0 = target;
    polyak_update(t0, online, 0.0);
    CHECK(t0 == target);

    RealArray th = target;
    polyak_update(th, online, 0.5);
    CHECK(th[0] == doctest::Approx(1.0));
    CHECK(th[1] == doctest::Approx(-2.0));
    CHECK(th[2] == doctest::Approx(3.0));

    CHECK_THROWS_AS(polyak_update(th, online, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(polyak_update(th, online, 1.1), std::invalid_argument);
}

TEST_CASE("polyak: tau=5e-3 converges geometrically toward fixed online params") {
    RealArray target({2}, {10.0, -10.0});
    RealArray online({2}, {1.0, 2.0});
    double prev_gap = std::fabs(target[0] - online[0]);
    for (int k = 0; k < 2000; ++k) {
        polyak_update(target, online, 5e-3);
        const double gap = std::fabs(target[0] - online[0]);
        CHECK(gap == doctest::Approx(prev_gap * (1.0 - 5e-3)).epsilon(1e-9));
        prev_gap = gap;
    }
    CHECK(prev_gap < std::fabs(10.0 - 1.0) * std::pow(1.0 - 5e-3, 1999));
}

TEST_CASE("clip_to_unit_norm: trivial cases") {
    RealArray small({2}, {0.3, 0.4});
    CHECK(clip_to_unit_norm(small) == small);

    RealArray big({2}, {3.0, 4.0});
    RealArray clipped = clip_to_unit_norm(big);
    CHECK(clipped[0] == doctest::Approx(0.6));
    CHECK(clipped[1] == doctest::Approx(0.8));

    RealArray zero({3});
    CHECK(clip_to_unit_norm(zero) == zero);

    RealArray bad({2}, {1.0, std::numeric_limits<double>::infinity()});
    CHECK_THROWS_AS(clip_to_unit_norm(bad), std::runtime_error);
}

TEST_CASE("clip_to_unit_norm: per-row, idempotent, never increases norm") {
    Rng rng(77);
    RealArray g({16, 3});
    for (double& v : g.flat()) v = 3.0 * rng.normal();
    RealArray once = clip_to_unit_norm(g);
    RealArray twice = clip_to_unit_norm(once);
    CHECK(once == twice);
    for (std::size_t r = 0; r < 16; ++r) {
        double before = 0.0, after = 0.0;
        for (std::size_t c = 0; c < 3; ++c) {
            before += g.at(r, c) * g.at(r, c);
            after += once.at(r, c) * once.at(r, c);
        }
        CHECK(std::sqrt(after) <= std::sqrt(before) + 1e-12);
        CHECK(std::sqrt(after) <= 1.0 + 1e-12);
    }
}
