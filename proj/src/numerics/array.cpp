#include "o2o/numerics/array.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace o2o::num {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) {
        if (d == 0) throw std::invalid_argument("RealArray: zero dimension");
        n *= d;
    }
    return shape.empty() ? 0 : n;
}

}  // namespace

RealArray::RealArray(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
    if (shape_.empty() || shape_.size() > 2) throw std::invalid_argument("RealArray: rank must be 1 or 2");
    data_.assign(shape_product(shape_), 0.0);
}

RealArray::RealArray(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_.empty() || shape_.size() > 2) throw std::invalid_argument("RealArray: rank must be 1 or 2");
    if (shape_product(shape_) != data_.size())
        throw std::invalid_argument("RealArray: shape does not match data length");
}

bool RealArray::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

void RealArray::fill(double value) {
    for (double& v : data_) v = value;
}

void check_finite(const RealArray& a, const char* what) {
    if (!a.all_finite()) throw std::runtime_error(std::string("non-finite values in ") + what);
}

double l2_norm(const RealArray& a) {
    double s = 0.0;
    for (double v : a.flat()) s += v * v;
    return std::sqrt(s);
}

void clip_to_unit_norm_inplace(RealArray& g) {
    check_finite(g, "clip_to_unit_norm input");
    const std::size_t rows = g.rows();
    const std::size_t cols = g.cols();
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            const double v = g[r * cols + c];
            s += v * v;
        }
        const double norm = std::sqrt(s);
        if (norm > 1.0) {
            const double inv = 1.0 / norm;
            for (std::size_t c = 0; c < cols; ++c) g[r * cols + c] *= inv;
        }
    }
}

RealArray clip_to_unit_norm(const RealArray& g) {
    RealArray out = g;
    clip_to_unit_norm_inplace(out);
    return out;
}

}  // namespace o2o::num
