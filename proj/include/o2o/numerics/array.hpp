#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace o2o::num {

// Dense row-major array of 64-bit reals. Rank 1 or 2 covers everything this
// project needs; higher ranks are rejected at construction.
class RealArray {
public:
    RealArray() = default;

    explicit RealArray(std::vector<std::size_t> shape);
    RealArray(std::vector<std::size_t> shape, std::vector<double> data);

    static RealArray vec(std::size_t n) { return RealArray({n}); }
    static RealArray mat(std::size_t rows, std::size_t cols) { return RealArray({rows, cols}); }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    // rank-1 arrays behave as a single row
    std::size_t rows() const { return rank() == 2 ? shape_[0] : 1; }
    std::size_t cols() const { return rank() == 2 ? shape_[1] : shape_.empty() ? 0 : shape_[0]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

    std::vector<double>& flat() { return data_; }
    const std::vector<double>& flat() const { return data_; }

    bool same_shape(const RealArray& other) const { return shape_ == other.shape_; }
    bool all_finite() const;
    void fill(double value);

    bool operator==(const RealArray& other) const = default;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

// Throws std::runtime_error naming `what` if any entry is NaN/Inf.
void check_finite(const RealArray& a, const char* what);

double l2_norm(const RealArray& a);

// Rank-1: rescale the whole vector to unit 2-norm when its norm exceeds 1.
// Rank-2: applied independently to every row. Zero rows pass through.
RealArray clip_to_unit_norm(const RealArray& g);
void clip_to_unit_norm_inplace(RealArray& g);

}  // namespace o2o::num
