#include "o2o/numerics/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace o2o::num {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// murmur3-style finalizer: bijective, strong avalanche
std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 33;
    z *= 0xff51afd7ed558ccdULL;
    z ^= z >> 33;
    z *= 0xc4ceb9fe1a85ec53ULL;
    z ^= z >> 33;
    return z;
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

Rng::Rng(std::uint64_t seed) : key_(mix64(seed ^ kGolden)), counter_(0) {}

Rng Rng::split(std::string_view stream_name) const {
    return Rng(mix64(key_ ^ mix64(fnv1a(stream_name))), 0);
}

std::uint64_t Rng::next_u64() {
    counter_ += 1;
    return mix64(key_ ^ mix64(counter_ * kGolden));
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double Rng::normal() {
    // Box-Muller; u1 in (0, 1] keeps the log finite
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::uniform_index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("Rng::uniform_index: n must be positive");
    return static_cast<std::size_t>(next_u64() % n);
}

}  // namespace o2o::num
