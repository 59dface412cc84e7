#pragma once

#include <cstdint>
#include <string_view>

namespace o2o::num {

// Counter-based generator: the stream is a pure function of (key, counter),
// so identical seeds give identical streams on every platform, and named
// substreams derived via split() are mutually independent.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    // Independent substream keyed by name; does not advance this stream.
    Rng split(std::string_view stream_name) const;

    std::uint64_t next_u64();

    double uniform();                         // [0, 1)
    double uniform(double lo, double hi);     // [lo, hi)
    double normal();                          // N(0, 1)
    std::size_t uniform_index(std::size_t n); // [0, n), n > 0

private:
    Rng(std::uint64_t key, std::uint64_t counter) : key_(key), counter_(counter) {}

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace o2o::num
