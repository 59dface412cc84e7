#pragma once

#include <cstdint>
#include <vector>

namespace o2o::data {

enum class Provenance : std::uint8_t { Offline = 0, Online = 1 };

// One environment step. `terminal` marks entry into a documented failure set
// (a true absorbing state for bootstrapping); plain time-limit episode ends
// stay false.
struct Transition {
    std::vector<double> state;
    std::vector<double> action;
    double reward = 0.0;
    std::vector<double> next_state;
    bool terminal = false;
    Provenance provenance = Provenance::Offline;

    bool operator==(const Transition&) const = default;
};

}  // namespace o2o::data
