#pragma once

#include <cstddef>
#include <deque>
#include <string_view>
#include <vector>

#include "o2o/datasets/dataset.hpp"
#include "o2o/datasets/transition.hpp"
#include "o2o/numerics/array.hpp"
#include "o2o/numerics/rng.hpp"

namespace o2o::replay {

enum class Regime { PreloadUniform, OnlineOnly, FixedRatio };

Regime parse_regime(std::string_view name);  // throws std::invalid_argument
const char* regime_name(Regime r);

struct BufferConfig {
    std::size_t capacity = 1'000'000;
    std::size_t min_size = 1000;
    Regime regime = Regime::PreloadUniform;
    double offline_ratio = 0.5;  // FixedRatio only
    std::size_t state_dim = 0;
    std::size_t action_dim = 0;
};

// Batch in the layout the agents consume directly.
struct Batch {
    num::RealArray states;       // B x state_dim
    num::RealArray actions;      // B x action_dim
    num::RealArray rewards;      // B
    num::RealArray next_states;  // B x state_dim
    num::RealArray terminals;    // B (0/1)
};

// Bounded FIFO transition store. Offline items always precede online items
// chronologically (preload happens once, before any push), so two queues
// represent both the global FIFO order and the per-class order.
class ReplayBuffer {
public:
    explicit ReplayBuffer(BufferConfig config);

    const BufferConfig& config() const { return config_; }
    std::size_t size() const { return offline_.size() + online_.size(); }
    std::size_t offline_count() const { return offline_.size(); }
    std::size_t online_count() const { return online_.size(); }

    // Inserts every dataset transition with offline provenance, truncated to
    // capacity keeping the most recent. Single initialization; rejected under
    // OnlineOnly.
    void preload(const data::OfflineDataset& dataset);

    // Inserts with online provenance. Eviction: oldest online item under
    // FixedRatio (offline items are never displaced), global oldest otherwise.
    void push(data::Transition t);

    bool can_sample() const;

    // Uniform with replacement. FixedRatio draws exactly
    // round(offline_ratio * batch) offline items, the rest online.
    std::vector<data::Transition> sample(std::size_t batch_size, num::Rng& rng) const;

    // Same draw sequence as sample(), written into batch arrays.
    void sample_into(Batch& batch, std::size_t batch_size, num::Rng& rng) const;

private:
    const data::Transition& draw(std::size_t batch_size, std::size_t position, num::Rng& rng) const;
    void check_sampleable(std::size_t batch_size) const;

    BufferConfig config_;
    bool preloaded_ = false;
    std::deque<data::Transition> offline_;
    std::deque<data::Transition> online_;
};

}  // namespace o2o::replay
