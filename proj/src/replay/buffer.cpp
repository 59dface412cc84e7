#include "o2o/replay/buffer.hpp"

#include <cmath>
#include <stdexcept>

namespace o2o::replay {

Regime parse_regime(std::string_view name) {
    if (name == "preload_uniform") return Regime::PreloadUniform;
    if (name == "online_only") return Regime::OnlineOnly;
    if (name == "fixed_ratio") return Regime::FixedRatio;
    throw std::invalid_argument("unknown replay regime: " + std::string(name));
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::PreloadUniform: return "preload_uniform";
        case Regime::OnlineOnly: return "online_only";
        case Regime::FixedRatio: return "fixed_ratio";
    }
    throw std::invalid_argument("unknown Regime");
}

ReplayBuffer::ReplayBuffer(BufferConfig config) : config_(config) {
    if (config_.capacity == 0) throw std::invalid_argument("replay: capacity must be positive");
    if (config_.min_size == 0 || config_.min_size > config_.capacity)
        throw std::invalid_argument("replay: need 0 < min_size <= capacity");
    if (config_.offline_ratio < 0.0 || config_.offline_ratio > 1.0)
        throw std::invalid_argument("replay: offline_ratio outside [0, 1]");
    if (config_.state_dim == 0 || config_.action_dim == 0)
        throw std::invalid_argument("replay: dimensions must be positive");
}

void ReplayBuffer::preload(const data::OfflineDataset& dataset) {
    if (config_.regime == Regime::OnlineOnly)
        throw std::logic_error("replay: preload is not allowed under the online-only regime");
    if (preloaded_) throw std::logic_error("replay: preload may only run once");
    if (dataset.state_dim != config_.state_dim || dataset.action_dim != config_.action_dim)
        throw std::invalid_argument("replay: dataset dimensions do not match buffer");
    preloaded_ = true;

    std::size_t start = 0;
    if (dataset.size() > config_.capacity) start = dataset.size() - config_.capacity;
    for (std::size_t i = start; i < dataset.size(); ++i) {
        data::Transition t = dataset.transitions[i];
        t.provenance = data::Provenance::Offline;
        offline_.push_back(std::move(t));
    }
}

void ReplayBuffer::push(data::Transition t) {
    if (t.state.size() != config_.state_dim || t.next_state.size() != config_.state_dim ||
        t.action.size() != config_.action_dim)
        throw std::invalid_argument("replay: transition dimensions do not match buffer");
    t.provenance = data::Provenance::Online;
    online_.push_back(std::move(t));
    if (size() > config_.capacity) {
        if (config_.regime == Regime::FixedRatio) {
            online_.pop_front();
        } else if (!offline_.empty()) {
            offline_.pop_front();
        } else {
            online_.pop_front();
        }
    }
}

bool ReplayBuffer::can_sample() const {
    if (config_.regime == Regime::OnlineOnly) return online_.size() >= config_.min_size;
    return size() >= config_.min_size;
}

void ReplayBuffer::check_sampleable(std::size_t batch_size) const {
    if (batch_size == 0) throw std::invalid_argument("replay: batch size must be positive");
    if (!can_sample()) throw std::logic_error("replay: below minimum size");
    if (config_.regime == Regime::FixedRatio) {
        const auto k_off =
            static_cast<std::size_t>(std::lround(config_.offline_ratio * static_cast<double>(batch_size)));
        if (k_off > 0 && offline_.empty())
            throw std::logic_error("replay: fixed-ratio sampling with empty offline class");
        if (k_off < batch_size && online_.empty())
            throw std::logic_error("replay: fixed-ratio sampling with empty online class");
    }
}

const data::Transition& ReplayBuffer::draw(std::size_t batch_size, std::size_t position,
                                           num::Rng& rng) const {
    if (config_.regime == Regime::FixedRatio) {
        const auto k_off =
            static_cast<std::size_t>(std::lround(config_.offline_ratio * static_cast<double>(batch_size)));
        if (position < k_off) return offline_[rng.uniform_index(offline_.size())];
        return online_[rng.uniform_index(online_.size())];
    }
    const std::size_t idx = rng.uniform_index(size());
    if (idx < offline_.size()) return offline_[idx];
    return online_[idx - offline_.size()];
}

std::vector<data::Transition> ReplayBuffer::sample(std::size_t batch_size, num::Rng& rng) const {
    check_sampleable(batch_size);
    std::vector<data::Transition> out;
    out.reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) out.push_back(draw(batch_size, i, rng));
    return out;
}

void ReplayBuffer::sample_into(Batch& batch, std::size_t batch_size, num::Rng& rng) const {
    check_sampleable(batch_size);
    const std::size_t sd = config_.state_dim;
    const std::size_t ad = config_.action_dim;
    if (batch.states.rows() != batch_size || batch.states.cols() != sd)
        batch.states = num::RealArray::mat(batch_size, sd);
    if (batch.actions.rows() != batch_size || batch.actions.cols() != ad)
        batch.actions = num::RealArray::mat(batch_size, ad);
    if (batch.rewards.size() != batch_size) batch.rewards = num::RealArray::vec(batch_size);
    if (batch.next_states.rows() != batch_size || batch.next_states.cols() != sd)
        batch.next_states = num::RealArray::mat(batch_size, sd);
    if (batch.terminals.size() != batch_size) batch.terminals = num::RealArray::vec(batch_size);

    for (std::size_t i = 0; i < batch_size; ++i) {
        const data::Transition& t = draw(batch_size, i, rng);
        for (std::size_t j = 0; j < sd; ++j) {
            batch.states[i * sd + j] = t.state[j];
            batch.next_states[i * sd + j] = t.next_state[j];
        }
        for (std::size_t j = 0; j < ad; ++j) batch.actions[i * ad + j] = t.action[j];
        batch.rewards[i] = t.reward;
        batch.terminals[i] = t.terminal ? 1.0 : 0.0;
    }
}

}  // namespace o2o::replay
