#pragma once

// FIFO experience replay over fixed-size encoded observations.

#include <array>
#include <cstdint>
#include <vector>

#include "swarmwall/errors.hpp"
#include "swarmwall/rng.hpp"

namespace swarmwall {

inline constexpr int kObsTokens = 7;
inline constexpr int kObsFeatures = 3;
inline constexpr int kObsValues = kObsTokens * kObsFeatures;

struct EncodedObs {
    std::array<float, kObsValues> tokens{};
    std::array<std::uint8_t, kObsTokens> mask{};

    friend bool operator==(const EncodedObs&, const EncodedObs&) = default;
};

struct Transition {
    EncodedObs obs;
    int action = 0;
    float reward = 0.0f;
    EncodedObs next_obs;
    std::uint8_t done = 0;

    friend bool operator==(const Transition&, const Transition&) = default;
};

class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw InvalidInputError("replay: capacity must be positive");
    }

    // Appends; evicts the oldest entry once full.
    void push(const Transition& t) {
        if (store_.size() < capacity_) {
            store_.push_back(t);
        } else {
            store_[cursor_] = t;
        }
        cursor_ = (cursor_ + 1) % capacity_;
    }

    std::size_t size() const { return store_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::size_t cursor() const { return cursor_; }

    const Transition& at(std::size_t i) const { return store_[i]; }

    // Uniform sample with replacement.
    std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const {
        if (store_.empty()) throw InvalidInputError("replay: cannot sample from empty buffer");
        std::vector<std::size_t> idx(batch);
        for (auto& i : idx) i = rng.uniform_index(store_.size());
        return idx;
    }

    // Entries oldest-first (for inspection and serialization).
    std::vector<Transition> snapshot_fifo() const {
        std::vector<Transition> out;
        out.reserve(store_.size());
        if (store_.size() < capacity_) {
            out = store_;
        } else {
            for (std::size_t i = 0; i < capacity_; ++i)
                out.push_back(store_[(cursor_ + i) % capacity_]);
        }
        return out;
    }

    void restore_fifo(const std::vector<Transition>& fifo) {
        if (fifo.size() > capacity_) throw InvalidInputError("replay: restore exceeds capacity");
        store_ = fifo;
        cursor_ = store_.size() < capacity_ ? store_.size() : 0;
    }

private:
    std::size_t capacity_;
    std::size_t cursor_ = 0;
    std::vector<Transition> store_;
};

} // namespace swarmwall
