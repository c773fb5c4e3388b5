#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "marl/rng.hpp"
#include "marl/vec2.hpp"

namespace marl {

// One stored interaction: (s, s', all observations, all actions, all rewards).
struct Transition {
  std::vector<double> state, next_state;
  std::vector<std::vector<double>> obs, next_obs;  // per policy
  std::vector<std::vector<double>> actions;        // per policy, length 2
  std::vector<double> rewards;                     // per policy
  bool terminal = false;
  std::int64_t step_index = 0;
  std::int64_t episode_index = 0;
};

// Fixed-length FIFO of time-contiguous transitions within one episode,
// oldest first. Stored whole into replay for the windowed LSTM variant.
class SequenceWindow {
 public:
  explicit SequenceWindow(std::size_t length = 1) : length_(length) {}

  void push(Transition t) {
    if (items_.size() == length_) items_.pop_front();
    items_.push_back(std::move(t));
  }
  void reset() { items_.clear(); }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return length_; }
  bool empty() const { return items_.empty(); }
  const Transition& at(std::size_t i) const { return items_[i]; }
  const Transition& back() const { return items_.back(); }

 private:
  std::size_t length_;
  std::deque<Transition> items_;
};

// Observations of one agent across the window, oldest first, left-padded by
// repeating the oldest stored observation when the window is short.
std::vector<std::vector<double>> observation_window(const SequenceWindow& seq,
                                                    int agent);
// Same, for the next-step observations (the window shifted one step forward).
std::vector<std::vector<double>> next_observation_window(
    const SequenceWindow& seq, int agent);

// Ring buffer over T in {Transition, SequenceWindow}; oldest evicted first.
template <class T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

  void push(T element) {
    if (data_.size() < capacity_) {
      data_.push_back(std::move(element));
    } else {
      data_[cursor_] = std::move(element);
    }
    cursor_ = (cursor_ + 1) % capacity_;
  }

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool ready(std::size_t batch) const { return data_.size() >= batch; }
  const T& at(std::size_t i) const { return data_[i]; }

  // Uniform without replacement within a batch; nullopt when not ready.
  std::optional<std::vector<const T*>> sample(std::size_t batch,
                                              Rng& rng) const {
    if (!ready(batch)) return std::nullopt;
    std::vector<std::size_t> idx(data_.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::vector<const T*> out;
    out.reserve(batch);
    for (std::size_t k = 0; k < batch; ++k) {  // partial Fisher-Yates
      const std::size_t j = k + rng.randint(idx.size() - k);
      std::swap(idx[k], idx[j]);
      out.push_back(&data_[idx[k]]);
    }
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<T> data_;
};

// Exploration wrapper: with probability epsilon replace with a uniform action
// in [-1,1]^2, otherwise add N(0, noise_rate^2) per component; clamp.
Vec2 explore(const Vec2& action, Rng& rng, double epsilon, double noise_rate);

}  // namespace marl
