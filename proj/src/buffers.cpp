#include "marl/buffers.hpp"

#include <algorithm>

namespace marl {

std::vector<std::vector<double>> observation_window(const SequenceWindow& seq,
                                                    int agent) {
  std::vector<std::vector<double>> out;
  const std::size_t L = seq.capacity();
  out.reserve(L);
  const std::size_t have = seq.size();
  for (std::size_t i = 0; i < L - have; ++i) {
    out.push_back(seq.at(0).obs[agent]);  // left-pad with oldest
  }
  for (std::size_t i = 0; i < have; ++i) out.push_back(seq.at(i).obs[agent]);
  return out;
}

std::vector<std::vector<double>> next_observation_window(
    const SequenceWindow& seq, int agent) {
  std::vector<std::vector<double>> out;
  const std::size_t L = seq.capacity();
  out.reserve(L);
  const std::size_t have = seq.size();
  for (std::size_t i = 0; i < L - have; ++i) {
    out.push_back(seq.at(0).next_obs[agent]);
  }
  for (std::size_t i = 0; i < have; ++i) {
    out.push_back(seq.at(i).next_obs[agent]);
  }
  return out;
}

Vec2 explore(const Vec2& action, Rng& rng, double epsilon, double noise_rate) {
  Vec2 out;
  if (rng.uniform() < epsilon) {
    out = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  } else {
    out = {action.x + noise_rate * rng.normal(),
           action.y + noise_rate * rng.normal()};
  }
  out.x = std::clamp(out.x, -1.0, 1.0);
  out.y = std::clamp(out.y, -1.0, 1.0);
  return out;
}

}  // namespace marl
