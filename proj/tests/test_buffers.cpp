#include <cmath>
#include <vector>

#include "doctest.h"
#include "marl/buffers.hpp"

using namespace marl;

namespace {

Transition mark(std::int64_t step, std::int64_t episode = 0) {
  Transition t;
  t.step_index = step;
  t.episode_index = episode;
  t.obs = {{static_cast<double>(step)}};
  t.next_obs = {{static_cast<double>(step) + 0.5}};
  return t;
}

}  // namespace

TEST_CASE("replay size never exceeds capacity over 1e5 pushes") {
  ReplayBuffer<int> buf(1000);
  for (int i = 0; i < 100'000; ++i) {
    buf.push(i);
    CHECK(buf.size() <= 1000);
  }
  CHECK(buf.size() == 1000);
  // oldest evicted first: survivors are exactly the newest 1000
  long long lo = 100'000, hi = -1;
  for (std::size_t i = 0; i < buf.size(); ++i) {
    lo = std::min<long long>(lo, buf.at(i));
    hi = std::max<long long>(hi, buf.at(i));
  }
  CHECK(lo == 99'000);
  CHECK(hi == 99'999);
}

TEST_CASE("sampling is nullopt until the buffer is ready") {
  ReplayBuffer<int> buf(100);
  Rng rng(1);
  for (int i = 0; i < 31; ++i) buf.push(i);
  CHECK_FALSE(buf.sample(32, rng).has_value());
  buf.push(31);
  auto s = buf.sample(32, rng);
  REQUIRE(s.has_value());
  CHECK(s->size() == 32);
}

TEST_CASE("sampling has no within-batch duplicates") {
  ReplayBuffer<int> buf(64);
  Rng rng(2);
  for (int i = 0; i < 64; ++i) buf.push(i);
  auto s = buf.sample(64, rng);
  REQUIRE(s.has_value());
  std::vector<int> got;
  for (const int* p : *s) got.push_back(*p);
  std::sort(got.begin(), got.end());
  for (int i = 0; i < 64; ++i) CHECK(got[i] == i);
}

TEST_CASE("single draws are uniform within 3 sigma") {
  ReplayBuffer<int> buf(10);
  for (int i = 0; i < 10; ++i) buf.push(i);
  Rng rng(3);
  const int draws = 100'000;
  std::vector<int> freq(10, 0);
  for (int d = 0; d < draws; ++d) {
    auto s = buf.sample(1, rng);
    ++freq[*(*s)[0]];
  }
  const double expect = draws / 10.0;
  const double sigma = std::sqrt(draws * 0.1 * 0.9);
  for (int f : freq) {
    CHECK(std::abs(f - expect) <= 3.0 * sigma);
  }
}

TEST_CASE("sequence window is a fixed-length FIFO") {
  SequenceWindow seq(3);
  CHECK(seq.empty());
  for (int s = 0; s < 5; ++s) seq.push(mark(s));
  CHECK(seq.size() == 3);
  CHECK(seq.at(0).step_index == 2);  // oldest surviving
  CHECK(seq.back().step_index == 4);
  seq.reset();
  CHECK(seq.empty());
}

TEST_CASE("windows left-pad by repeating the oldest observation") {
  SequenceWindow seq(4);
  seq.push(mark(10));
  seq.push(mark(11));
  auto win = observation_window(seq, 0);
  REQUIRE(win.size() == 4);
  CHECK(win[0][0] == 10.0);
  CHECK(win[1][0] == 10.0);
  CHECK(win[2][0] == 10.0);
  CHECK(win[3][0] == 11.0);
  auto nwin = next_observation_window(seq, 0);
  REQUIRE(nwin.size() == 4);
  CHECK(nwin[2][0] == 10.5);
  CHECK(nwin[3][0] == 11.5);
}

TEST_CASE("a reset purges pre-reset transitions from future windows") {
  SequenceWindow seq(5);
  for (int s = 0; s < 5; ++s) seq.push(mark(s, 0));
  seq.reset();
  seq.push(mark(0, 1));
  auto win = observation_window(seq, 0);
  for (const auto& o : win) CHECK(o[0] == 0.0);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    CHECK(seq.at(i).episode_index == 1);
  }
}

TEST_CASE("epsilon=1 exploration ignores the input action") {
  Rng a(77), b(77);
  Vec2 x = explore({0.9, -0.9}, a, 1.0, 0.1);
  Vec2 y = explore({-0.3, 0.2}, b, 1.0, 0.1);
  CHECK(x.x == y.x);
  CHECK(x.y == y.y);
  Rng rng(5);
  double mn = 1e9, mx = -1e9, sum = 0.0;
  const int draws = 20'000;
  for (int i = 0; i < draws; ++i) {
    Vec2 v = explore({0.0, 0.0}, rng, 1.0, 0.1);
    mn = std::min({mn, v.x, v.y});
    mx = std::max({mx, v.x, v.y});
    sum += v.x + v.y;
  }
  CHECK(mn >= -1.0);
  CHECK(mx <= 1.0);
  CHECK(mn < -0.98);
  CHECK(mx > 0.98);
  CHECK(std::abs(sum / (2 * draws)) < 0.02);
}

TEST_CASE("epsilon=0 exploration is a clamped gaussian around the action") {
  Rng rng(6);
  double max_dev = 0.0;
  for (int i = 0; i < 5'000; ++i) {
    Vec2 v = explore({0.5, -0.5}, rng, 0.0, 0.1);
    CHECK(v.x >= -1.0);
    CHECK(v.x <= 1.0);
    max_dev = std::max({max_dev, std::abs(v.x - 0.5), std::abs(v.y + 0.5)});
  }
  CHECK(max_dev < 0.6);   // ~5 sigma
  CHECK(max_dev > 0.05);  // noise actually applied
}
