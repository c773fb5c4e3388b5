#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "marl/matrix.hpp"
#include "marl/rng.hpp"

namespace marl {

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DenseLayer {
  Matrix W;               // out x in
  std::vector<double> b;  // out
};

enum class Act { Identity, Tanh };

// ReLU-hidden MLP, 64-bit throughout. Gradient structs reuse the same type
// (zeros_like), so flatten/Adam/soft-update code is shared.
struct Mlp {
  std::vector<int> widths;  // in, hidden..., out
  Act out_act = Act::Identity;
  std::vector<DenseLayer> layers;

  int in_dim() const { return widths.front(); }
  int out_dim() const { return widths.back(); }
};

Mlp make_mlp(std::vector<int> widths, Act out_act, Rng& rng);
Mlp zeros_like(const Mlp& m);

struct MlpCache {
  Matrix input;
  std::vector<Matrix> pre;   // pre-activation per layer
  std::vector<Matrix> post;  // post-activation per layer
};

Matrix mlp_forward(const Mlp& net, const Matrix& x, MlpCache* cache = nullptr);
// Returns d(input); accumulates parameter gradients into `grads`.
Matrix mlp_backward(const Mlp& net, const MlpCache& cache, const Matrix& dout,
                    Mlp& grads);

// ---- LSTM ----

struct LstmCell {
  int in = 0;
  int hidden = 0;
  Matrix Wx;              // 4H x in, gate order i,f,g,o
  Matrix Wh;              // 4H x H
  std::vector<double> b;  // 4H
};

struct LstmState {
  std::vector<double> h, c;
};

struct LstmStepCache {
  std::vector<double> x, h_prev, c_prev;
  std::vector<double> i, f, g, o, c_new;
};

LstmState lstm_step(const LstmCell& cell, std::span<const double> x,
                    const LstmState& state, LstmStepCache* cache = nullptr);
// dh/dc are gradients w.r.t. the step outputs; returns gradients w.r.t. the
// step inputs through the out-params, accumulates into `grads`.
void lstm_step_backward(const LstmCell& cell, const LstmStepCache& cache,
                        const std::vector<double>& dh,
                        const std::vector<double>& dc, LstmCell& grads,
                        std::vector<double>& dx, std::vector<double>& dh_prev,
                        std::vector<double>& dc_prev);

// Windowed recurrent actor: LSTM over the observation window from a zero
// state, final hidden through one ReLU layer and a tanh head.
struct LstmActor {
  LstmCell cell;
  DenseLayer fc;    // hidden -> fc width, ReLU
  DenseLayer head;  // fc width -> act dim, tanh
};

LstmActor make_lstm_actor(int in, int hidden, int fc, int out, Rng& rng);
LstmActor zeros_like(const LstmActor& a);

struct LstmActorCache {
  std::vector<LstmStepCache> steps;
  std::vector<double> fc_pre, fc_post, out;
};

// window: oldest-first observations, each of length cell.in. Empty windows
// are a ShapeError.
std::vector<double> lstm_actor_forward(
    const LstmActor& actor, const std::vector<std::vector<double>>& window,
    LstmActorCache* cache = nullptr);
void lstm_actor_backward(const LstmActor& actor, const LstmActorCache& cache,
                         const std::vector<double>& dout, LstmActor& grads);

// ---- flattening, Adam, target blending ----

void flatten(const DenseLayer& l, std::vector<double>& out);
void unflatten(std::span<const double> flat, std::size_t& off, DenseLayer& l);
void flatten(const Mlp& m, std::vector<double>& out);
void unflatten(std::span<const double> flat, std::size_t& off, Mlp& m);
void flatten(const LstmActor& a, std::vector<double>& out);
void unflatten(std::span<const double> flat, std::size_t& off, LstmActor& a);

template <class Net>
std::vector<double> to_flat(const Net& net) {
  std::vector<double> v;
  flatten(net, v);
  return v;
}

template <class Net>
void from_flat(std::span<const double> flat, Net& net) {
  std::size_t off = 0;
  unflatten(flat, off, net);
  if (off != flat.size()) throw ShapeError("from_flat: size mismatch");
}

struct AdamState {
  std::vector<double> m, v;
  long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam, descent direction. Rejects non-finite gradients.
void adam_step(std::vector<double>& params, const std::vector<double>& grads,
               AdamState& state, double lr);

template <class Net>
void adam_update(Net& net, const Net& grads, AdamState& state, double lr) {
  auto p = to_flat(net);
  auto g = to_flat(grads);
  adam_step(p, g, state, lr);
  from_flat(std::span<const double>(p), net);
}

// target <- (1 - tau) * target + tau * online
template <class Net>
void soft_update(Net& target, const Net& online, double tau) {
  auto t = to_flat(target);
  auto o = to_flat(online);
  if (t.size() != o.size()) throw ShapeError("soft_update: shape mismatch");
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = (1.0 - tau) * t[i] + tau * o[i];
  }
  from_flat(std::span<const double>(t), target);
}

}  // namespace marl
