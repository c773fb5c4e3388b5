#include "marl/nn.hpp"

#include <cmath>

namespace marl {

namespace {

DenseLayer make_dense(int out, int in, Rng& rng) {
  DenseLayer l;
  l.W = Matrix(out, in);
  l.b.assign(out, 0.0);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  for (double& w : l.W.a) w = rng.uniform(-bound, bound);
  for (double& b : l.b) b = rng.uniform(-bound, bound);
  return l;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y(B x out) = x * W^T + b
Matrix affine(const DenseLayer& l, const Matrix& x) {
  Matrix y;
  gemm_nt(x, l.W, y);
  for (int i = 0; i < y.rows; ++i) {
    double* yi = y.row(i);
    for (int k = 0; k < y.cols; ++k) yi[k] += l.b[k];
  }
  return y;
}

void affine_backward(const DenseLayer& l, const Matrix& x, const Matrix& dy,
                     DenseLayer& grads, Matrix& dx) {
  gemm_tn_acc(dy, x, grads.W);
  for (int i = 0; i < dy.rows; ++i) {
    const double* di = dy.row(i);
    for (int k = 0; k < dy.cols; ++k) grads.b[k] += di[k];
  }
  gemm_nn(dy, l.W, dx);
}

}  // namespace

Mlp make_mlp(std::vector<int> widths, Act out_act, Rng& rng) {
  if (widths.size() < 2) throw ShapeError("make_mlp: need >= 1 layer");
  Mlp m;
  m.widths = std::move(widths);
  m.out_act = out_act;
  for (std::size_t i = 0; i + 1 < m.widths.size(); ++i) {
    m.layers.push_back(make_dense(m.widths[i + 1], m.widths[i], rng));
  }
  return m;
}

Mlp zeros_like(const Mlp& m) {
  Mlp z = m;
  for (auto& l : z.layers) {
    l.W.zero();
    std::fill(l.b.begin(), l.b.end(), 0.0);
  }
  return z;
}

Matrix mlp_forward(const Mlp& net, const Matrix& x, MlpCache* cache) {
  if (x.cols != net.in_dim()) throw ShapeError("mlp_forward: input dim");
  if (cache) {
    cache->input = x;
    cache->pre.clear();
    cache->post.clear();
  }
  Matrix cur = x;
  const std::size_t L = net.layers.size();
  for (std::size_t li = 0; li < L; ++li) {
    Matrix pre = affine(net.layers[li], cur);
    if (cache) cache->pre.push_back(pre);
    const bool last = li + 1 == L;
    if (!last) {
      for (double& v : pre.a) v = v > 0.0 ? v : 0.0;  // ReLU
    } else if (net.out_act == Act::Tanh) {
      for (double& v : pre.a) v = std::tanh(v);
    }
    if (cache) cache->post.push_back(pre);
    cur = std::move(pre);
  }
  return cur;
}

Matrix mlp_backward(const Mlp& net, const MlpCache& cache, const Matrix& dout,
                    Mlp& grads) {
  const std::size_t L = net.layers.size();
  Matrix d = dout;
  for (std::size_t li = L; li-- > 0;) {
    const bool last = li + 1 == L;
    const Matrix& pre = cache.pre[li];
    const Matrix& post = cache.post[li];
    if (!last) {
      for (std::size_t k = 0; k < d.a.size(); ++k) {
        d.a[k] = pre.a[k] > 0.0 ? d.a[k] : 0.0;
      }
    } else if (net.out_act == Act::Tanh) {
      for (std::size_t k = 0; k < d.a.size(); ++k) {
        d.a[k] *= 1.0 - post.a[k] * post.a[k];
      }
    }
    const Matrix& input = li == 0 ? cache.input : cache.post[li - 1];
    Matrix dx;
    affine_backward(net.layers[li], input, d, grads.layers[li], dx);
    d = std::move(dx);
  }
  return d;
}

LstmState lstm_step(const LstmCell& cell, std::span<const double> x,
                    const LstmState& state, LstmStepCache* cache) {
  const int H = cell.hidden;
  if (static_cast<int>(x.size()) != cell.in ||
      static_cast<int>(state.h.size()) != H) {
    throw ShapeError("lstm_step: shape mismatch");
  }
  std::vector<double> z(cell.b);
  for (int g = 0; g < 4 * H; ++g) {
    const double* wx = cell.Wx.row(g);
    double acc = 0.0;
    for (int k = 0; k < cell.in; ++k) acc += wx[k] * x[k];
    const double* wh = cell.Wh.row(g);
    for (int k = 0; k < H; ++k) acc += wh[k] * state.h[k];
    z[g] += acc;
  }
  LstmState out;
  out.h.resize(H);
  out.c.resize(H);
  std::vector<double> gi(H), gf(H), gg(H), go(H);
  for (int k = 0; k < H; ++k) {
    gi[k] = sigmoid(z[k]);
    gf[k] = sigmoid(z[H + k]);
    gg[k] = std::tanh(z[2 * H + k]);
    go[k] = sigmoid(z[3 * H + k]);
    out.c[k] = gf[k] * state.c[k] + gi[k] * gg[k];
    out.h[k] = go[k] * std::tanh(out.c[k]);
  }
  if (cache) {
    cache->x.assign(x.begin(), x.end());
    cache->h_prev = state.h;
    cache->c_prev = state.c;
    cache->i = gi;
    cache->f = gf;
    cache->g = gg;
    cache->o = go;
    cache->c_new = out.c;
  }
  return out;
}

void lstm_step_backward(const LstmCell& cell, const LstmStepCache& cache,
                        const std::vector<double>& dh,
                        const std::vector<double>& dc, LstmCell& grads,
                        std::vector<double>& dx, std::vector<double>& dh_prev,
                        std::vector<double>& dc_prev) {
  const int H = cell.hidden;
  std::vector<double> dz(4 * H);
  dc_prev.assign(H, 0.0);
  for (int k = 0; k < H; ++k) {
    const double tc = std::tanh(cache.c_new[k]);
    const double dct = dc[k] + dh[k] * cache.o[k] * (1.0 - tc * tc);
    const double d_o = dh[k] * tc;
    const double d_i = dct * cache.g[k];
    const double d_f = dct * cache.c_prev[k];
    const double d_g = dct * cache.i[k];
    dc_prev[k] = dct * cache.f[k];
    dz[k] = d_i * cache.i[k] * (1.0 - cache.i[k]);
    dz[H + k] = d_f * cache.f[k] * (1.0 - cache.f[k]);
    dz[2 * H + k] = d_g * (1.0 - cache.g[k] * cache.g[k]);
    dz[3 * H + k] = d_o * cache.o[k] * (1.0 - cache.o[k]);
  }
  dx.assign(cell.in, 0.0);
  dh_prev.assign(H, 0.0);
  for (int g = 0; g < 4 * H; ++g) {
    const double dzg = dz[g];
    if (dzg == 0.0) continue;
    double* gwx = grads.Wx.row(g);
    const double* wx = cell.Wx.row(g);
    for (int k = 0; k < cell.in; ++k) {
      gwx[k] += dzg * cache.x[k];
      dx[k] += dzg * wx[k];
    }
    double* gwh = grads.Wh.row(g);
    const double* wh = cell.Wh.row(g);
    for (int k = 0; k < H; ++k) {
      gwh[k] += dzg * cache.h_prev[k];
      dh_prev[k] += dzg * wh[k];
    }
    grads.b[g] += dzg;
  }
}

LstmActor make_lstm_actor(int in, int hidden, int fc, int out, Rng& rng) {
  LstmActor a;
  a.cell.in = in;
  a.cell.hidden = hidden;
  const double bound = 1.0 / std::sqrt(static_cast<double>(in + hidden));
  a.cell.Wx = Matrix(4 * hidden, in);
  a.cell.Wh = Matrix(4 * hidden, hidden);
  a.cell.b.assign(4 * hidden, 0.0);
  for (double& w : a.cell.Wx.a) w = rng.uniform(-bound, bound);
  for (double& w : a.cell.Wh.a) w = rng.uniform(-bound, bound);
  for (int k = 0; k < hidden; ++k) a.cell.b[hidden + k] = 1.0;  // forget bias
  a.fc = make_dense(fc, hidden, rng);
  a.head = make_dense(out, fc, rng);
  return a;
}

LstmActor zeros_like(const LstmActor& a) {
  LstmActor z = a;
  z.cell.Wx.zero();
  z.cell.Wh.zero();
  std::fill(z.cell.b.begin(), z.cell.b.end(), 0.0);
  z.fc.W.zero();
  std::fill(z.fc.b.begin(), z.fc.b.end(), 0.0);
  z.head.W.zero();
  std::fill(z.head.b.begin(), z.head.b.end(), 0.0);
  return z;
}

std::vector<double> lstm_actor_forward(
    const LstmActor& actor, const std::vector<std::vector<double>>& window,
    LstmActorCache* cache) {
  if (window.empty()) throw ShapeError("lstm_actor_forward: empty window");
  LstmState state;
  state.h.assign(actor.cell.hidden, 0.0);
  state.c.assign(actor.cell.hidden, 0.0);
  if (cache) cache->steps.assign(window.size(), {});
  for (std::size_t t = 0; t < window.size(); ++t) {
    state = lstm_step(actor.cell, window[t], state,
                      cache ? &cache->steps[t] : nullptr);
  }
  const int F = static_cast<int>(actor.fc.b.size());
  const int O = static_cast<int>(actor.head.b.size());
  std::vector<double> fc_pre(F), fc_post(F), out(O);
  for (int k = 0; k < F; ++k) {
    const double* w = actor.fc.W.row(k);
    double acc = actor.fc.b[k];
    for (int j = 0; j < actor.cell.hidden; ++j) acc += w[j] * state.h[j];
    fc_pre[k] = acc;
    fc_post[k] = acc > 0.0 ? acc : 0.0;
  }
  for (int k = 0; k < O; ++k) {
    const double* w = actor.head.W.row(k);
    double acc = actor.head.b[k];
    for (int j = 0; j < F; ++j) acc += w[j] * fc_post[j];
    out[k] = std::tanh(acc);
  }
  if (cache) {
    cache->fc_pre = fc_pre;
    cache->fc_post = fc_post;
    cache->out = out;
  }
  return out;
}

void lstm_actor_backward(const LstmActor& actor, const LstmActorCache& cache,
                         const std::vector<double>& dout, LstmActor& grads) {
  const int H = actor.cell.hidden;
  const int F = static_cast<int>(actor.fc.b.size());
  const int O = static_cast<int>(actor.head.b.size());
  // tanh head
  std::vector<double> dhead(O);
  for (int k = 0; k < O; ++k) {
    dhead[k] = dout[k] * (1.0 - cache.out[k] * cache.out[k]);
  }
  std::vector<double> dfc(F, 0.0);
  for (int k = 0; k < O; ++k) {
    double* gw = grads.head.W.row(k);
    const double* w = actor.head.W.row(k);
    for (int j = 0; j < F; ++j) {
      gw[j] += dhead[k] * cache.fc_post[j];
      dfc[j] += dhead[k] * w[j];
    }
    grads.head.b[k] += dhead[k];
  }
  // ReLU fc; final hidden is recomputed from the last step cache
  std::vector<double> dh(H, 0.0);
  for (int k = 0; k < F; ++k) {
    const double d = cache.fc_pre[k] > 0.0 ? dfc[k] : 0.0;
    double* gw = grads.fc.W.row(k);
    const double* w = actor.fc.W.row(k);
    const LstmStepCache& last = cache.steps.back();
    for (int j = 0; j < H; ++j) {
      const double tc = std::tanh(last.c_new[j]);
      const double hj = last.o[j] * tc;
      gw[j] += d * hj;
      dh[j] += d * w[j];
    }
    grads.fc.b[k] += d;
  }
  // BPTT
  std::vector<double> dc(H, 0.0), dx, dh_prev, dc_prev;
  for (std::size_t t = cache.steps.size(); t-- > 0;) {
    lstm_step_backward(actor.cell, cache.steps[t], dh, dc, grads.cell, dx,
                       dh_prev, dc_prev);
    dh = dh_prev;
    dc = dc_prev;
  }
}

void flatten(const DenseLayer& l, std::vector<double>& out) {
  out.insert(out.end(), l.W.a.begin(), l.W.a.end());
  out.insert(out.end(), l.b.begin(), l.b.end());
}

void unflatten(std::span<const double> flat, std::size_t& off, DenseLayer& l) {
  for (double& w : l.W.a) w = flat[off++];
  for (double& b : l.b) b = flat[off++];
}

void flatten(const Mlp& m, std::vector<double>& out) {
  for (const auto& l : m.layers) flatten(l, out);
}

void unflatten(std::span<const double> flat, std::size_t& off, Mlp& m) {
  for (auto& l : m.layers) unflatten(flat, off, l);
}

void flatten(const LstmActor& a, std::vector<double>& out) {
  out.insert(out.end(), a.cell.Wx.a.begin(), a.cell.Wx.a.end());
  out.insert(out.end(), a.cell.Wh.a.begin(), a.cell.Wh.a.end());
  out.insert(out.end(), a.cell.b.begin(), a.cell.b.end());
  flatten(a.fc, out);
  flatten(a.head, out);
}

void unflatten(std::span<const double> flat, std::size_t& off, LstmActor& a) {
  for (double& w : a.cell.Wx.a) w = flat[off++];
  for (double& w : a.cell.Wh.a) w = flat[off++];
  for (double& b : a.cell.b) b = flat[off++];
  unflatten(flat, off, a.fc);
  unflatten(flat, off, a.head);
}

void adam_step(std::vector<double>& params, const std::vector<double>& grads,
               AdamState& state, double lr) {
  if (params.size() != grads.size()) throw ShapeError("adam_step: sizes");
  for (double g : grads) {
    if (!std::isfinite(g)) throw NumericError("adam_step: non-finite gradient");
  }
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
    state.v[i] =
        state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

}  // namespace marl
