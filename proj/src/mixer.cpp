#include "marl/mixer.hpp"

#include <cmath>
#include <numeric>

namespace marl {

namespace {

std::vector<double> hyper_eval(const DenseLayer& l,
                               std::span<const double> s) {
  std::vector<double> out(l.b);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double* w = l.W.row(static_cast<int>(k));
    double acc = out[k];
    for (std::size_t j = 0; j < s.size(); ++j) acc += w[j] * s[j];
    out[k] = acc;
  }
  return out;
}

void hyper_backward(const DenseLayer& l, std::span<const double> s,
                    std::span<const double> dout, DenseLayer& grads) {
  for (std::size_t k = 0; k < dout.size(); ++k) {
    if (dout[k] == 0.0) continue;
    double* gw = grads.W.row(static_cast<int>(k));
    for (std::size_t j = 0; j < s.size(); ++j) gw[j] += dout[k] * s[j];
    grads.b[k] += dout[k];
  }
  (void)l;
}

inline double elu(double x) { return x > 0.0 ? x : std::expm1(x); }
inline double elu_grad(double x) { return x > 0.0 ? 1.0 : std::exp(x); }

DenseLayer dense(int out, int in, Rng& rng) {
  DenseLayer l;
  l.W = Matrix(out, in);
  l.b.assign(out, 0.0);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  for (double& w : l.W.a) w = rng.uniform(-bound, bound);
  for (double& b : l.b) b = rng.uniform(-bound, bound);
  return l;
}

void zero(DenseLayer& l) {
  l.W.zero();
  std::fill(l.b.begin(), l.b.end(), 0.0);
}

}  // namespace

MixerKind mixer_kind_from_string(const std::string& s) {
  if (s == "vdn") return MixerKind::Vdn;
  if (s == "monotonic") return MixerKind::Monotonic;
  if (s == "nonmonotonic") return MixerKind::Nonmonotonic;
  throw ShapeError("unknown mixer kind: " + s);
}

std::string to_string(MixerKind k) {
  switch (k) {
    case MixerKind::Vdn: return "vdn";
    case MixerKind::Monotonic: return "monotonic";
    case MixerKind::Nonmonotonic: return "nonmonotonic";
  }
  return "?";
}

double mixer_vdn(std::span<const double> local_qs) {
  if (local_qs.empty()) throw ShapeError("mixer_vdn: empty input");
  return std::accumulate(local_qs.begin(), local_qs.end(), 0.0);
}

MixerNet make_mixer(MixerKind kind, int n, int state_dim, int embed, Rng& rng) {
  MixerNet m;
  m.kind = kind;
  m.n = n;
  m.state_dim = state_dim;
  m.embed = kind == MixerKind::Vdn ? 0 : embed;
  if (kind != MixerKind::Vdn) {
    m.hyper_w1 = dense(n * embed, state_dim, rng);
    m.hyper_b1 = dense(embed, state_dim, rng);
    m.hyper_w2 = dense(embed, state_dim, rng);
    m.v1 = dense(embed, state_dim, rng);
    m.v2 = dense(1, embed, rng);
  }
  return m;
}

MixerNet zeros_like(const MixerNet& m) {
  MixerNet z = m;
  if (z.kind != MixerKind::Vdn) {
    zero(z.hyper_w1);
    zero(z.hyper_b1);
    zero(z.hyper_w2);
    zero(z.v1);
    zero(z.v2);
  }
  return z;
}

double mixer_forward(const MixerNet& net, std::span<const double> s,
                     std::span<const double> q, MixerCache* cache) {
  if (static_cast<int>(q.size()) != net.n) {
    throw ShapeError("mixer_forward: q size");
  }
  if (net.kind == MixerKind::Vdn) {
    if (cache) {
      cache->q.assign(q.begin(), q.end());
    }
    return mixer_vdn(q);
  }
  if (static_cast<int>(s.size()) != net.state_dim) {
    throw ShapeError("mixer_forward: state size");
  }
  const int E = net.embed;
  std::vector<double> w1_raw = hyper_eval(net.hyper_w1, s);
  std::vector<double> b1 = hyper_eval(net.hyper_b1, s);
  std::vector<double> w2_raw = hyper_eval(net.hyper_w2, s);
  std::vector<double> v1_pre = hyper_eval(net.v1, s);
  std::vector<double> v1_post(E);
  for (int k = 0; k < E; ++k) v1_post[k] = v1_pre[k] > 0.0 ? v1_pre[k] : 0.0;
  double bias = net.v2.b[0];
  for (int k = 0; k < E; ++k) bias += net.v2.W.at(0, k) * v1_post[k];

  const bool mono = net.kind == MixerKind::Monotonic;
  std::vector<double> w1(w1_raw), w2(w2_raw);
  if (mono) {
    for (double& v : w1) v = std::abs(v);
    for (double& v : w2) v = std::abs(v);
  }
  std::vector<double> hid_pre(E), hid(E);
  for (int k = 0; k < E; ++k) {
    double acc = b1[k];
    for (int a = 0; a < net.n; ++a) acc += q[a] * w1[a * E + k];
    hid_pre[k] = acc;
    hid[k] = elu(acc);
  }
  double y = bias;
  for (int k = 0; k < E; ++k) y += hid[k] * w2[k];
  if (cache) {
    cache->s.assign(s.begin(), s.end());
    cache->q.assign(q.begin(), q.end());
    cache->w1 = w1;
    cache->b1 = b1;
    cache->w2 = w2;
    cache->w1_raw = w1_raw;
    cache->w2_raw = w2_raw;
    cache->hid_pre = hid_pre;
    cache->hid = hid;
    cache->v1_pre = v1_pre;
    cache->v1_post = v1_post;
  }
  return y;
}

void mixer_backward(const MixerNet& net, const MixerCache& cache, double dy,
                    MixerNet& grads, std::span<double> dq) {
  if (net.kind == MixerKind::Vdn) {
    for (int a = 0; a < net.n; ++a) dq[a] = dy * 1.0;
    return;
  }
  const int E = net.embed;
  const bool mono = net.kind == MixerKind::Monotonic;
  // output layer: y = sum_k hid_k * w2_k + bias(s)
  std::vector<double> dw2(E), dhid(E);
  for (int k = 0; k < E; ++k) {
    dw2[k] = dy * cache.hid[k];
    dhid[k] = dy * cache.w2[k];
  }
  // bias hypernet (two layers)
  grads.v2.b[0] += dy;
  std::vector<double> dv1_post(E);
  for (int k = 0; k < E; ++k) {
    grads.v2.W.at(0, k) += dy * cache.v1_post[k];
    dv1_post[k] = dy * net.v2.W.at(0, k);
  }
  std::vector<double> dv1_pre(E);
  for (int k = 0; k < E; ++k) {
    dv1_pre[k] = cache.v1_pre[k] > 0.0 ? dv1_post[k] : 0.0;
  }
  hyper_backward(net.v1, cache.s, dv1_pre, grads.v1);
  // hidden layer
  std::vector<double> dpre(E), db1(E);
  std::vector<double> dw1(net.n * E, 0.0);
  for (int a = 0; a < net.n; ++a) dq[a] = 0.0;
  for (int k = 0; k < E; ++k) {
    dpre[k] = dhid[k] * elu_grad(cache.hid_pre[k]);
    db1[k] = dpre[k];
    for (int a = 0; a < net.n; ++a) {
      dw1[a * E + k] = dpre[k] * cache.q[a];
      dq[a] += dpre[k] * cache.w1[a * E + k];
    }
  }
  // unwrap |.|: subgradient 0 at exactly 0
  auto sign = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
  if (mono) {
    for (int j = 0; j < net.n * E; ++j) dw1[j] *= sign(cache.w1_raw[j]);
    for (int k = 0; k < E; ++k) dw2[k] *= sign(cache.w2_raw[k]);
  }
  hyper_backward(net.hyper_w1, cache.s, dw1, grads.hyper_w1);
  hyper_backward(net.hyper_b1, cache.s, db1, grads.hyper_b1);
  hyper_backward(net.hyper_w2, cache.s, dw2, grads.hyper_w2);
}

void flatten(const MixerNet& m, std::vector<double>& out) {
  if (m.kind == MixerKind::Vdn) return;
  flatten(m.hyper_w1, out);
  flatten(m.hyper_b1, out);
  flatten(m.hyper_w2, out);
  flatten(m.v1, out);
  flatten(m.v2, out);
}

void unflatten(std::span<const double> flat, std::size_t& off, MixerNet& m) {
  if (m.kind == MixerKind::Vdn) return;
  unflatten(flat, off, m.hyper_w1);
  unflatten(flat, off, m.hyper_b1);
  unflatten(flat, off, m.hyper_w2);
  unflatten(flat, off, m.v1);
  unflatten(flat, off, m.v2);
}

}  // namespace marl
