#pragma once

#include <span>
#include <string>
#include <vector>

#include "marl/nn.hpp"

namespace marl {

enum class MixerKind { Vdn, Monotonic, Nonmonotonic };

MixerKind mixer_kind_from_string(const std::string& s);
std::string to_string(MixerKind k);

// Exact sum of local values (VDN).
double mixer_vdn(std::span<const double> local_qs);

// Hypernetwork mixer: a two-layer mixing net over the local q values whose
// weights are produced from the global state. Monotonic kind passes the
// hyper-produced weights through |.|, which makes dQtot/dq_a >= 0; the
// nonmonotonic kind keeps signed weights. Hidden activation is ELU.
// Vdn kind carries no parameters and mixes by exact summation.
struct MixerNet {
  MixerKind kind = MixerKind::Nonmonotonic;
  int n = 0;          // number of local q inputs
  int state_dim = 0;  // length of s
  int embed = 0;
  DenseLayer hyper_w1;  // state -> n*embed
  DenseLayer hyper_b1;  // state -> embed
  DenseLayer hyper_w2;  // state -> embed
  DenseLayer v1;        // state -> embed (ReLU), first stage of output bias
  DenseLayer v2;        // embed -> 1
};

MixerNet make_mixer(MixerKind kind, int n, int state_dim, int embed, Rng& rng);
MixerNet zeros_like(const MixerNet& m);

struct MixerCache {
  std::vector<double> s, q;
  std::vector<double> w1, b1, w2;  // post-|.| where applicable
  std::vector<double> w1_raw, w2_raw;
  std::vector<double> hid_pre, hid;  // mixing hidden layer
  std::vector<double> v1_pre, v1_post;
};

double mixer_forward(const MixerNet& net, std::span<const double> s,
                     std::span<const double> q, MixerCache* cache = nullptr);
// dq receives d(output)/d(local q) * dy; parameter gradients accumulate.
void mixer_backward(const MixerNet& net, const MixerCache& cache, double dy,
                    MixerNet& grads, std::span<double> dq);

void flatten(const MixerNet& m, std::vector<double>& out);
void unflatten(std::span<const double> flat, std::size_t& off, MixerNet& m);

}  // namespace marl
