#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace marl {

// Dense row-major matrix of doubles. Small by design; the triple loops below
// are the hot path of every update, keep them simple so the compiler
// vectorizes them.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

  double& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
  double* row(int r) { return a.data() + static_cast<size_t>(r) * cols; }
  const double* row(int r) const {
    return a.data() + static_cast<size_t>(r) * cols;
  }
  void zero() { std::fill(a.begin(), a.end(), 0.0); }
};

// out(BxM) = x(BxK) * w(MxK)^T
inline void gemm_nt(const Matrix& x, const Matrix& w, Matrix& out) {
  assert(x.cols == w.cols);
  out.rows = x.rows;
  out.cols = w.rows;
  out.a.assign(static_cast<size_t>(out.rows) * out.cols, 0.0);
  for (int i = 0; i < x.rows; ++i) {
    const double* xi = x.row(i);
    double* oi = out.row(i);
    for (int m = 0; m < w.rows; ++m) {
      const double* wm = w.row(m);
      double acc = 0.0;
      for (int k = 0; k < x.cols; ++k) acc += xi[k] * wm[k];
      oi[m] = acc;
    }
  }
}

// out(BxK) = g(BxM) * w(MxK)
inline void gemm_nn(const Matrix& g, const Matrix& w, Matrix& out) {
  assert(g.cols == w.rows);
  out.rows = g.rows;
  out.cols = w.cols;
  out.a.assign(static_cast<size_t>(out.rows) * out.cols, 0.0);
  for (int i = 0; i < g.rows; ++i) {
    const double* gi = g.row(i);
    double* oi = out.row(i);
    for (int m = 0; m < g.cols; ++m) {
      const double gim = gi[m];
      if (gim == 0.0) continue;
      const double* wm = w.row(m);
      for (int k = 0; k < w.cols; ++k) oi[k] += gim * wm[k];
    }
  }
}

// acc(MxK) += g(BxM)^T * x(BxK)
inline void gemm_tn_acc(const Matrix& g, const Matrix& x, Matrix& acc) {
  assert(g.rows == x.rows);
  assert(acc.rows == g.cols && acc.cols == x.cols);
  for (int i = 0; i < g.rows; ++i) {
    const double* gi = g.row(i);
    const double* xi = x.row(i);
    for (int m = 0; m < g.cols; ++m) {
      const double gim = gi[m];
      if (gim == 0.0) continue;
      double* am = acc.row(m);
      for (int k = 0; k < x.cols; ++k) am[k] += gim * xi[k];
    }
  }
}

inline Matrix hconcat(const Matrix& a, const Matrix& b) {
  assert(a.rows == b.rows);
  Matrix out(a.rows, a.cols + b.cols);
  for (int i = 0; i < a.rows; ++i) {
    double* oi = out.row(i);
    const double* ai = a.row(i);
    const double* bi = b.row(i);
    for (int k = 0; k < a.cols; ++k) oi[k] = ai[k];
    for (int k = 0; k < b.cols; ++k) oi[a.cols + k] = bi[k];
  }
  return out;
}

}  // namespace marl
