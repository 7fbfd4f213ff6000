#pragma once

// Matrix-free GMRES (modified Gram-Schmidt, Givens rotations) on real
// vectors. The operator passed in is applied as-is, so left preconditioning
// is the caller's business: pass M^{-1} A and M^{-1} b.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ds1/grid.hpp"

namespace ds1 {

struct GmresOptions {
  double rel_tol = 1e-8;
  int max_iters = 200;
  int restart = 0;  // 0: no restart
};

struct GmresResult {
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

using LinearOperator = std::function<void(std::span<const double> in, std::span<double> out)>;

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

/// Solves A x = b starting from the x passed in.
inline GmresResult gmres(const LinearOperator& A, std::span<const double> b, std::span<double> x,
                         const GmresOptions& opt) {
  const std::size_t n = b.size();
  const double bnorm = std::sqrt(detail::dot(b, b));
  GmresResult res;
  if (bnorm == 0.0) {
    for (double& v : x) v = 0.0;
    res.converged = true;
    return res;
  }
  const int m = opt.restart > 0 ? opt.restart : opt.max_iters;
  std::vector<aligned_vector<double>> V;
  std::vector<std::vector<double>> H;  // H[j] is column j, length j + 2
  std::vector<double> cs, sn, g;
  aligned_vector<double> w(n);

  while (res.iterations < opt.max_iters) {
    // r = b - A x
    A(x, w);
    V.clear();
    V.emplace_back(n);
    for (std::size_t i = 0; i < n; ++i) V[0][i] = b[i] - w[i];
    const double beta = std::sqrt(detail::dot(V[0], V[0]));
    res.rel_residual = beta / bnorm;
    if (res.rel_residual <= opt.rel_tol) {
      res.converged = true;
      return res;
    }
    for (double& v : V[0]) v /= beta;
    H.clear();
    cs.clear();
    sn.clear();
    g.assign(1, beta);

    int j = 0;
    for (; j < m && res.iterations < opt.max_iters; ++j) {
      A(V[j], w);
      ++res.iterations;
      std::vector<double> h(j + 2, 0.0);
      for (int i = 0; i <= j; ++i) {
        h[i] = detail::dot(w, V[i]);
        const double hi = h[i];
        const double* vi = V[i].data();
        for (std::size_t k = 0; k < n; ++k) w[k] -= hi * vi[k];
      }
      h[j + 1] = std::sqrt(detail::dot(w, w));
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * h[i] + sn[i] * h[i + 1];
        h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
        h[i] = t;
      }
      const double r = std::hypot(h[j], h[j + 1]);
      const double c = r == 0.0 ? 1.0 : h[j] / r;
      const double s = r == 0.0 ? 0.0 : h[j + 1] / r;
      const double hj1 = h[j + 1];
      cs.push_back(c);
      sn.push_back(s);
      h[j] = r;
      h[j + 1] = 0.0;
      g.push_back(-s * g[j]);
      g[j] *= c;
      H.push_back(std::move(h));
      res.rel_residual = std::abs(g[j + 1]) / bnorm;
      if (res.rel_residual <= opt.rel_tol || hj1 == 0.0) {
        ++j;
        break;
      }
      V.emplace_back(n);
      for (std::size_t k = 0; k < n; ++k) V[j + 1][k] = w[k] / hj1;
    }

    // Back substitution for the k = j coefficients, then x += V y.
    std::vector<double> y(j);
    for (int i = j - 1; i >= 0; --i) {
      double t = g[i];
      for (int k = i + 1; k < j; ++k) t -= H[k][i] * y[k];
      y[i] = t / H[i][i];
    }
    for (int i = 0; i < j; ++i) {
      const double yi = y[i];
      const double* vi = V[i].data();
      for (std::size_t k = 0; k < n; ++k) x[k] += yi * vi[k];
    }
    if (res.rel_residual <= opt.rel_tol) {
      res.converged = true;
      return res;
    }
  }
  return res;
}

}  // namespace ds1
