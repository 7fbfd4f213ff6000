#include "ds1/stationary.hpp"

#include <cmath>
#include <sstream>

#include "ds1/fft.hpp"
#include "ds1/gmres.hpp"
#include "ds1/interpolation.hpp"
#include "ds1/log.hpp"
#include "ds1/singular_ops.hpp"

namespace ds1 {

void NewtonConfig::validate() const {
  if (!(residual_tol > 0.0) || !(gmres_rel_tol > 0.0) || !(resolution_tol > 0.0))
    throw std::invalid_argument("NewtonConfig: tolerances must be positive");
  if (max_newton_iters < 1 || gmres_max_iters < 1) throw std::invalid_argument("NewtonConfig: iteration caps must be >= 1");
  if (gmres_restart < 0 || max_halvings < 0) throw std::invalid_argument("NewtonConfig: negative restart or halvings");
}

namespace {

// Operators of one Newton step, sharing workspaces on a fixed grid.
class StationaryProblem {
 public:
  StationaryProblem(const SpectralGrid& g, double omega)
      : g_(g), omega_(omega), B_(g), half_(g.fft().half_size()), tmp_(g.size()), bq2_(g.size()) {}

  // out = F(Q); also leaves B(Q^2) in bq2_.
  void residual(std::span<const double> q, std::span<double> out) {
    for (std::size_t k = 0; k < q.size(); ++k) tmp_[k] = q[k] * q[k];
    B_.apply(tmp_, bq2_);
    linear(q, out);
    for (std::size_t k = 0; k < q.size(); ++k) out[k] += bq2_[k] * q[k];
  }

  // out = -omega v + 2 Laplacian v
  void linear(std::span<const double> v, std::span<double> out) {
    const auto& fft = g_.fft();
    fft.forward_real(v, half_);
    const auto kx = g_.k_xi();
    const auto ky = g_.k_eta();
    const std::size_t cols = fft.half_cols();
    for (std::size_t p = 0; p < g_.n_xi(); ++p)
      for (std::size_t c = 0; c < cols; ++c) half_[p * cols + c] *= -(omega_ + 2.0 * (kx[p] * kx[p] + ky[c] * ky[c]));
    fft.inverse_real(half_, out);
  }

  // out = P^{-1} v with P the symbol -(omega + 2 k^2) of the linear part, so
  // that P^{-1} applied to the linear part is the identity.
  void precondition(std::span<const double> v, std::span<double> out) {
    const auto& fft = g_.fft();
    fft.forward_real(v, half_);
    const auto kx = g_.k_xi();
    const auto ky = g_.k_eta();
    const std::size_t cols = fft.half_cols();
    for (std::size_t p = 0; p < g_.n_xi(); ++p)
      for (std::size_t c = 0; c < cols; ++c)
        half_[p * cols + c] /= -(omega_ + 2.0 * (kx[p] * kx[p] + ky[c] * ky[c]));
    fft.inverse_real(half_, out);
  }

  // out = B(Q^2) v + 2 B(Q v) Q, using the B(Q^2) of the last residual call.
  void nonlinear_jvp(std::span<const double> q, std::span<const double> v, std::span<double> out) {
    for (std::size_t k = 0; k < q.size(); ++k) tmp_[k] = q[k] * v[k];
    B_.apply(tmp_, out);
    for (std::size_t k = 0; k < q.size(); ++k) out[k] = bq2_[k] * v[k] + 2.0 * out[k] * q[k];
  }

  // out = P^{-1} DF[Q] v = v + P^{-1}(nonlinear part)
  void preconditioned_jvp(std::span<const double> q, std::span<const double> v, std::span<double> out) {
    nonlinear_jvp(q, v, work_span());
    precondition(work_span(), out);
    for (std::size_t k = 0; k < v.size(); ++k) out[k] += v[k];
  }

 private:
  std::span<double> work_span() {
    if (work_.size() != g_.size()) work_.resize(g_.size());
    return work_;
  }

  SpectralGrid g_;
  double omega_;
  NonlocalOperator B_;
  aligned_vector<cplx> half_;
  aligned_vector<double> tmp_, bq2_, work_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

RealField residual_F(const RealField& Q, double omega) {
  StationaryProblem p(Q.grid(), omega);
  RealField out(Q.grid());
  p.residual(Q.values(), out.values());
  return out;
}

RealField jacobian_vector_product(const RealField& Q, const RealField& v, double omega) {
  StationaryProblem p(Q.grid(), omega);
  RealField out(Q.grid());
  p.residual(Q.values(), out.values());  // primes B(Q^2)
  RealField lin(Q.grid());
  p.linear(v.values(), lin.values());
  p.nonlinear_jvp(Q.values(), v.values(), out.values());
  auto o = out.values();
  auto l = lin.values();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] += l[k];
  return out;
}

TailFit exponential_tail_fit(const RealField& Q, Axis axis, double lo, double hi) {
  const auto& g = Q.grid();
  const auto pts = g.points(axis);
  const std::size_t n = g.n(axis);
  const std::size_t o = g.origin_index(axis == Axis::xi ? Axis::eta : Axis::xi);
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < n; ++k) {
    const double v = std::abs(axis == Axis::xi ? Q(k, o) : Q(o, k));
    if (v >= lo && v <= hi && pts[k] != 0.0) {
      xs.push_back(std::abs(pts[k]));
      ys.push_back(std::log(v));
    }
  }
  TailFit fit;
  fit.points = xs.size();
  if (xs.size() < 3) return fit;
  const double m = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / m;
  double rr = 0, vv = 0;
  const double mean = sy / m;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double r = ys[k] - (fit.slope * xs[k] + fit.intercept);
    rr += r * r;
    vv += (ys[k] - mean) * (ys[k] - mean);
  }
  fit.rel_residual = vv > 0.0 ? std::sqrt(rr / vv) : 0.0;
  return fit;
}

double exchange_asymmetry(const RealField& Q) {
  const auto& g = Q.grid();
  if (g.n_xi() != g.n_eta() || g.l_xi() != g.l_eta()) throw std::invalid_argument("exchange_asymmetry: grid not square");
  double e = 0.0;
  for (std::size_t i = 0; i < g.n_xi(); ++i)
    for (std::size_t j = i + 1; j < g.n_eta(); ++j) e = std::max(e, std::abs(Q(i, j) - Q(j, i)));
  return e;
}

StationaryResult newton_solve(const RealField& Q0, double omega, const NewtonConfig& cfg) {
  cfg.validate();
  if (!(omega > 0.0)) throw std::invalid_argument("newton_solve: omega must be positive");
  const auto& g = Q0.grid();
  const std::size_t n = g.size();
  StationaryProblem prob(g, omega);

  StationaryResult res;
  RealField q = Q0;
  aligned_vector<double> F(n), rhs(n), delta(n), trial(n), Ftrial(n);

  const auto check_resolution = [&](const RealField& f, int it) {
    const double tail = spectral_tail_ratio(forward(to_complex(f)));
    if (tail > cfg.resolution_tol)
      throw LostResolution("newton_solve: iterate " + std::to_string(it) + " lost resolution (tail ratio " + fmt(tail) +
                           ")");
  };

  const auto polish = [&](int budget) {
    prob.residual(q.values(), F);
    double r = max_abs(std::span<const double>(F));
    const double r0 = res.residual_history.empty() ? r : res.residual_history.front();
    for (int it = 0; it < budget; ++it) {
      res.residual_history.push_back(r);
      info("newton " + std::to_string(res.gmres_iterations.size()) + ": max|F| = " + fmt(r));
      if (r < cfg.residual_tol) return true;
      if (r > 1e3 * r0) throw Divergence("newton_solve: residual grew from " + fmt(r0) + " to " + fmt(r));
      check_resolution(q, it);

      // Solve DF delta = F via P^{-1} DF delta = P^{-1} F.
      prob.precondition(F, rhs);
      std::fill(delta.begin(), delta.end(), 0.0);
      const auto qv = q.values();
      const GmresResult gr = gmres([&](std::span<const double> in, std::span<double> out) { prob.preconditioned_jvp(qv, in, out); },
                                   rhs, delta, GmresOptions{cfg.gmres_rel_tol, cfg.gmres_max_iters, cfg.gmres_restart});
      res.gmres_iterations.push_back(gr.iterations);

      double lambda = 1.0, rt = 0.0;
      for (int h = 0;; ++h) {
        for (std::size_t k = 0; k < n; ++k) trial[k] = qv[k] - lambda * delta[k];
        prob.residual(trial, Ftrial);
        rt = max_abs(std::span<const double>(Ftrial));
        if (rt <= r || h >= cfg.max_halvings) break;
        lambda *= 0.5;
      }
      info("  gmres " + std::to_string(gr.iterations) + " its, rel " + fmt(gr.rel_residual) + ", step " + fmt(lambda));
      if (rt > r) {
        res.residual_history.push_back(r);
        throw NonConvergence("newton_solve: no decrease along the Newton direction at max|F| = " + fmt(r));
      }
      std::copy(trial.begin(), trial.end(), q.values().begin());
      std::swap(F, Ftrial);
      r = rt;
    }
    res.residual_history.push_back(r);
    return r < cfg.residual_tol;
  };

  bool ok = polish(cfg.max_newton_iters);
  if (!ok)
    throw NonConvergence("newton_solve: max|F| = " + fmt(res.final_residual()) + " after " +
                         std::to_string(cfg.max_newton_iters) + " Newton steps");

  if (cfg.center) {
    // Whole grid cells only. A fractional spectral shift is exact for Q but
    // not for the discrete equation (the product |Q|^2 Q aliases), and it
    // raised max|F| from 4e-13 to 6e-11 on 2^10, which Newton cannot undo
    // because of the near-null translation modes.
    const Extremum m = locate_maximum(q);
    const auto cells = [&](double x, Axis a) {
      const auto nn = static_cast<long>(g.n(a));
      return ((static_cast<long>(std::lround(x / g.h(a))) % nn) + nn) % nn;
    };
    const long sx = cells(m.x, Axis::xi), sy = cells(m.y, Axis::eta);
    res.shift_xi = std::round(m.x / g.h(Axis::xi)) * g.h(Axis::xi);
    res.shift_eta = std::round(m.y / g.h(Axis::eta)) * g.h(Axis::eta);
    RealField rolled(g);
    for (std::size_t i = 0; i < g.n_xi(); ++i)
      for (std::size_t j = 0; j < g.n_eta(); ++j)
        rolled(i, j) = q((i + sx) % g.n_xi(), (j + sy) % g.n_eta());
    q = std::move(rolled);
    res.residual_history.pop_back();
    if (!polish(cfg.max_newton_iters))
      throw NonConvergence("newton_solve: residual after centering " + fmt(res.final_residual()));
  }

  res.Q = std::move(q);
  res.mass = quadrature_abs2(to_complex(res.Q));
  return res;
}

}  // namespace ds1
