#include "ds1/reference.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ds1/interpolation.hpp"
#include "ds1/log.hpp"
#include "ds1/snapshot.hpp"

namespace ds1 {

double dromion_radiating(double xi, double eta) {
  return 1.0 / (4.0 * std::cosh(0.5 * xi) * std::cosh(0.5 * eta) + std::exp(0.5 * (xi + eta)));
}

RealField dromion_radiating(const SpectralGrid& grid) {
  RealField q = sample(grid, [](double x, double y) { return dromion_radiating(x, y); });
  const double b = boundary_ratio(q);
  if (b > 1e-14) {
    std::ostringstream os;
    os << "dromion_radiating: boundary value " << b << " of the maximum exceeds 1e-14 on l = " << grid.l_xi();
    warn(os.str());
  }
  return q;
}

double dromion2_squared(double xi, double eta) {
  const double d = 4.0 * std::cosh(xi) * std::cosh(eta) + std::exp(xi + eta);
  return 4.0 / (d * d);
}

RealField dromion2_squared(const SpectralGrid& grid) {
  return sample(grid, [](double x, double y) { return dromion2_squared(x, y); });
}

namespace {

// One of the two symmetric halves of B |Q~_2|^2. Written in U = e^{2 xi},
// V = e^{2 eta}; for large arguments it is evaluated with the reciprocal
// variables so nothing overflows.
double b_term(double xi, double eta) {
  if (xi > 0.0 || eta > 0.0) {
    // Same rational function in u = 1/U, v = 1/V, numerator and denominator
    // multiplied through by u^2 v^4.
    const double u = std::exp(-2.0 * xi), v = std::exp(-2.0 * eta);
    const double dd = 2.0 + v + u + u * v;
    const double first = 4.0 * ((1.0 + u) * v * v - (2.0 + u)) * v / ((1.0 + v) * (1.0 + v) * dd * dd);
    const double second = 2.0 * v * (v * v - 2.0) / ((1.0 + v) * (1.0 + v) * (2.0 + v) * (2.0 + v));
    return first - second;
  }
  const double U = std::exp(2.0 * xi), V = std::exp(2.0 * eta);
  const double D = 2.0 * U * V + U + V + 1.0;
  const double first = 4.0 * U * V * ((U + 1.0) - V * V * (2.0 * U + 1.0)) / ((V + 1.0) * (V + 1.0) * D * D);
  const double second = 2.0 * V * (1.0 - 2.0 * V * V) / ((V + 1.0) * (V + 1.0) * (2.0 * V + 1.0) * (2.0 * V + 1.0));
  return first - second;
}

}  // namespace

double dromion2_B_exact(double xi, double eta) { return b_term(xi, eta) + b_term(eta, xi); }

RealField dromion2_B_exact(const SpectralGrid& grid) {
  return sample(grid, [](double x, double y) { return dromion2_B_exact(x, y); });
}

double radiating_shift_f(double x) {
  const double e = std::exp(x);
  if (std::isinf(e)) return 0.0;
  return 4.0 / (4.0 * (1.0 + e)) + 1.0 / (4.0 * (1.0 + 2.0 * e));
}

std::vector<double> radiating_shift_f(std::span<const double> x) {
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [](double v) { return radiating_shift_f(v); });
  return out;
}

RealField gaussian(const SpectralGrid& grid, double kappa) {
  return sample(grid, [kappa](double x, double y) { return kappa * std::exp(-x * x - y * y); });
}

double boundary_ratio(const RealField& f) {
  const auto& g = f.grid();
  const std::size_t nx = g.n_xi(), ny = g.n_eta();
  double edge = 0.0;
  for (std::size_t i = 0; i < nx; ++i) edge = std::max({edge, std::abs(f(i, 0)), std::abs(f(i, ny - 1))});
  for (std::size_t j = 0; j < ny; ++j) edge = std::max({edge, std::abs(f(0, j)), std::abs(f(nx - 1, j))});
  const double m = max_abs(f.values());
  return m > 0.0 ? edge / m : 0.0;
}

RealField omega_rescale(const RealField& q, double omega) {
  if (!(omega > 0.0)) throw std::invalid_argument("omega_rescale: omega must be positive");
  if (omega == 1.0) return q;
  const auto& g = q.grid();
  const double s = std::sqrt(omega);
  std::vector<double> xs(g.n_xi()), ys(g.n_eta());
  std::transform(g.xi_points().begin(), g.xi_points().end(), xs.begin(), [s](double x) { return s * x; });
  std::transform(g.eta_points().begin(), g.eta_points().end(), ys.begin(), [s](double y) { return s * y; });
  const TrigInterpolant interp(q);
  const auto vals = interp.on_tensor(xs, ys, true);
  RealField out(g);
  auto o = out.values();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] = s * vals[k];
  const double before = boundary_ratio(q);
  const double after = boundary_ratio(out);
  if (after > std::max(1e-10, 10.0 * before)) {
    std::ostringstream os;
    os << "omega_rescale: rescaled field is not decayed at the boundary (ratio " << after << ")";
    throw std::domain_error(os.str());
  }
  return out;
}

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::scaled_dromion_radiating: return "scaled_dromion_radiating";
    case InitialKind::mu_times_Q: return "mu_times_Q";
    case InitialKind::Q_minus_gaussian: return "Q_minus_gaussian";
    case InitialKind::gaussian: return "gaussian";
    case InitialKind::from_file: return "from_file";
  }
  return "unknown";
}

InitialKind initial_kind_from_string(const std::string& s) {
  for (auto k : {InitialKind::scaled_dromion_radiating, InitialKind::mu_times_Q, InitialKind::Q_minus_gaussian,
                 InitialKind::gaussian, InitialKind::from_file})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown initial data kind: " + s);
}

ComplexField build_initial_data(const InitialDataSpec& spec, const SpectralGrid& grid, const RealField* q) {
  const auto need_q = [&]() -> const RealField& {
    if (q == nullptr) throw std::invalid_argument("initial data '" + to_string(spec.kind) + "' needs Q");
    if (!q->grid().same_geometry(grid)) throw std::invalid_argument("Q does not live on the run grid");
    return *q;
  };
  const auto positive = [&] {
    if (!(spec.amplitude > 0.0)) throw std::invalid_argument("initial data amplitude must be positive");
  };

  RealField f;
  switch (spec.kind) {
    case InitialKind::scaled_dromion_radiating: {
      positive();
      f = dromion_radiating(grid);
      for (double& v : f.values()) v *= spec.amplitude;
      break;
    }
    case InitialKind::mu_times_Q: {
      positive();
      f = need_q();
      for (double& v : f.values()) v *= spec.amplitude;
      break;
    }
    case InitialKind::Q_minus_gaussian: {
      positive();
      f = need_q();
      const RealField gs = gaussian(grid, spec.amplitude);
      auto fv = f.values();
      auto gv = gs.values();
      for (std::size_t k = 0; k < fv.size(); ++k) fv[k] -= gv[k];
      break;
    }
    case InitialKind::gaussian: {
      positive();
      f = gaussian(grid, spec.amplitude);
      break;
    }
    case InitialKind::from_file: {
      if (!spec.file_path) throw std::invalid_argument("from_file initial data needs a file path");
      Snapshot s = read_snapshot(*spec.file_path, grid);
      if (s.field.is_fourier()) s.field.to_physical();
      return s.field;
    }
  }
  return to_complex(f);
}

}  // namespace ds1
