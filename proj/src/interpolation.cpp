#include "ds1/interpolation.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ds1/fft.hpp"
#include "ds1/parallel.hpp"

namespace ds1 {

namespace {

constexpr cplx I{0.0, 1.0};

std::vector<cplx> phases(std::span<const double> k, double x) {
  std::vector<cplx> e(k.size());
  for (std::size_t p = 0; p < k.size(); ++p) e[p] = std::polar(1.0, k[p] * x);
  return e;
}

// Vertex of the parabola through (-1, a), (0, b), (1, c).
double parabola_offset(double a, double b, double c) {
  const double den = a - 2.0 * b + c;
  if (den == 0.0) return 0.0;
  const double off = 0.5 * (a - c) / den;
  return std::clamp(off, -1.0, 1.0);
}

}  // namespace

TrigInterpolant::TrigInterpolant(const RealField& f) : grid_(f.grid()), coeffs_(f.grid().size()) {
  ComplexField spec = forward(to_complex(f));
  const double s = 1.0 / (grid_.period_xi() * grid_.period_eta());
  auto v = spec.values();
  for (std::size_t i = 0; i < v.size(); ++i) coeffs_[i] = v[i] * s;
}

double TrigInterpolant::operator()(double x, double y) const { return derivatives(x, y).f; }

TrigInterpolant::Derivatives TrigInterpolant::derivatives(double x, double y) const {
  const auto kx = grid_.k_xi();
  const auto ky = grid_.k_eta();
  const auto ex = phases(kx, x);
  const auto ey = phases(ky, y);
  const std::size_t ny = grid_.n_eta();
  cplx f{}, fx{}, fy{}, fxx{}, fxy{}, fyy{};
  for (std::size_t p = 0; p < grid_.n_xi(); ++p) {
    cplx r0{}, r1{}, r2{};
    const cplx* row = coeffs_.data() + p * ny;
    for (std::size_t q = 0; q < ny; ++q) {
      const cplx t = row[q] * ey[q];
      r0 += t;
      r1 += t * ky[q];
      r2 += t * (ky[q] * ky[q]);
    }
    const cplx e = ex[p];
    f += e * r0;
    fx += e * r0 * kx[p];
    fy += e * r1;
    fxx += e * r0 * (kx[p] * kx[p]);
    fxy += e * r1 * kx[p];
    fyy += e * r2;
  }
  return Derivatives{f.real(),          (I * fx).real(),  (I * fy).real(),
                     (-fxx).real(),     (-fxy).real(),    (-fyy).real()};
}

std::vector<double> TrigInterpolant::on_tensor(std::span<const double> xs, std::span<const double> ys,
                                               bool zero_outside) const {
  const auto kx = grid_.k_xi();
  const auto ky = grid_.k_eta();
  const std::size_t nx = grid_.n_xi(), ny = grid_.n_eta();
  const double xmax = std::numbers::pi * grid_.l_xi();
  const double ymax = std::numbers::pi * grid_.l_eta();

  // A(p, j) = sum_q c(p, q) exp(i k_q y_j)
  std::vector<cplx> ey(ny * ys.size());
  for (std::size_t j = 0; j < ys.size(); ++j)
    for (std::size_t q = 0; q < ny; ++q) ey[j * ny + q] = std::polar(1.0, ky[q] * ys[j]);
  std::vector<cplx> a(nx * ys.size());
  exec::parallel_for(exec::parallel, nx, [&](std::size_t p) {
    const cplx* row = coeffs_.data() + p * ny;
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const cplx* e = ey.data() + j * ny;
      cplx acc{};
      for (std::size_t q = 0; q < ny; ++q) acc += row[q] * e[q];
      a[p * ys.size() + j] = acc;
    }
  });

  std::vector<double> out(xs.size() * ys.size(), 0.0);
  exec::parallel_for(exec::parallel, xs.size(), [&](std::size_t i) {
    if (zero_outside && std::abs(xs[i]) > xmax) return;
    const auto ex = phases(kx, xs[i]);
    for (std::size_t j = 0; j < ys.size(); ++j) {
      if (zero_outside && std::abs(ys[j]) > ymax) continue;
      cplx acc{};
      for (std::size_t p = 0; p < nx; ++p) acc += ex[p] * a[p * ys.size() + j];
      out[i * ys.size() + j] = acc.real();
    }
  });
  return out;
}

Extremum locate_maximum(const RealField& f, int newton_steps) {
  const auto& g = f.grid();
  const std::size_t nx = g.n_xi(), ny = g.n_eta();
  auto v = f.values();
  std::size_t best = 0;
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] > v[best]) best = k;
  const std::size_t i0 = best / ny, j0 = best % ny;
  const auto at = [&](std::size_t i, std::size_t j) { return f((i + nx) % nx, (j + ny) % ny); };
  const double ox = parabola_offset(at(i0 - 1, j0), at(i0, j0), at(i0 + 1, j0));
  const double oy = parabola_offset(at(i0, j0 - 1), at(i0, j0), at(i0, j0 + 1));
  Extremum e{g.xi_points()[i0] + ox * g.h_xi(), g.eta_points()[j0] + oy * g.h_eta(), v[best]};
  if (newton_steps <= 0) return e;

  const TrigInterpolant interp(f);
  for (int it = 0; it < newton_steps; ++it) {
    const auto d = interp.derivatives(e.x, e.y);
    const double det = d.fxx * d.fyy - d.fxy * d.fxy;
    if (!(det > 0.0) || !(d.fxx < 0.0)) break;  // not at a nondegenerate maximum
    const double sx = (d.fyy * d.fx - d.fxy * d.fy) / det;
    const double sy = (d.fxx * d.fy - d.fxy * d.fx) / det;
    if (std::abs(sx) > g.h_xi() || std::abs(sy) > g.h_eta()) break;
    e.x -= sx;
    e.y -= sy;
    if (std::abs(sx) < 1e-15 * g.l_xi() && std::abs(sy) < 1e-15 * g.l_eta()) break;
  }
  e.value = interp(e.x, e.y);
  return e;
}

Extremum locate_maximum_abs(const ComplexField& f) {
  assert(f.is_physical());
  const auto& g = f.grid();
  const std::size_t nx = g.n_xi(), ny = g.n_eta();
  auto v = f.values();
  std::size_t best = 0;
  double bv = -1.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double a = std::abs(v[k]);
    if (a > bv) {
      bv = a;
      best = k;
    }
  }
  const std::size_t i0 = best / ny, j0 = best % ny;
  const auto at = [&](std::size_t i, std::size_t j) { return std::abs(f((i + nx) % nx, (j + ny) % ny)); };
  const double ox = parabola_offset(at(i0 - 1, j0), at(i0, j0), at(i0 + 1, j0));
  const double oy = parabola_offset(at(i0, j0 - 1), at(i0, j0), at(i0, j0 + 1));
  return Extremum{g.xi_points()[i0] + ox * g.h_xi(), g.eta_points()[j0] + oy * g.h_eta(), bv};
}

RealField translate(const RealField& f, double dx, double dy) {
  const auto& g = f.grid();
  const auto& fft = g.fft();
  aligned_vector<cplx> half(fft.half_size());
  fft.forward_real(f.values(), half);
  const auto ex = phases(g.k_xi_odd(), dx);
  const auto ey = phases(g.k_eta_odd(), dy);
  const std::size_t cols = fft.half_cols();
  for (std::size_t p = 0; p < g.n_xi(); ++p)
    for (std::size_t q = 0; q < cols; ++q) {
      cplx& c = half[p * cols + q];
      if (p == g.n_xi() / 2 || q == g.n_eta() / 2)
        c = 0.0;
      else
        c *= ex[p] * ey[q];
    }
  RealField out(g);
  fft.inverse_real(half, out.values());
  return out;
}

RealField resample(const RealField& f, const SpectralGrid& target) {
  const auto& g = f.grid();
  if (g.l_xi() != target.l_xi() || g.l_eta() != target.l_eta())
    throw std::invalid_argument("resample: grids must share the half-period scales");
  ComplexField src = forward(to_complex(f));
  ComplexField dst(target, Representation::fourier);
  const auto map = [](std::size_t idx, std::size_t n_from, std::size_t n_to) -> long long {
    const long long m = idx < n_from / 2 ? static_cast<long long>(idx)
                                         : static_cast<long long>(idx) - static_cast<long long>(n_from);
    if (m == -static_cast<long long>(n_from / 2)) return -1;  // drop the source Nyquist
    // Truncation also drops the target Nyquist, whose conjugate partner is lost.
    if (m >= static_cast<long long>(n_to / 2) || m <= -static_cast<long long>(n_to / 2)) return -1;
    return m >= 0 ? m : m + static_cast<long long>(n_to);
  };
  for (std::size_t p = 0; p < g.n_xi(); ++p) {
    const long long tp = map(p, g.n_xi(), target.n_xi());
    if (tp < 0) continue;
    for (std::size_t q = 0; q < g.n_eta(); ++q) {
      const long long tq = map(q, g.n_eta(), target.n_eta());
      if (tq < 0) continue;
      dst(static_cast<std::size_t>(tp), static_cast<std::size_t>(tq)) = src(p, q);
    }
  }
  dst.to_physical();
  return to_real(dst, 1e-10);
}

}  // namespace ds1
