#include "ds1/singular_ops.hpp"

#include <cassert>
#include <cmath>
#include <sstream>

#include "ds1/fft.hpp"
#include "ds1/log.hpp"
#include "ds1/parallel.hpp"

namespace ds1 {

namespace {

constexpr cplx I{0.0, 1.0};

bool is_nyquist(std::size_t idx, std::size_t n) { return idx == n / 2; }

void warn_if_unresolved(const ComplexField& coeffs, const char* op) {
  const double r = spectral_tail_ratio(coeffs);
  if (!(r <= 1e-13)) {
    std::ostringstream os;
    os << op << ": input not resolved (spectral tail ratio " << r << "); result inherits the unresolved tail";
    warn(os.str());
  }
}

ComplexField physical_copy(const ComplexField& f) { return f.is_physical() ? f : inverse(f); }

// Line integral S and first moment M of f along `axis`, as functions of the
// other coordinate: S = int f d(axis), M = int x f d(axis).
template <class T>
void line_moments(const SpectralGrid& g, std::span<const T> f, Axis axis, std::vector<T>& s, std::vector<T>& m,
                  exec::Policy policy = exec::default_policy) {
  const std::size_t nx = g.n_xi(), ny = g.n_eta();
  const auto xs = g.xi_points();
  const auto ys = g.eta_points();
  if (axis == Axis::xi) {
    s.assign(ny, T{});
    m.assign(ny, T{});
    const double h = g.h_xi();
    constexpr std::size_t chunk = 64;
    const std::size_t nchunks = (ny + chunk - 1) / chunk;
    exec::parallel_for(policy, nchunks, [&](std::size_t c) {
      const std::size_t j0 = c * chunk, j1 = std::min(ny, j0 + chunk);
      for (std::size_t i = 0; i < nx; ++i) {
        const T* row = f.data() + i * ny;
        const double x = xs[i];
        for (std::size_t j = j0; j < j1; ++j) {
          s[j] += row[j];
          m[j] += x * row[j];
        }
      }
      for (std::size_t j = j0; j < j1; ++j) {
        s[j] *= h;
        m[j] *= h;
      }
    });
  } else {
    s.assign(nx, T{});
    m.assign(nx, T{});
    const double h = g.h_eta();
    exec::parallel_for(policy, nx, [&](std::size_t i) {
      const T* row = f.data() + i * ny;
      T acc_s{}, acc_m{};
      for (std::size_t j = 0; j < ny; ++j) {
        acc_s += row[j];
        acc_m += ys[j] * row[j];
      }
      s[i] = acc_s * h;
      m[i] = acc_m * h;
    });
  }
}

// Transform of a line function along the axis that indexes it.
template <class T>
aligned_vector<cplx> line_forward(const SpectralGrid& g, Axis along, const std::vector<T>& v) {
  aligned_vector<cplx> out(v.begin(), v.end());
  g.fft().forward_line(along, out);
  return out;
}

Axis other(Axis a) { return a == Axis::xi ? Axis::eta : Axis::xi; }

// Regularized quotient for the antiderivative along `axis`, written into
// `spec` (full or half spectrum with `cols` columns). `zero_line` holds
// f^(0) along the other axis, `mom` the transformed first moment.
void regularized_quotient(const SpectralGrid& g, Axis axis, std::span<cplx> spec, std::size_t cols,
                          std::span<const cplx> zero_line, std::span<const cplx> mom) {
  const std::size_t nx = g.n_xi();
  const auto kx = g.k_xi();
  const auto ky = g.k_eta();
  const auto gx = g.gauss_symbol(Axis::xi);
  const auto gy = g.gauss_symbol(Axis::eta);
  exec::parallel_for(exec::parallel, nx, [&](std::size_t p) {
    cplx* row = spec.data() + p * cols;
    if (axis == Axis::xi) {
      if (p == 0) {
        for (std::size_t q = 0; q < cols; ++q) row[q] = -mom[q];
      } else if (is_nyquist(p, nx)) {
        for (std::size_t q = 0; q < cols; ++q) row[q] = 0.0;
      } else {
        const cplx inv = 1.0 / (I * kx[p]);
        for (std::size_t q = 0; q < cols; ++q) row[q] = (row[q] - zero_line[q] * gx[p]) * inv;
      }
    } else {
      const std::size_t ny = g.n_eta();
      for (std::size_t q = 0; q < cols; ++q) {
        if (q == 0)
          row[q] = -mom[p];
        else if (is_nyquist(q, ny))
          row[q] = 0.0;
        else
          row[q] = (row[q] - zero_line[p] * gy[q]) / (I * ky[q]);
      }
    }
  });
}

}  // namespace

ComplexField derivative(const ComplexField& f, Axis axis) {
  ComplexField spec = f.is_fourier() ? f : forward(f);
  const auto& g = spec.grid();
  const auto k = g.k_odd(axis);
  const std::size_t ny = g.n_eta();
  auto v = spec.values();
  exec::parallel_for(exec::parallel, g.n_xi(), [&](std::size_t p) {
    for (std::size_t q = 0; q < ny; ++q) v[p * ny + q] *= I * (axis == Axis::xi ? k[p] : k[q]);
  });
  spec.to_physical();
  return spec;
}

RealField derivative(const RealField& f, Axis axis) {
  const auto& g = f.grid();
  const auto& fft = g.fft();
  aligned_vector<cplx> half(fft.half_size());
  fft.forward_real(f.values(), half);
  const auto k = g.k_odd(axis);
  const std::size_t cols = fft.half_cols();
  exec::parallel_for(exec::parallel, g.n_xi(), [&](std::size_t p) {
    for (std::size_t q = 0; q < cols; ++q) half[p * cols + q] *= I * (axis == Axis::xi ? k[p] : k[q]);
  });
  RealField out(g);
  fft.inverse_real(half, out.values());
  return out;
}

ComplexField antiderivative(const ComplexField& f, Axis axis) {
  const ComplexField phys = physical_copy(f);
  ComplexField spec = forward(phys);
  warn_if_unresolved(spec, "antiderivative");
  const auto& g = spec.grid();

  std::vector<cplx> s, m;
  line_moments<cplx>(g, phys.values(), axis, s, m);
  const Axis across = other(axis);
  const aligned_vector<cplx> mom = line_forward(g, across, m);
  const aligned_vector<cplx> zero_line = line_forward(g, across, s);

  regularized_quotient(g, axis, spec.values(), g.n_eta(), zero_line, mom);
  spec.to_physical();

  const auto e = g.erf_points(axis);
  const std::size_t ny = g.n_eta();
  auto v = spec.values();
  exec::parallel_for(exec::parallel, g.n_xi(), [&](std::size_t i) {
    for (std::size_t j = 0; j < ny; ++j)
      v[i * ny + j] += axis == Axis::xi ? 0.5 * e[i] * s[j] : 0.5 * e[j] * s[i];
  });
  return spec;
}

RealField antiderivative(const RealField& f, Axis axis) {
  const auto& g = f.grid();
  const auto& fft = g.fft();
  warn_if_unresolved(forward(to_complex(f)), "antiderivative");

  std::vector<double> s, m;
  line_moments<double>(g, f.values(), axis, s, m);
  const Axis across = other(axis);
  const aligned_vector<cplx> mom = line_forward(g, across, m);

  aligned_vector<cplx> half(fft.half_size());
  fft.forward_real(f.values(), half);
  const std::size_t cols = fft.half_cols();
  aligned_vector<cplx> zero_line;
  if (axis == Axis::xi) {
    zero_line.assign(half.begin(), half.begin() + static_cast<std::ptrdiff_t>(cols));
  } else {
    zero_line.resize(g.n_xi());
    for (std::size_t p = 0; p < g.n_xi(); ++p) zero_line[p] = half[p * cols];
  }
  regularized_quotient(g, axis, half, cols, zero_line, mom);

  RealField out(g);
  fft.inverse_real(half, out.values());
  const auto e = g.erf_points(axis);
  const std::size_t ny = g.n_eta();
  auto v = out.values();
  exec::parallel_for(exec::parallel, g.n_xi(), [&](std::size_t i) {
    for (std::size_t j = 0; j < ny; ++j) v[i * ny + j] += axis == Axis::xi ? 0.5 * e[i] * s[j] : 0.5 * e[j] * s[i];
  });
  return out;
}

std::vector<double> antiderivative_line(std::span<const double> f, double l) {
  // A line is a field that is constant along eta; 8 columns is the smallest grid.
  const SpectralGrid g = make_grid(f.size(), 8, l, 1.0);
  RealField field(g);
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = 0; j < 8; ++j) field(i, j) = f[i];
  const RealField a = antiderivative(field, Axis::xi);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = a(i, 0);
  return out;
}

RealField laplacian(const RealField& f) {
  const auto& g = f.grid();
  const auto& fft = g.fft();
  aligned_vector<cplx> half(fft.half_size());
  fft.forward_real(f.values(), half);
  const auto kx = g.k_xi();
  const auto ky = g.k_eta();
  const std::size_t cols = fft.half_cols();
  exec::parallel_for(exec::parallel, g.n_xi(), [&](std::size_t p) {
    for (std::size_t q = 0; q < cols; ++q) half[p * cols + q] *= -(kx[p] * kx[p] + ky[q] * ky[q]);
  });
  RealField out(g);
  fft.inverse_real(half, out.values());
  return out;
}

std::vector<double> erf_eval(std::span<const double> x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::erf(x[i]);
  return out;
}

RealField apply_B(const RealField& f) {
  NonlocalOperator op(f.grid());
  return op.apply(f);
}

NonlocalOperator::NonlocalOperator(SpectralGrid grid, exec::Policy policy)
    : grid_(std::move(grid)),
      policy_(policy),
      half_(grid_.fft().half_size()),
      row0_(grid_.fft().half_cols()),
      col0_(grid_.n_xi()),
      mom_eta_(grid_.n_eta()),
      mom_xi_(grid_.n_xi()),
      int_eta_(grid_.n_eta()),
      int_xi_(grid_.n_xi()) {}

RealField NonlocalOperator::apply(const RealField& f) {
  assert(f.grid() == grid_);
  RealField out(grid_);
  apply(f.values(), out.values());
  return out;
}

void NonlocalOperator::apply(std::span<const double> f, std::span<double> out) {
  const auto& g = grid_;
  const auto& fft = g.fft();
  const std::size_t nx = g.n_xi(), ny = g.n_eta(), cols = fft.half_cols();

  line_moments<double>(g, f, Axis::xi, s_eta_, m_eta_, policy_);  // functions of eta
  line_moments<double>(g, f, Axis::eta, s_xi_, m_xi_, policy_);   // functions of xi
  for (std::size_t j = 0; j < ny; ++j) {
    mom_eta_[j] = m_eta_[j];
    int_eta_[j] = s_eta_[j];
  }
  for (std::size_t i = 0; i < nx; ++i) {
    mom_xi_[i] = m_xi_[i];
    int_xi_[i] = s_xi_[i];
  }
  fft.forward_line(Axis::eta, mom_eta_);
  fft.forward_line(Axis::xi, mom_xi_);

  // d_eta int f dxi and d_xi int f deta, the amplitudes of the erf terms.
  const auto kxo = g.k_xi_odd();
  const auto kyo = g.k_eta_odd();
  fft.forward_line(Axis::eta, int_eta_);
  for (std::size_t j = 0; j < ny; ++j) int_eta_[j] *= I * kyo[j];
  fft.inverse_line(Axis::eta, int_eta_);
  fft.forward_line(Axis::xi, int_xi_);
  for (std::size_t i = 0; i < nx; ++i) int_xi_[i] *= I * kxo[i];
  fft.inverse_line(Axis::xi, int_xi_);

  fft.forward_real(f, half_);
  for (std::size_t q = 0; q < cols; ++q) row0_[q] = half_[q];
  for (std::size_t p = 0; p < nx; ++p) col0_[p] = half_[p * cols];

  const auto kx = g.k_xi();
  const auto ky = g.k_eta();
  const auto gx = g.gauss_symbol(Axis::xi);
  const auto gy = g.gauss_symbol(Axis::eta);
  exec::parallel_for(policy_, nx, [&](std::size_t p) {
    cplx* row = half_.data() + p * cols;
    if (is_nyquist(p, nx)) {
      for (std::size_t q = 0; q < cols; ++q) row[q] = 0.0;
      return;
    }
    for (std::size_t q = 0; q < cols; ++q) {
      if (is_nyquist(q, ny)) {
        row[q] = 0.0;
        continue;
      }
      const cplx fpq = row[q];
      // d_xi^{-1} d_eta: symbol k_eta / k_xi on the Gaussian-regularized part.
      const cplx q1 = p == 0 ? -I * ky[q] * mom_eta_[q] : (ky[q] / kx[p]) * (fpq - row0_[q] * gx[p]);
      // d_eta^{-1} d_xi
      const cplx q2 = q == 0 ? -I * kx[p] * mom_xi_[p] : (kx[p] / ky[q]) * (fpq - col0_[p] * gy[q]);
      row[q] = q1 + q2;
    }
  });
  fft.inverse_real(half_, out);

  const auto ex = g.erf_points(Axis::xi);
  const auto ey = g.erf_points(Axis::eta);
  exec::parallel_for(policy_, nx, [&](std::size_t i) {
    double* row = out.data() + i * ny;
    const double ax = 0.5 * ex[i];
    const double bx = 0.5 * int_xi_[i].real();
    for (std::size_t j = 0; j < ny; ++j) row[j] += ax * int_eta_[j].real() + ey[j] * bx;
  });
}

namespace reference {

RealField apply_B(const RealField& f) {
  const ComplexField c = to_complex(f);
  const ComplexField a = antiderivative(derivative(c, Axis::eta), Axis::xi);
  const ComplexField b = antiderivative(derivative(c, Axis::xi), Axis::eta);
  ComplexField sum = a;
  auto v = sum.values();
  auto w = b.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += w[i];
  return to_real(sum, 1e-12);
}

}  // namespace reference

}  // namespace ds1
