#include "ds1/grid.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ds1/fft.hpp"
#include "ds1/parallel.hpp"

namespace ds1 {

namespace detail {

struct GridData {
  std::size_t n_xi;
  std::size_t n_eta;
  double l_xi;
  double l_eta;
  std::vector<double> xi, eta;
  std::vector<double> k_xi, k_eta;
  std::vector<double> k_xi_odd, k_eta_odd;
  std::vector<double> erf_xi, erf_eta;
  std::vector<double> gauss_xi, gauss_eta;
  std::unique_ptr<FftEngine> fft;
};

}  // namespace detail

namespace {

void fill_axis(std::size_t n, double l, std::vector<double>& pts, std::vector<double>& k,
               std::vector<double>& k_odd, std::vector<double>& erfs, std::vector<double>& gauss) {
  pts.resize(n);
  k.resize(n);
  k_odd.resize(n);
  erfs.resize(n);
  gauss.resize(n);
  const double pi = std::numbers::pi;
  const auto nn = static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    pts[j] = l * (-pi + 2.0 * pi * static_cast<double>(j) / nn);
    const auto m = static_cast<double>(j < n / 2 ? static_cast<long long>(j)
                                                 : static_cast<long long>(j) - static_cast<long long>(n));
    k[j] = m / l;
    k_odd[j] = j == n / 2 ? 0.0 : k[j];
    erfs[j] = std::erf(pts[j]);
    gauss[j] = std::exp(-k[j] * k[j] / 4.0);
  }
}

}  // namespace

SpectralGrid make_grid(std::size_t n_xi, std::size_t n_eta, double l_xi, double l_eta) {
  auto check_n = [](std::size_t n, const char* name) {
    if (n < 8 || !std::has_single_bit(n)) {
      std::ostringstream os;
      os << name << " = " << n << " must be a power of two >= 8";
      throw std::invalid_argument(os.str());
    }
  };
  check_n(n_xi, "n_xi");
  check_n(n_eta, "n_eta");
  if (!(l_xi > 0.0) || !(l_eta > 0.0) || !std::isfinite(l_xi) || !std::isfinite(l_eta))
    throw std::invalid_argument("grid half-period scales must be positive");

  auto d = std::make_shared<detail::GridData>();
  d->n_xi = n_xi;
  d->n_eta = n_eta;
  d->l_xi = l_xi;
  d->l_eta = l_eta;
  fill_axis(n_xi, l_xi, d->xi, d->k_xi, d->k_xi_odd, d->erf_xi, d->gauss_xi);
  fill_axis(n_eta, l_eta, d->eta, d->k_eta, d->k_eta_odd, d->erf_eta, d->gauss_eta);
  const double two_pi = 2.0 * std::numbers::pi;
  d->fft = std::make_unique<FftEngine>(n_xi, n_eta, two_pi * l_xi / static_cast<double>(n_xi),
                                       two_pi * l_eta / static_cast<double>(n_eta));
  SpectralGrid g;
  g.data_ = std::move(d);
  return g;
}

std::size_t SpectralGrid::n_xi() const { return data_->n_xi; }
std::size_t SpectralGrid::n_eta() const { return data_->n_eta; }
double SpectralGrid::l_xi() const { return data_->l_xi; }
double SpectralGrid::l_eta() const { return data_->l_eta; }
double SpectralGrid::period_xi() const { return 2.0 * std::numbers::pi * data_->l_xi; }
double SpectralGrid::period_eta() const { return 2.0 * std::numbers::pi * data_->l_eta; }
double SpectralGrid::h_xi() const { return period_xi() / static_cast<double>(data_->n_xi); }
double SpectralGrid::h_eta() const { return period_eta() / static_cast<double>(data_->n_eta); }
std::span<const double> SpectralGrid::xi_points() const { return data_->xi; }
std::span<const double> SpectralGrid::eta_points() const { return data_->eta; }
std::span<const double> SpectralGrid::k_xi() const { return data_->k_xi; }
std::span<const double> SpectralGrid::k_eta() const { return data_->k_eta; }
std::span<const double> SpectralGrid::k_xi_odd() const { return data_->k_xi_odd; }
std::span<const double> SpectralGrid::k_eta_odd() const { return data_->k_eta_odd; }
std::span<const double> SpectralGrid::erf_points(Axis a) const {
  return a == Axis::xi ? std::span<const double>(data_->erf_xi) : std::span<const double>(data_->erf_eta);
}
std::span<const double> SpectralGrid::gauss_symbol(Axis a) const {
  return a == Axis::xi ? std::span<const double>(data_->gauss_xi) : std::span<const double>(data_->gauss_eta);
}
const FftEngine& SpectralGrid::fft() const { return *data_->fft; }

bool SpectralGrid::same_geometry(const SpectralGrid& other) const {
  if (data_ == other.data_) return true;
  if (!data_ || !other.data_) return false;
  return data_->n_xi == other.data_->n_xi && data_->n_eta == other.data_->n_eta &&
         data_->l_xi == other.data_->l_xi && data_->l_eta == other.data_->l_eta;
}

ComplexField::ComplexField(SpectralGrid grid, Representation rep)
    : grid_(std::move(grid)), rep_(rep), values_(grid_.size(), cplx{}) {}

ComplexField::ComplexField(SpectralGrid grid, Representation rep, aligned_vector<cplx> values)
    : grid_(std::move(grid)), rep_(rep), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw std::invalid_argument("field size does not match grid");
}

void ComplexField::to_fourier() {
  assert(rep_ == Representation::physical);
  grid_.fft().forward(values_);
  rep_ = Representation::fourier;
}

void ComplexField::to_physical() {
  assert(rep_ == Representation::fourier);
  grid_.fft().inverse(values_);
  rep_ = Representation::physical;
}

RealField::RealField(SpectralGrid grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}

RealField::RealField(SpectralGrid grid, aligned_vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw std::invalid_argument("field size does not match grid");
}

ComplexField forward(const ComplexField& f) {
  assert(f.is_physical());
  ComplexField out = f;
  out.to_fourier();
  return out;
}

ComplexField inverse(const ComplexField& f) {
  assert(f.is_fourier());
  ComplexField out = f;
  out.to_physical();
  return out;
}

ComplexField to_complex(const RealField& f) {
  ComplexField out(f.grid(), Representation::physical);
  auto dst = out.values();
  auto src = f.values();
  exec::parallel_for(exec::parallel, src.size(), [&](std::size_t i) { dst[i] = cplx(src[i], 0.0); });
  return out;
}

RealField to_real(const ComplexField& f, double rel_tol) {
  assert(f.is_physical());
  RealField out(f.grid());
  auto src = f.values();
  auto dst = out.values();
  double max_re = 0.0, max_im = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = src[i].real();
    max_re = std::max(max_re, std::abs(src[i].real()));
    max_im = std::max(max_im, std::abs(src[i].imag()));
  }
  if (max_im > rel_tol * max_re && max_im > 0.0) {
    std::ostringstream os;
    os << "field is not real: max|Im| = " << max_im << ", max|Re| = " << max_re;
    throw std::domain_error(os.str());
  }
  return out;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) {
    if (std::isnan(x)) return x;
    m = std::max(m, std::abs(x));
  }
  return m;
}

double max_abs(std::span<const cplx> v) {
  double m = 0.0;
  for (const cplx& x : v) {
    const double a = std::abs(x);
    if (std::isnan(a)) return a;
    m = std::max(m, a);
  }
  return m;
}

double quadrature(const RealField& f) {
  const auto& g = f.grid();
  const std::size_t cols = g.n_eta();
  auto v = f.values();
  const double s = exec::sum_rows(exec::parallel, g.n_xi(), [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += v[i * cols + j];
    return acc;
  });
  return s * g.cell_area();
}

double quadrature_abs2(const ComplexField& f) {
  assert(f.is_physical());
  const auto& g = f.grid();
  const std::size_t cols = g.n_eta();
  auto v = f.values();
  const double s = exec::sum_rows(exec::parallel, g.n_xi(), [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += std::norm(v[i * cols + j]);
    return acc;
  });
  return s * g.cell_area();
}

namespace {

bool is_high(std::size_t idx, std::size_t n) {
  const std::size_t m = idx < n / 2 ? idx : n - idx;
  return 3 * m >= n;
}

}  // namespace

double spectral_tail_ratio(const ComplexField& coeffs) {
  assert(coeffs.is_fourier());
  const auto& g = coeffs.grid();
  double all = 0.0, tail = 0.0;
  for (std::size_t p = 0; p < g.n_xi(); ++p) {
    const bool hp = is_high(p, g.n_xi());
    for (std::size_t q = 0; q < g.n_eta(); ++q) {
      const double a = std::abs(coeffs(p, q));
      if (std::isnan(a)) return a;
      all = std::max(all, a);
      if (hp || is_high(q, g.n_eta())) tail = std::max(tail, a);
    }
  }
  return all > 0.0 ? tail / all : 0.0;
}

bool is_resolved(const ComplexField& f, double rel_tol) {
  const double r = f.is_fourier() ? spectral_tail_ratio(f) : spectral_tail_ratio(forward(f));
  return r <= rel_tol;
}

bool is_resolved(const RealField& f, double rel_tol) { return is_resolved(to_complex(f), rel_tol); }

void apply_two_thirds_filter(ComplexField& coeffs) {
  assert(coeffs.is_fourier());
  const auto& g = coeffs.grid();
  for (std::size_t p = 0; p < g.n_xi(); ++p)
    for (std::size_t q = 0; q < g.n_eta(); ++q) {
      const std::size_t mp = p < g.n_xi() / 2 ? p : g.n_xi() - p;
      const std::size_t mq = q < g.n_eta() / 2 ? q : g.n_eta() - q;
      if (3 * mp > g.n_xi() || 3 * mq > g.n_eta()) coeffs(p, q) = 0.0;
    }
}

}  // namespace ds1
