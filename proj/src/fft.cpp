#include "ds1/fft.hpp"

#include <fftw3.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <stdexcept>
#include <utility>

#include <unistd.h>

#include "ds1/parallel.hpp"

namespace ds1 {

namespace {

// FFTW's planner is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::atomic<FftPlanner> g_planner{FftPlanner::measure};
std::string g_wisdom_path;     // guarded by planner_mutex
bool g_wisdom_loaded = false;  // guarded by planner_mutex

unsigned planner_flags() {
  return g_planner.load() == FftPlanner::measure ? FFTW_MEASURE : FFTW_ESTIMATE;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

void load_wisdom_locked() {
  if (g_wisdom_loaded || g_wisdom_path.empty()) return;
  g_wisdom_loaded = true;
  if (std::filesystem::exists(g_wisdom_path)) fftw_import_wisdom_from_filename(g_wisdom_path.c_str());
}

void save_wisdom_locked() {
  if (g_wisdom_path.empty()) return;
  const std::string tmp = g_wisdom_path + ".tmp." + std::to_string(::getpid());
  std::error_code ec;
  const auto parent = std::filesystem::path(g_wisdom_path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  if (fftw_export_wisdom_to_filename(tmp.c_str()) != 0) std::filesystem::rename(tmp, g_wisdom_path, ec);
}

// Multiplies row-major data by scale * (-1)^(p+q).
void scale_alternating(std::span<cplx> data, std::size_t rows, std::size_t cols, double scale) {
  exec::parallel_for(exec::parallel, rows, [&](std::size_t p) {
    cplx* row = data.data() + p * cols;
    const double s = (p % 2 == 0) ? scale : -scale;
    for (std::size_t q = 0; q < cols; ++q) row[q] *= (q % 2 == 0) ? s : -s;
  });
}

}  // namespace

void set_fft_planner(FftPlanner planner) { g_planner.store(planner); }
FftPlanner fft_planner() { return g_planner.load(); }

void set_fft_wisdom_file(std::string path) {
  std::lock_guard lock(planner_mutex());
  g_wisdom_path = std::move(path);
  g_wisdom_loaded = false;
}

struct FftEngine::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  fftw_plan line_fwd[2] = {nullptr, nullptr};
  fftw_plan line_bwd[2] = {nullptr, nullptr};

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    for (fftw_plan p : {fwd, bwd, r2c, c2r, line_fwd[0], line_fwd[1], line_bwd[0], line_bwd[1]})
      if (p) fftw_destroy_plan(p);
  }
};

FftEngine::FftEngine(std::size_t n_xi, std::size_t n_eta, double h_xi, double h_eta)
    : n_xi_(n_xi), n_eta_(n_eta), h_xi_(h_xi), h_eta_(h_eta), plans_(std::make_unique<Plans>()) {
  const int nx = static_cast<int>(n_xi);
  const int ny = static_cast<int>(n_eta);
  aligned_vector<cplx> a(n_xi * n_eta);
  aligned_vector<cplx> half(n_xi * (n_eta / 2 + 1));
  aligned_vector<double> real(n_xi * n_eta);
  aligned_vector<cplx> lx(n_xi), ly(n_eta);

  std::lock_guard lock(planner_mutex());
  load_wisdom_locked();
  const unsigned flags = planner_flags();
  plans_->fwd = fftw_plan_dft_2d(nx, ny, as_fftw(a.data()), as_fftw(a.data()), FFTW_FORWARD, flags);
  plans_->bwd = fftw_plan_dft_2d(nx, ny, as_fftw(a.data()), as_fftw(a.data()), FFTW_BACKWARD, flags);
  plans_->r2c = fftw_plan_dft_r2c_2d(nx, ny, real.data(), as_fftw(half.data()), flags);
  plans_->c2r = fftw_plan_dft_c2r_2d(nx, ny, as_fftw(half.data()), real.data(), flags);
  plans_->line_fwd[0] = fftw_plan_dft_1d(nx, as_fftw(lx.data()), as_fftw(lx.data()), FFTW_FORWARD, flags);
  plans_->line_bwd[0] = fftw_plan_dft_1d(nx, as_fftw(lx.data()), as_fftw(lx.data()), FFTW_BACKWARD, flags);
  plans_->line_fwd[1] = fftw_plan_dft_1d(ny, as_fftw(ly.data()), as_fftw(ly.data()), FFTW_FORWARD, flags);
  plans_->line_bwd[1] = fftw_plan_dft_1d(ny, as_fftw(ly.data()), as_fftw(ly.data()), FFTW_BACKWARD, flags);
  if (!plans_->fwd || !plans_->bwd || !plans_->r2c || !plans_->c2r || !plans_->line_fwd[0] ||
      !plans_->line_fwd[1] || !plans_->line_bwd[0] || !plans_->line_bwd[1])
    throw std::runtime_error("FFTW planning failed");
  save_wisdom_locked();
}

FftEngine::~FftEngine() = default;

void FftEngine::forward(std::span<cplx> data) const {
  fftw_execute_dft(plans_->fwd, as_fftw(data.data()), as_fftw(data.data()));
  scale_alternating(data, n_xi_, n_eta_, h_xi_ * h_eta_);
}

void FftEngine::inverse(std::span<cplx> data) const {
  scale_alternating(data, n_xi_, n_eta_, 1.0 / (static_cast<double>(n_xi_ * n_eta_) * h_xi_ * h_eta_));
  fftw_execute_dft(plans_->bwd, as_fftw(data.data()), as_fftw(data.data()));
}

void FftEngine::raw_forward(std::span<cplx> data) const {
  fftw_execute_dft(plans_->fwd, as_fftw(data.data()), as_fftw(data.data()));
}

void FftEngine::forward_real(std::span<const double> in, std::span<cplx> half) const {
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(in.data()), as_fftw(half.data()));
  scale_alternating(half, n_xi_, half_cols(), h_xi_ * h_eta_);
}

void FftEngine::inverse_real(std::span<cplx> half, std::span<double> out) const {
  scale_alternating(half, n_xi_, half_cols(), 1.0 / (static_cast<double>(n_xi_ * n_eta_) * h_xi_ * h_eta_));
  fftw_execute_dft_c2r(plans_->c2r, as_fftw(half.data()), out.data());
}

void FftEngine::forward_line(Axis axis, std::span<cplx> data) const {
  const int a = axis == Axis::xi ? 0 : 1;
  const double h = axis == Axis::xi ? h_xi_ : h_eta_;
  fftw_execute_dft(plans_->line_fwd[a], as_fftw(data.data()), as_fftw(data.data()));
  for (std::size_t p = 0; p < data.size(); ++p) data[p] *= (p % 2 == 0) ? h : -h;
}

void FftEngine::inverse_line(Axis axis, std::span<cplx> data) const {
  const int a = axis == Axis::xi ? 0 : 1;
  const double h = axis == Axis::xi ? h_xi_ : h_eta_;
  const double s = 1.0 / (static_cast<double>(data.size()) * h);
  for (std::size_t p = 0; p < data.size(); ++p) data[p] *= (p % 2 == 0) ? s : -s;
  fftw_execute_dft(plans_->line_bwd[a], as_fftw(data.data()), as_fftw(data.data()));
}

}  // namespace ds1
