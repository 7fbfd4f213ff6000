#include "ds1/evolution.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ds1/fft.hpp"
#include "ds1/log.hpp"
#include "ds1/snapshot.hpp"

namespace ds1 {

void EvolutionConfig::validate() const {
  if (!(t_max > t_start)) throw std::invalid_argument("EvolutionConfig: t_max must exceed t_start");
  if (n_steps < 1) throw std::invalid_argument("EvolutionConfig: n_steps must be >= 1");
  if (record_every < 1) throw std::invalid_argument("EvolutionConfig: record_every must be >= 1");
  if (!(delta_abort < 0.0)) throw std::invalid_argument("EvolutionConfig: delta_abort must be negative");
  if (checkpoint_every % record_every != 0)
    throw std::invalid_argument("EvolutionConfig: checkpoint_every must be a multiple of record_every");
  if (!(resolution_abort >= 0.0 && resolution_abort < 1.0))
    throw std::invalid_argument("EvolutionConfig: resolution_abort must lie in [0, 1)");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::delta_abort: return "delta_abort";
    case Termination::resolution_lost: return "resolution_lost";
  }
  return "unknown";
}

std::filesystem::path EvolutionIO::snapshot_path(std::size_t index) const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_snap_%03zu.ds1", index);
  return dir / (stem + buf);
}

namespace {

constexpr cplx I{0.0, 1.0};

// phi_1, phi_2, phi_3 of z.
struct Phi {
  cplx e, p1, p2, p3;
};

Phi phi_functions(cplx z) {
  Phi r;
  r.e = std::exp(z);
  if (std::abs(z) < 1.0) {
    // phi_k(z) = sum_j z^j / (j + k)!
    cplx zj = 1.0;
    double f1 = 1.0, f2 = 2.0, f3 = 6.0;  // (j+1)!, (j+2)!, (j+3)!
    r.p1 = r.p2 = r.p3 = 0.0;
    for (int j = 0; j < 30; ++j) {
      r.p1 += zj / f1;
      r.p2 += zj / f2;
      r.p3 += zj / f3;
      zj *= z;
      f1 *= j + 2;
      f2 *= j + 3;
      f3 *= j + 4;
    }
  } else {
    r.p1 = (r.e - 1.0) / z;
    r.p2 = (r.p1 - 1.0) / z;
    r.p3 = (r.p2 - 0.5) / z;
  }
  return r;
}

double parseval_sum(const ComplexField& psi_hat, std::span<const double> weight_xi, std::span<const double> weight_eta) {
  const auto& g = psi_hat.grid();
  const std::size_t ny = g.n_eta();
  auto v = psi_hat.values();
  return exec::sum_rows(exec::serial, g.n_xi(), [&](std::size_t p) {
    double s = 0.0;
    for (std::size_t q = 0; q < ny; ++q) s += weight_xi[p] * weight_eta[q] * std::norm(v[p * ny + q]);
    return s;
  }) / (g.period_xi() * g.period_eta());
}

}  // namespace

double mass(const ComplexField& psi) {
  if (psi.is_physical()) return quadrature_abs2(psi);
  const auto& g = psi.grid();
  const std::vector<double> ones_x(g.n_xi(), 1.0), ones_y(g.n_eta(), 1.0);
  return parseval_sum(psi, ones_x, ones_y);
}

double l2_gradient(const ComplexField& psi_hat, Axis axis) {
  const ComplexField f = psi_hat.is_fourier() ? psi_hat : forward(psi_hat);
  const auto& g = f.grid();
  std::vector<double> wx(g.n_xi(), 1.0), wy(g.n_eta(), 1.0);
  auto& w = axis == Axis::xi ? wx : wy;
  const auto k = g.k_odd(axis);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = k[i] * k[i];
  return std::sqrt(parseval_sum(f, wx, wy));
}

double energy(const ComplexField& psi) {
  const ComplexField phys = psi.is_physical() ? psi : inverse(psi);
  const ComplexField hat = psi.is_fourier() ? psi : forward(psi);
  const auto& g = phys.grid();
  RealField rho(g);
  auto pv = phys.values();
  auto rv = rho.values();
  for (std::size_t k = 0; k < rv.size(); ++k) rv[k] = std::norm(pv[k]);
  // d_eta^{-1}rho d_xi rho + d_xi^{-1}rho d_eta rho integrates (by parts, rho
  // decaying) to -rho B rho, which avoids four extra transforms.
  const RealField brho = apply_B(rho);
  double nonlocal = 0.0;
  auto bv = brho.values();
  for (std::size_t k = 0; k < rv.size(); ++k) nonlocal += rv[k] * bv[k];
  nonlocal *= g.cell_area();
  const double gx = l2_gradient(hat, Axis::xi);
  const double gy = l2_gradient(hat, Axis::eta);
  return gx * gx + gy * gy - 0.25 * nonlocal;
}

RhsSplit rhs_split(const ComplexField& psi_hat) {
  const ComplexField u = psi_hat.is_fourier() ? psi_hat : forward(psi_hat);
  const auto& g = u.grid();
  RhsSplit r;
  r.linear_symbol.resize(g.size());
  const auto kx = g.k_xi();
  const auto ky = g.k_eta();
  for (std::size_t p = 0; p < g.n_xi(); ++p)
    for (std::size_t q = 0; q < g.n_eta(); ++q)
      r.linear_symbol[p * g.n_eta() + q] = -2.0 * I * (kx[p] * kx[p] + ky[q] * ky[q]);
  Etdrk4 stepper(g);
  r.nonlinear = ComplexField(g, Representation::fourier);
  stepper.nonlinear(u.values(), r.nonlinear.values());
  return r;
}

// ---------------------------------------------------------------------------

Etdrk4::Etdrk4(SpectralGrid grid, exec::Policy policy)
    : grid_(std::move(grid)),
      policy_(policy),
      B_(grid_, policy),
      work_(grid_.size()),
      rho_(grid_.size()),
      brho_(grid_.size()),
      nu_(grid_.size()),
      na_(grid_.size()),
      nb_(grid_.size()),
      tmp_(grid_.size()) {
  const std::size_t nx = grid_.n_xi(), ny = grid_.n_eta();
  qcols_ = ny / 2 + 1;
  abs_p_.resize(nx);
  abs_q_.resize(ny);
  for (std::size_t p = 0; p < nx; ++p) abs_p_[p] = p <= nx / 2 ? p : nx - p;
  for (std::size_t q = 0; q < ny; ++q) abs_q_[q] = q <= ny / 2 ? q : ny - q;
}

std::size_t Etdrk4::quarter_index(std::size_t p, std::size_t q) const { return abs_p_[p] * qcols_ + abs_q_[q]; }

void Etdrk4::prepare(double dt) {
  if (dt == dt_ && !E_.empty()) return;
  dt_ = dt;
  const std::size_t rows = grid_.n_xi() / 2 + 1;
  const std::size_t size = rows * qcols_;
  E_.resize(size);
  E2_.resize(size);
  Q_.resize(size);
  f1_.resize(size);
  f2_.resize(size);
  f3_.resize(size);
  const double lx = grid_.l_xi(), ly = grid_.l_eta();
  exec::parallel_for(policy_, rows, [&](std::size_t a) {
    for (std::size_t b = 0; b < qcols_; ++b) {
      const double kx = static_cast<double>(a) / lx, ky = static_cast<double>(b) / ly;
      const cplx z = -2.0 * I * (kx * kx + ky * ky) * dt;
      const Phi full = phi_functions(z);
      const Phi half = phi_functions(0.5 * z);
      const std::size_t k = a * qcols_ + b;
      E_[k] = full.e;
      E2_[k] = half.e;
      Q_[k] = 0.5 * dt * half.p1;
      f1_[k] = dt * (full.p1 - 3.0 * full.p2 + 4.0 * full.p3);
      f2_[k] = dt * (full.p2 - 2.0 * full.p3);
      f3_[k] = dt * (-full.p2 + 4.0 * full.p3);
    }
  });
}

void Etdrk4::nonlinear(std::span<const cplx> in, std::span<cplx> out) {
  const auto& fft = grid_.fft();
  const std::size_t n = grid_.size();
  const std::size_t ny = grid_.n_eta();
  if (in.data() != work_.data()) std::copy(in.begin(), in.end(), work_.begin());
  fft.inverse(work_);
  exec::parallel_for(policy_, grid_.n_xi(), [&](std::size_t i) {
    for (std::size_t j = i * ny; j < (i + 1) * ny; ++j) rho_[j] = std::norm(work_[j]);
  });
  B_.apply(rho_, brho_);
  exec::parallel_for(policy_, grid_.n_xi(), [&](std::size_t i) {
    for (std::size_t j = i * ny; j < (i + 1) * ny; ++j) work_[j] *= I * brho_[j];
  });
  fft.forward(work_);
  std::copy(work_.begin(), work_.begin() + static_cast<std::ptrdiff_t>(n), out.begin());
}

void Etdrk4::step(std::span<cplx> u, double dt) {
  prepare(dt);
  const std::size_t nx = grid_.n_xi(), ny = grid_.n_eta();
  const auto rows = [&](auto&& body) {
    exec::parallel_for(policy_, nx, [&](std::size_t p) {
      for (std::size_t q = 0; q < ny; ++q) body(p * ny + q, quarter_index(p, q));
    });
  };
  if (linear_only_) {
    rows([&](std::size_t j, std::size_t k) { u[j] *= E_[k]; });
    return;
  }
  nonlinear(u, nu_);
  rows([&](std::size_t j, std::size_t k) { tmp_[j] = E2_[k] * u[j] + Q_[k] * nu_[j]; });
  nonlinear(tmp_, na_);
  rows([&](std::size_t j, std::size_t k) { tmp_[j] = E2_[k] * u[j] + Q_[k] * na_[j]; });
  nonlinear(tmp_, nb_);
  // c = E2 a + Q (2 Nb - Nu) with a expanded, so a need not be kept.
  rows([&](std::size_t j, std::size_t k) {
    tmp_[j] = E_[k] * u[j] + Q_[k] * ((E2_[k] - 1.0) * nu_[j] + 2.0 * nb_[j]);
  });
  nonlinear(tmp_, tmp_);
  rows([&](std::size_t j, std::size_t k) {
    u[j] = E_[k] * u[j] + f1_[k] * nu_[j] + 2.0 * f2_[k] * (na_[j] + nb_[j]) + f3_[k] * tmp_[j];
  });
}

// ---------------------------------------------------------------------------

namespace {

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_row(const EvolutionRecord& r, std::size_t i) {
  return csv_number(r.times[i]) + "," + csv_number(r.linf[i]) + "," + csv_number(r.mass[i]) + "," +
         csv_number(r.l2_grad_xi[i]) + "," + csv_number(r.l2_grad_eta[i]) + "," + csv_number(r.energy[i]) + "," +
         csv_number(r.delta[i]);
}

bool all_finite(std::span<const cplx> v) {
  for (const auto& c : v)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

struct RunStart {
  aligned_vector<cplx> u;
  std::size_t step = 0;
  double m0 = std::numeric_limits<double>::quiet_NaN();
  EvolutionRecord rec;  // rows already recorded (resume)
};

EvolutionRecord run(const SpectralGrid& g, RunStart start, const EvolutionConfig& cfg, const EvolutionIO& io,
                    const RecordObserver& observer, exec::Policy policy) {
  cfg.validate();
  const double dt = cfg.dt();
  Etdrk4 stepper(g, policy);
  EvolutionRecord rec = std::move(start.rec);
  rec.dt = dt;
  aligned_vector<cplx>& u = start.u;

  // Snapshot schedule by step index.
  std::multimap<std::size_t, std::size_t> snaps;
  for (std::size_t i = 0; i < cfg.snapshot_times.size(); ++i) {
    const double s = std::round((cfg.snapshot_times[i] - cfg.t_start) / dt);
    if (s >= 0.0 && s <= static_cast<double>(cfg.n_steps)) snaps.emplace(static_cast<std::size_t>(s), i);
  }

  const bool files = !io.dir.empty();
  std::ofstream csv;
  if (files) {
    std::filesystem::create_directories(io.dir);
    csv.open(io.csv_path(), std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write " + io.csv_path().string());
    csv << kNormsCsvHeader << "\n";
    for (std::size_t i = 0; i < rec.size(); ++i) csv << csv_row(rec, i) << "\n";
    csv.flush();
  }

  ComplexField phys(g, Representation::physical);
  ComplexField hat(g, Representation::fourier);
  double m0 = start.m0;

  // Returns false when the run must stop.
  const auto record = [&](std::size_t step) {
    const double t = cfg.t_start + static_cast<double>(step) * dt;
    std::copy(u.begin(), u.end(), hat.values().begin());
    std::copy(u.begin(), u.end(), phys.values().begin());
    g.fft().inverse(phys.values());
    if (!all_finite(phys.values())) {
      rec.termination = Termination::resolution_lost;
      return false;
    }
    const double m = mass(phys);
    if (std::isnan(m0)) m0 = m;
    rec.m0 = m0;
    const double d = m == m0 ? -std::numeric_limits<double>::infinity() : std::log10(std::abs(1.0 - m / m0));
    rec.times.push_back(t);
    rec.linf.push_back(max_abs(phys.values()));
    rec.mass.push_back(m);
    rec.l2_grad_xi.push_back(l2_gradient(hat, Axis::xi));
    rec.l2_grad_eta.push_back(l2_gradient(hat, Axis::eta));
    rec.energy.push_back(cfg.record_energy ? energy(phys) : std::numeric_limits<double>::quiet_NaN());
    rec.delta.push_back(d);
    if (files) csv << csv_row(rec, rec.size() - 1) << "\n";
    if (observer) observer(step, t, hat);
    if (!(d <= cfg.delta_abort)) {
      rec.termination = Termination::delta_abort;
      return false;
    }
    if (cfg.resolution_abort > 0.0 && spectral_tail_ratio(hat) > cfg.resolution_abort) {
      rec.termination = Termination::resolution_lost;
      return false;
    }
    rec.last_good_state = phys;
    rec.last_good_time = t;
    auto [lo, hi] = snaps.equal_range(step);
    for (auto it = lo; it != hi; ++it) {
      if (files) {
        const auto path = io.snapshot_path(it->second);
        write_snapshot(path, phys, t);
        rec.snapshots.push_back({t, path});
      } else {
        rec.snapshots.push_back({t, {}});
      }
    }
    return true;
  };

  const auto is_record_step = [&](std::size_t step) {
    return step % cfg.record_every == 0 || step == cfg.n_steps || snaps.count(step) > 0;
  };

  bool ok = true;
  if (start.step == 0) ok = record(0);
  std::size_t step = start.step;
  while (ok && step < cfg.n_steps) {
    stepper.step(u, dt);
    ++step;
    if (is_record_step(step)) ok = record(step);
    if (ok && files && cfg.checkpoint_every > 0 && step % cfg.checkpoint_every == 0) {
      csv.flush();
      ComplexField state(g, Representation::fourier, u);
      write_checkpoint(io.checkpoint_path(),
                       Checkpoint{Snapshot{std::move(state), cfg.t_start + static_cast<double>(step) * dt},
                                  CheckpointTrailer{step, io.config_hash, m0, rec.size()}});
    }
  }
  rec.steps_taken = step;
  rec.final_state = ComplexField(g, Representation::fourier, std::move(u));
  return rec;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

EvolutionRecord read_norms_csv(const std::filesystem::path& path, std::size_t rows) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != kNormsCsvHeader) throw FormatError(path.string() + ": unexpected header '" + line + "'");
  EvolutionRecord rec;
  while (rec.size() < rows && std::getline(in, line)) {
    const auto f = split(line);
    if (f.size() != 7) throw FormatError(path.string() + ": malformed row '" + line + "'");
    double v[7];
    for (int i = 0; i < 7; ++i) v[i] = std::strtod(f[i].c_str(), nullptr);
    rec.times.push_back(v[0]);
    rec.linf.push_back(v[1]);
    rec.mass.push_back(v[2]);
    rec.l2_grad_xi.push_back(v[3]);
    rec.l2_grad_eta.push_back(v[4]);
    rec.energy.push_back(v[5]);
    rec.delta.push_back(v[6]);
  }
  if (rows != static_cast<std::size_t>(-1) && rec.size() != rows)
    throw FormatError(path.string() + ": fewer rows than the checkpoint recorded");
  return rec;
}

void write_norms_csv(const std::filesystem::path& path, const EvolutionRecord& rec) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << kNormsCsvHeader << "\n";
  for (std::size_t i = 0; i < rec.size(); ++i) out << csv_row(rec, i) << "\n";
}

EvolutionRecord evolve(const ComplexField& psi0, const EvolutionConfig& cfg, const EvolutionIO& io,
                       const RecordObserver& observer, exec::Policy policy) {
  const ComplexField u0 = psi0.is_fourier() ? psi0 : forward(psi0);
  RunStart start;
  start.u.assign(u0.values().begin(), u0.values().end());
  return run(u0.grid(), std::move(start), cfg, io, observer, policy);
}

EvolutionRecord resume_evolution(const SpectralGrid& grid, const EvolutionConfig& cfg, const EvolutionIO& io,
                                 const RecordObserver& observer, exec::Policy policy) {
  if (io.dir.empty()) throw std::invalid_argument("resume_evolution: no output directory");
  Checkpoint cp = read_checkpoint(io.checkpoint_path(), grid);
  if (cp.trailer.config_hash != io.config_hash)
    throw FormatError(io.checkpoint_path().string() + ": checkpoint belongs to a different configuration");
  if (cp.trailer.step > cfg.n_steps) throw FormatError(io.checkpoint_path().string() + ": step beyond n_steps");
  if (cp.state.field.is_physical()) cp.state.field.to_fourier();

  RunStart start;
  start.step = cp.trailer.step;
  start.m0 = cp.trailer.initial_mass;
  start.rec = read_norms_csv(io.csv_path(), cp.trailer.records);
  start.rec.m0 = start.m0;
  const double dt = cfg.dt();
  for (std::size_t i = 0; i < cfg.snapshot_times.size(); ++i) {
    const double s = std::round((cfg.snapshot_times[i] - cfg.t_start) / dt);
    if (s >= 0.0 && s <= static_cast<double>(start.step) && std::filesystem::exists(io.snapshot_path(i)))
      start.rec.snapshots.push_back({cfg.t_start + s * dt, io.snapshot_path(i)});
  }
  // Checkpoints sit on record steps, so the stored state is the last good one.
  start.rec.last_good_state = inverse(cp.state.field);
  start.rec.last_good_time = cp.state.time;
  start.u.assign(cp.state.field.values().begin(), cp.state.field.values().end());
  return run(grid, std::move(start), cfg, io, observer, policy);
}

namespace {

using CoarseRun = std::function<EvolutionRecord(const RecordObserver&)>;

TwoPhaseResult two_phase(const SpectralGrid& g, const TwoPhaseConfig& cfg, const EvolutionIO& io,
                         exec::Policy policy, const CoarseRun& coarse_run,
                         std::vector<std::pair<double, aligned_vector<cplx>>> kept) {
  if (!(cfg.restart_fraction > 0.0 && cfg.restart_fraction < 1.0) || cfg.refine < 1)
    throw std::invalid_argument("run_two_phase: restart_fraction in (0, 1) and refine >= 1 required");
  if (!(cfg.keep_spacing > 0.0)) throw std::invalid_argument("run_two_phase: keep_spacing must be positive");

  // Coarse states kept in memory: one per keep_spacing * t of elapsed time,
  // dropping those older than the latest one at or before
  // min(0.85, restart_fraction) * t. Whatever the abort time turns out to be,
  // a state at or before restart_fraction * t_abort survives.
  const double keep_fraction = std::min(0.85, cfg.restart_fraction);
  // Pruned buffers are recycled; fresh allocations of whole fields at every
  // keep fragment the heap badly enough to grow the resident set without bound.
  std::vector<aligned_vector<cplx>> spare;
  const RecordObserver keep = [&](std::size_t, double t, const ComplexField& hat) {
    if (!kept.empty() && t - kept.back().first < cfg.keep_spacing * t) return;
    aligned_vector<cplx> buf;
    if (!spare.empty()) {
      buf = std::move(spare.back());
      spare.pop_back();
    }
    buf.assign(hat.values().begin(), hat.values().end());
    kept.emplace_back(t, std::move(buf));
    std::size_t anchor = 0;
    for (std::size_t i = 0; i < kept.size(); ++i)
      if (kept[i].first <= keep_fraction * t) anchor = i;
    for (std::size_t i = 0; i < anchor; ++i) spare.push_back(std::move(kept[i].second));
    kept.erase(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(anchor));
  };

  TwoPhaseResult res;
  res.coarse = coarse_run(keep);
  if (res.coarse.termination == Termination::completed || kept.empty()) {
    res.combined = res.coarse;
    return res;
  }
  res.abort_time = res.coarse.times.back();
  const double target = cfg.restart_fraction * res.abort_time;
  std::size_t pick = 0;
  for (std::size_t i = 0; i < kept.size(); ++i)
    if (kept[i].first <= target) pick = i;
  res.restart_time = kept[pick].first;

  EvolutionConfig fine = cfg.coarse;
  fine.t_start = res.restart_time;
  const double dt = cfg.coarse.dt() / static_cast<double>(cfg.refine);
  fine.n_steps = static_cast<std::size_t>(std::llround((cfg.coarse.t_max - fine.t_start) / dt));
  fine.snapshot_times.clear();
  for (double t : cfg.coarse.snapshot_times)
    if (t >= fine.t_start) fine.snapshot_times.push_back(t);
  fine.checkpoint_every = 0;
  EvolutionIO fine_io = io;
  fine_io.stem = io.stem + "_fine";

  RunStart fs;
  fs.u = std::move(kept[pick].second);
  fs.m0 = res.coarse.m0;
  res.fine = run(g, std::move(fs), fine, fine_io, {}, policy);
  res.refined = true;

  EvolutionRecord& c = res.combined;
  const auto append = [&](const EvolutionRecord& r, std::size_t i) {
    c.times.push_back(r.times[i]);
    c.linf.push_back(r.linf[i]);
    c.mass.push_back(r.mass[i]);
    c.l2_grad_xi.push_back(r.l2_grad_xi[i]);
    c.l2_grad_eta.push_back(r.l2_grad_eta[i]);
    c.energy.push_back(r.energy[i]);
    c.delta.push_back(r.delta[i]);
  };
  for (std::size_t i = 0; i < res.coarse.size() && res.coarse.times[i] < res.restart_time; ++i) append(res.coarse, i);
  for (std::size_t i = 0; i < res.fine.size(); ++i) append(res.fine, i);
  for (const auto& s : res.coarse.snapshots)
    if (s.time < res.restart_time) c.snapshots.push_back(s);
  for (const auto& s : res.fine.snapshots) c.snapshots.push_back(s);
  c.termination = res.fine.termination;
  c.m0 = res.coarse.m0;
  c.dt = res.fine.dt;
  c.steps_taken = res.fine.steps_taken;
  c.final_state = res.fine.final_state;
  c.last_good_state = res.fine.last_good_state;
  c.last_good_time = res.fine.last_good_time;
  if (!io.dir.empty()) write_norms_csv(io.dir / (io.stem + "_combined.csv"), c);
  return res;
}

}  // namespace

TwoPhaseResult run_two_phase(const ComplexField& psi0, const TwoPhaseConfig& cfg, const EvolutionIO& io,
                             exec::Policy policy) {
  const ComplexField u0 = psi0.is_fourier() ? psi0 : forward(psi0);
  const auto& g = u0.grid();
  return two_phase(
      g, cfg, io, policy,
      [&](const RecordObserver& keep) {
        RunStart start;
        start.u.assign(u0.values().begin(), u0.values().end());
        return run(g, std::move(start), cfg.coarse, io, keep, policy);
      },
      {});
}

TwoPhaseResult resume_two_phase(const SpectralGrid& grid, const TwoPhaseConfig& cfg, const EvolutionIO& io,
                                exec::Policy policy) {
  // States before the checkpoint are gone; the checkpoint itself seeds the
  // restart candidates.
  const Checkpoint cp = read_checkpoint(io.checkpoint_path(), grid);
  std::vector<std::pair<double, aligned_vector<cplx>>> seed;
  ComplexField hat = cp.state.field;
  if (hat.is_physical()) hat.to_fourier();
  seed.emplace_back(cp.state.time, aligned_vector<cplx>(hat.values().begin(), hat.values().end()));
  return two_phase(
      grid, cfg, io, policy,
      [&](const RecordObserver& keep) { return resume_evolution(grid, cfg.coarse, io, keep, policy); },
      std::move(seed));
}

}  // namespace ds1
