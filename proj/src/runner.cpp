#include "ds1/runner.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ds1/fft.hpp"
#include "ds1/interpolation.hpp"
#include "ds1/log.hpp"
#include "ds1/singular_ops.hpp"
#include "ds1/snapshot.hpp"

namespace ds1 {

using nlohmann::json;
namespace fs = std::filesystem;

#ifndef DS1_VERSION
#define DS1_VERSION "0.0.0"
#endif

std::string version_string() { return std::string("ds1solve ") + DS1_VERSION; }

namespace {

std::vector<double> line_points(std::size_t n, double l) {
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = l * (-M_PI + 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n));
  return x;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path part = path.string() + ".part";
  {
    std::ofstream out(part, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text << "\n";
  }
  fs::rename(part, path);
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return json::parse(in);
}

void write_manifest(const RunConfig& cfg, const std::string& command, std::optional<double> mass_Q = std::nullopt) {
  json m;
  m["version"] = version_string();
  m["command"] = command;
  m["scenario"] = cfg.scenario;
  m["config_hash"] = hex(config_hash(cfg));
  m["config"] = json::parse(to_json(cfg));
  const fs::path path = cfg.output_dir / "manifest.json";
  if (fs::exists(path)) {
    const json old = read_json(path);
    if (old.contains("M_Q") && !mass_Q) m["M_Q"] = old["M_Q"];
  }
  if (mass_Q) m["M_Q"] = *mass_Q;
  write_text(path, m.dump(2));
}

bool needs_Q(const RunConfig& cfg) {
  return cfg.initial.kind == InitialKind::mu_times_Q || cfg.initial.kind == InitialKind::Q_minus_gaussian;
}

RealField load_real(const fs::path& path, const std::optional<SpectralGrid>& grid) {
  Snapshot s = read_snapshot(path, grid);
  if (s.field.is_fourier()) s.field.to_physical();
  return to_real(s.field, 1e-10);
}

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

}  // namespace

std::vector<SelftestLine> selftest_1d(std::size_t n) {
  const double l = 10.0;
  const auto x = line_points(n, l);
  std::vector<SelftestLine> lines;

  std::vector<double> f(n);
  for (std::size_t j = 0; j < n; ++j) f[j] = std::exp(-(x[j] + 1) * (x[j] + 1));
  auto F = antiderivative_line(f, l);
  SelftestLine gauss{"antiderivative gaussian -> erf", 0.0};
  for (std::size_t j = 0; j < n; ++j)
    gauss.error = std::max(gauss.error, std::abs(F[j] - 0.5 * std::sqrt(M_PI) * std::erf(x[j] + 1)));
  lines.push_back(gauss);

  for (std::size_t j = 0; j < n; ++j) f[j] = std::sinh(x[j] + 1) / std::pow(std::cosh(x[j] + 1), 2);
  F = antiderivative_line(f, l);
  SelftestLine sech{"antiderivative sinh/cosh^2 -> -sech", 0.0};
  for (std::size_t j = 0; j < n; ++j) sech.error = std::max(sech.error, std::abs(F[j] + 1.0 / std::cosh(x[j] + 1)));
  lines.push_back(sech);
  return lines;
}

SelftestLine selftest_2d(std::size_t n) {
  const double l = 10.0;
  const auto g = make_grid(n, n, l, l);
  const RealField b = apply_B(dromion2_squared(g));
  const RealField exact = dromion2_B_exact(g);
  SelftestLine two{"B on the squared omega=2 dromion", 0.0};
  for (std::size_t k = 0; k < b.values().size(); ++k)
    two.error = std::max(two.error, std::abs(b.values()[k] - exact.values()[k]));
  return two;
}

std::vector<SelftestLine> selftest(std::size_t n) {
  auto lines = selftest_1d(n);
  lines.push_back(selftest_2d(n));
  return lines;
}

int cmd_selftest(std::size_t n, std::ostream& out) {
  const auto lines = selftest(n);
  bool ok = true;
  for (const auto& s : lines) {
    out << (s.pass() ? "PASS" : "FAIL") << "  " << std::left << std::setw(38) << s.name << " max error "
        << std::setprecision(3) << std::scientific << s.error << " (tolerance " << s.tolerance << ")\n"
        << std::defaultfloat;
    ok = ok && s.pass();
  }
  return ok ? 0 : 1;
}

fs::path q_cache_dir() {
  if (const char* d = std::getenv("DS1_Q_CACHE"); d && *d) return d;
  if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return fs::path(x) / "ds1solve";
  if (const char* h = std::getenv("HOME"); h && *h) return fs::path(h) / ".cache" / "ds1solve";
  return fs::temp_directory_path() / "ds1solve";
}

void use_default_fft_wisdom() {
  if (const char* w = std::getenv("DS1_WISDOM"); w && *w) {
    set_fft_wisdom_file(w);
    return;
  }
  set_fft_wisdom_file((q_cache_dir() / "fftw.wisdom").string());
}

RealField obtain_Q(const RunConfig& cfg, std::ostream& out) {
  const SpectralGrid g = cfg.grid.make();
  if (cfg.q_file) {
    out << "Q: " << cfg.q_file->string() << "\n";
    return load_real(*cfg.q_file, g);
  }
  const fs::path cached = q_cache_dir() / q_cache_name(cfg.grid);
  if (fs::exists(cached)) {
    out << "Q: cached " << cached.string() << "\n";
    return load_real(cached, g);
  }
  out << "Q: solving on " << cfg.grid.n_xi << "x" << cfg.grid.n_eta << " (cache miss)\n";
  RealField q0 = dromion_radiating(g);
  for (double& v : q0.values()) v *= 6.0;
  const auto res = newton_solve(q0, 1.0, cfg.newton);
  fs::create_directories(cached.parent_path());
  write_snapshot(cached, res.Q, 0.0);
  return res.Q;
}

int cmd_stationary(const RunConfig& cfg, std::ostream& out) {
  const SpectralGrid g = cfg.grid.make();
  fs::create_directories(cfg.output_dir);
  write_config(cfg.output_dir / "config.json", cfg);
  RealField q0 = dromion_radiating(g);
  const double q0_max = max_abs(q0.values()) * 6.0;
  for (double& v : q0.values()) v *= 6.0;
  const auto res = newton_solve(q0, 1.0, cfg.newton);
  write_snapshot(cfg.output_dir / "Q.ds1", res.Q, 0.0);
  const fs::path cached = q_cache_dir() / q_cache_name(cfg.grid);
  fs::create_directories(cached.parent_path());
  write_snapshot(cached, res.Q, 0.0);

  const TailFit tx = exponential_tail_fit(res.Q, Axis::xi);
  const TailFit ty = exponential_tail_fit(res.Q, Axis::eta);
  json j;
  j["M_Q"] = res.mass;
  j["max_Q"] = max_abs(res.Q.values());
  const Extremum peak = locate_maximum(res.Q);
  j["peak"] = {{"value", peak.value}, {"xi", peak.x}, {"eta", peak.y}};
  j["max_initial_iterate"] = q0_max;
  j["residual"] = res.final_residual();
  j["residual_history"] = res.residual_history;
  j["gmres_iterations"] = res.gmres_iterations;
  j["symmetry_defect"] = exchange_asymmetry(res.Q);
  j["tail_slope"] = {tx.slope, ty.slope};
  j["tail_fit_residual"] = {tx.rel_residual, ty.rel_residual};
  j["shift"] = {res.shift_xi, res.shift_eta};
  write_text(cfg.output_dir / "stationary.json", j.dump(2));
  write_manifest(cfg, "stationary", res.mass);

  out << "M_Q               " << fmt(res.mass, 15) << "\n"
      << "max Q             " << fmt(max_abs(res.Q.values()), 15) << " on the grid, " << fmt(peak.value, 13)
      << " at (" << fmt(peak.x, 3) << ", " << fmt(peak.y, 3) << ")\n"
      << "residual          " << fmt(res.final_residual(), 3) << " after " << res.gmres_iterations.size()
      << " Newton steps\n"
      << "symmetry defect   " << fmt(exchange_asymmetry(res.Q), 3) << "\n"
      << "tail slopes       " << fmt(tx.slope, 4) << ", " << fmt(ty.slope, 4) << " (fit residual "
      << fmt(std::max(tx.rel_residual, ty.rel_residual), 2) << ")\n";
  return res.final_residual() < cfg.newton.residual_tol ? 0 : 1;
}

int cmd_evolve(const RunConfig& cfg, bool resume, std::ostream& out) {
  const SpectralGrid g = cfg.grid.make();
  fs::create_directories(cfg.output_dir);
  std::optional<RealField> q;
  std::optional<double> mass_Q;
  if (needs_Q(cfg)) {
    q = obtain_Q(cfg, out);
    mass_Q = quadrature_abs2(to_complex(*q));
  }
  write_config(cfg.output_dir / "config.json", cfg);
  write_manifest(cfg, "evolve", mass_Q);

  const EvolutionIO io{cfg.output_dir, "run", config_hash(cfg)};
  const bool orbit = cfg.initial.kind == InitialKind::mu_times_Q && cfg.initial.amplitude == 1.0;
  double orbit_error = 0.0;
  const RecordObserver orbit_check = [&](std::size_t, double t, const ComplexField& hat) {
    const ComplexField psi = inverse(hat);
    const cplx phase = std::polar(1.0, t);
    for (std::size_t k = 0; k < psi.values().size(); ++k)
      orbit_error = std::max(orbit_error, std::abs(psi.values()[k] - q->values()[k] * phase));
  };

  EvolutionRecord rec;
  json tp;
  std::string csv = io.csv_path().filename().string();
  if (cfg.two_phase) {
    TwoPhaseConfig tc{cfg.evolution, cfg.restart_fraction, cfg.refine};
    const auto res = resume ? resume_two_phase(g, tc, io) : run_two_phase(build_initial_data(cfg.initial, g, q ? &*q : nullptr), tc, io);
    rec = res.combined;
    tp = {{"refined", res.refined}, {"abort_time", number(res.abort_time)}, {"restart_time", number(res.restart_time)},
          {"coarse_records", res.coarse.size()}, {"fine_records", res.fine.size()}};
    if (res.refined) csv = io.stem + "_combined.csv";
    out << "coarse phase: " << to_string(res.coarse.termination) << " at t = " << fmt(res.coarse.times.back(), 8)
        << "\n";
    if (res.refined)
      out << "fine phase:   restart at t = " << fmt(res.restart_time, 8) << ", dt = " << fmt(res.fine.dt, 4) << ", "
          << to_string(res.fine.termination) << " at t = " << fmt(res.fine.times.back(), 8) << "\n";
  } else {
    const RecordObserver obs = orbit ? orbit_check : RecordObserver{};
    rec = resume ? resume_evolution(g, cfg.evolution, io, obs)
                 : evolve(build_initial_data(cfg.initial, g, q ? &*q : nullptr), cfg.evolution, io, obs);
  }

  if (rec.last_good_state.grid().valid())
    write_snapshot(cfg.output_dir / "last_good.ds1", rec.last_good_state, rec.last_good_time);
  const double t_final = rec.times.back();
  write_snapshot(cfg.output_dir / "final.ds1", inverse(rec.final_state), t_final);

  json j;
  j["termination"] = to_string(rec.termination);
  j["m0"] = rec.m0;
  j["dt"] = rec.dt;
  j["records"] = rec.size();
  j["t_final"] = t_final;
  j["last_good_time"] = number(rec.last_good_time);
  j["csv"] = csv;
  j["max_linf"] = *std::max_element(rec.linf.begin(), rec.linf.end());
  double worst_delta = -INFINITY;
  for (double d : rec.delta) worst_delta = std::max(worst_delta, d);
  j["max_delta"] = number(worst_delta);
  if (mass_Q) j["M_Q"] = *mass_Q;
  if (mass_Q) j["mass_ratio"] = rec.m0 / *mass_Q;
  if (orbit && !cfg.two_phase && !resume) j["orbit_error"] = orbit_error;
  if (cfg.two_phase) j["two_phase"] = tp;
  if (rec.size() >= 100) {
    try {
      j["classification"] = to_string(classify(rec));
    } catch (const Undetermined& e) {
      j["classification"] = "undetermined";
    }
  }
  write_text(cfg.output_dir / "evolution.json", j.dump(2));

  out << "termination       " << to_string(rec.termination) << " at t = " << fmt(t_final, 8) << " (" << rec.size()
      << " records)\n"
      << "initial mass      " << fmt(rec.m0, 15);
  if (mass_Q) out << " = " << fmt(rec.m0 / *mass_Q, 4) << " M_Q";
  out << "\n"
      << "max delta         " << fmt(worst_delta, 4) << "\n"
      << "max L-infinity    " << fmt(j["max_linf"].get<double>(), 8) << "\n";
  if (j.contains("orbit_error")) out << "orbit error       " << fmt(orbit_error, 3) << "\n";
  if (j.contains("classification")) out << "classification    " << j["classification"].get<std::string>() << "\n";
  return 0;
}

RunSummary read_run_summary(const fs::path& run_dir) {
  const json j = read_json(run_dir / "evolution.json");
  RunSummary s;
  s.csv = j.at("csv").get<std::string>();
  s.record = read_norms_csv(run_dir / s.csv);
  const std::string term = j.at("termination").get<std::string>();
  for (auto t : {Termination::completed, Termination::delta_abort, Termination::resolution_lost})
    if (to_string(t) == term) s.record.termination = t;
  if (j.contains("orbit_error")) s.orbit_error = j["orbit_error"].get<double>();
  if (j.contains("M_Q")) s.mass_Q = j["M_Q"].get<double>();
  if (j.contains("last_good_time") && !j["last_good_time"].is_null()) s.last_good_time = j["last_good_time"];
  s.record.m0 = j.at("m0").get<double>();
  return s;
}

int cmd_fit(const FitCommandOptions& opt, std::ostream& out) {
  const RunSummary s = read_run_summary(opt.run_dir);
  const auto& rec = s.record;
  std::string cls = "undetermined";
  try {
    cls = to_string(classify(rec));
  } catch (const Undetermined& e) {
    out << e.what() << "\n";
  }
  out << "classification    " << cls << "\n";
  json j;
  j["classification"] = cls;
  if (cls != to_string(Classification::blow_up_suspected) && !opt.force) {
    write_text(opt.run_dir / "fit.json", j.dump(2));
    return 0;
  }
  FitOptions fo;
  fo.window = opt.window;
  fo.delta_cutoff = opt.delta_cutoff;
  for (NormKind kind : {NormKind::linf_psi, NormKind::l2_grad_xi}) {
    const FitReport r = fit_blowup(rec, kind, fo);
    write_text(opt.run_dir / ("fit_" + to_string(kind) + ".json"), to_json(r));
    write_overlay_csv(opt.run_dir / ("overlay_" + to_string(kind) + ".csv"), rec, r);
    j[to_string(kind)] = json::parse(to_json(r));
    out << std::left << std::setw(18) << to_string(kind) << "a = " << fmt(r.a, 4);
    if (kind == NormKind::l2_grad_xi) out << " (squared norm: " << fmt(r.a_squared, 4) << ")";
    out << ", b = " << fmt(r.b, 4) << ", t* = " << fmt(r.t_star, 7) << ", window [" << fmt(r.window.first, 7) << ", "
        << fmt(r.window.second, 7) << "], " << (r.stabilized ? "stabilized" : "not stabilized") << "\n";
    if (kind == NormKind::linf_psi) {
      // L(t) is proportional to 1 / ||Psi||_inf; the constant drops out.
      std::vector<double> t, L;
      for (std::size_t i = 0; i < rec.size(); ++i)
        if (rec.times[i] >= r.window.first && rec.times[i] <= r.window.second) {
          t.push_back(rec.times[i]);
          L.push_back(1.0 / rec.linf[i]);
        }
      try {
        const auto c = compare_rate_laws(t, L, r.t_star);
        j["rate_laws"] = json::parse(to_json(c));
        out << "rate law          " << to_string(c.better) << " (rms linear " << fmt(c.rms_linear, 3) << ", loglog "
            << fmt(c.rms_loglog, 3) << ")\n";
      } catch (const std::domain_error& e) {
        j["rate_laws"] = e.what();
      }
    }
  }
  write_text(opt.run_dir / "fit.json", j.dump(2));
  return 0;
}

int cmd_compare_profile(const fs::path& snapshot, const fs::path& q_path, const fs::path& out_dir,
                        std::ostream& out) {
  Snapshot s = read_snapshot(snapshot);
  if (s.field.is_fourier()) s.field.to_physical();
  const RealField q = load_real(q_path, std::nullopt);
  const ProfileComparison p = compare_profile(s.field, q);
  fs::create_directories(out_dir);
  json j = json::parse(to_json(p));
  j["time"] = s.time;
  j["snapshot"] = snapshot.string();
  j["Q"] = q_path.string();
  write_text(out_dir / "profile.json", j.dump(2));
  write_snapshot(out_dir / "profile_residual.ds1", p.residual, s.time);
  out << "profile at t = " << fmt(s.time, 8) << ": L = " << fmt(p.L, 6) << ", residual fraction "
      << fmt(p.max_residual_fraction, 3) << " over " << p.core_points << " core points"
      << (p.truncated_core ? " (core truncated)" : "") << "\n";
  return 0;
}

int cmd_scenario(const RunConfig& cfg, bool resume, std::ostream& out) {
  out << "== scenario " << cfg.scenario << " -> " << cfg.output_dir.string() << "\n";
  if (cfg.scenario == "selftest") return cmd_selftest(cfg.grid.n_xi, out);

  // Q-based data needs Q on the run grid. The profile comparison of a
  // blow-up only interpolates Q, so other runs borrow the 2^10 Q over 20[-pi, pi].
  RunConfig run = cfg;
  const bool blowup_run = cfg.two_phase;
  std::optional<fs::path> profile_q = cfg.q_file;
  const auto ensure_Q = [&](const GridConfig& grid) -> std::optional<fs::path> {
    const fs::path cached = q_cache_dir() / q_cache_name(grid);
    if (fs::exists(cached)) return cached;
    RunConfig st = cfg;
    st.grid = grid;
    st.output_dir = cfg.output_dir / "stationary";
    if (cmd_stationary(st, out) != 0) return std::nullopt;
    return cached;
  };
  if (!cfg.q_file && needs_Q(cfg)) {
    const auto q = ensure_Q(cfg.grid);
    if (!q) return 1;
    run.q_file = profile_q = *q;
  } else if (!cfg.q_file && blowup_run) {
    profile_q = ensure_Q(GridConfig{1024, 1024, 20.0, 20.0});
    if (!profile_q) return 1;
  }
  if (int rc = cmd_evolve(run, resume, out); rc != 0) return rc;

  const RunSummary s = read_run_summary(cfg.output_dir);
  if (s.record.size() < 100) return 0;
  FitCommandOptions fo;
  fo.run_dir = cfg.output_dir;
  if (int rc = cmd_fit(fo, out); rc != 0) return rc;
  const json fit = read_json(cfg.output_dir / "fit.json");
  if (fit["classification"] == to_string(Classification::blow_up_suspected) && profile_q &&
      fs::exists(cfg.output_dir / "last_good.ds1"))
    return cmd_compare_profile(cfg.output_dir / "last_good.ds1", *profile_q, cfg.output_dir, out);
  return 0;
}

}  // namespace ds1
