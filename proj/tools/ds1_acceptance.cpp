// Acceptance runner: criteria A1-A10, one PASS/FAIL line each.
//
//   ds1_acceptance [--out DIR] [--only A1,A5,...] [--reuse] [--full]
//
// Long runs (A5-A9) write their run directories under DIR (default
// acceptance_runs). With --reuse, a directory whose evolution.json exists and
// whose manifest hash matches is read instead of recomputed. A7 runs the
// reduced 2^10 variant unless --full (2^12, hours on one core) is given.
// Command output goes to DIR/acceptance.log.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <random>
#include <set>
#include <sstream>

#include "ds1/config.hpp"
#include "ds1/diagnostics.hpp"
#include "ds1/evolution.hpp"
#include "ds1/log.hpp"
#include "ds1/runner.hpp"
#include "ds1/singular_ops.hpp"
#include "ds1/snapshot.hpp"
#include "ds1/stationary.hpp"

using namespace ds1;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Pinned tolerances.
constexpr double kA1Tol = 1e-14;
constexpr double kA2Tol = 1e-13;
constexpr double kA3Tol = 1e-13;
constexpr double kA4Residual = 1e-10, kA4Symmetry = 1e-9, kA4TailFit = 0.05;
constexpr double kA5Orbit = 1e-11, kA5MassDrift = 1e-13;
constexpr double kA6MassRatio = 0.65, kA6MassTol = 0.02;
constexpr double kA7AInf = 1.13, kA7AGrad = 2.18;
constexpr double kA7FullLo = 0.95, kA7FullHi = 1.35, kA7GradLo = 1.9, kA7GradHi = 2.5, kA7CiWiden = 0.4;
constexpr double kA7Delta = -14.0;
constexpr double kA8AInfLo = 1.0, kA8AInfHi = 1.5, kA8AGradLo = 2.1, kA8AGradHi = 2.8;
constexpr double kA8TStar = 0.1583, kA8TStarTol = 0.01;
constexpr double kA9Residual = 0.2;
constexpr double kA10Jvp = 1e-7, kA10Cov = 1e-8, kA10Order = 4.0, kA10OrderTol = 0.2;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v, int prec = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", prec, v);
  return buf;
}

std::string fix(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  return json::parse(in);
}

struct Context {
  fs::path out;
  bool reuse = false;
  bool full = false;
  std::ofstream log;

  fs::path dir(const std::string& name) const { return out / name; }

  /// Q from A4 when present, otherwise whatever the runner's cache provides.
  std::optional<fs::path> q_standard() const {
    const fs::path p = out / "A4" / "Q.ds1";
    if (fs::exists(p)) return p;
    const fs::path c = q_cache_dir() / q_cache_name(GridConfig{1024, 1024, 20.0, 20.0});
    if (fs::exists(c)) return c;
    return std::nullopt;
  }

  bool reusable(const RunConfig& cfg) const {
    if (!reuse || !fs::exists(cfg.output_dir / "evolution.json") || !fs::exists(cfg.output_dir / "manifest.json"))
      return false;
    return read_json(cfg.output_dir / "manifest.json").value("config_hash", "") == hex(config_hash(cfg));
  }

  /// Runs (or reuses) an evolution and returns its summary.
  RunSummary evolve(RunConfig cfg) {
    if (!reusable(cfg)) {
      log << "\n== " << cfg.scenario << " -> " << cfg.output_dir.string() << std::endl;
      if (cmd_evolve(cfg, false, log) != 0) throw std::runtime_error("evolve " + cfg.scenario + " failed");
    }
    return read_run_summary(cfg.output_dir);
  }

  RunConfig scenario(const std::string& preset_name, const std::string& dir_name) const {
    RunConfig cfg = preset(preset_name);
    cfg.output_dir = dir(dir_name);
    if (cfg.grid.n_xi == 1024 && cfg.grid.l_xi == 20.0)
      if (auto q = q_standard()) cfg.q_file = *q;
    return cfg;
  }
};

// --- A1-A3 ------------------------------------------------------------------

Outcome selftest_line(std::size_t index, double tol) {
  const SelftestLine l = index < 2 ? selftest_1d(512).at(index) : selftest_2d(512);
  return {l.error <= tol, l.name + ": max error " + sci(l.error) + " (tol " + sci(tol, 0) + ")"};
}

// --- A4 ---------------------------------------------------------------------

Outcome a4(Context& ctx) {
  RunConfig cfg = preset("qorbit");
  cfg.scenario = "A4";
  cfg.output_dir = ctx.dir("A4");
  if (!(ctx.reuse && fs::exists(cfg.output_dir / "stationary.json"))) {
    ctx.log << "\n== stationary -> " << cfg.output_dir.string() << std::endl;
    cmd_stationary(cfg, ctx.log);
  }
  const json j = read_json(cfg.output_dir / "stationary.json");
  const double res = j["residual"], sym = j["symmetry_defect"];
  const double tail = std::max(j["tail_fit_residual"][0].get<double>(), j["tail_fit_residual"][1].get<double>());
  const double qmax = j["max_Q"], q0max = j["max_initial_iterate"];
  const bool ok = res < kA4Residual && sym <= kA4Symmetry && tail < kA4TailFit && qmax > q0max;
  return {ok, "residual " + sci(res) + ", symmetry " + sci(sym) + ", tail fit " + sci(tail) + ", max Q " + fix(qmax) +
                  " vs iterate " + fix(q0max) + ", M_Q " + fix(j["M_Q"].get<double>(), 6)};
}

// --- A5 ---------------------------------------------------------------------

Outcome a5(Context& ctx) {
  const RunSummary s = ctx.evolve(ctx.scenario("qorbit", "A5_qorbit"));
  double drift = 0.0;
  for (double m : s.record.mass) drift = std::max(drift, std::abs(1.0 - m / s.record.m0));
  const double orbit = s.orbit_error.value_or(INFINITY);
  return {orbit <= kA5Orbit && drift <= kA5MassDrift,
          "orbit error " + sci(orbit) + " (tol " + sci(kA5Orbit, 0) + "), mass drift " + sci(drift) + " (tol " +
              sci(kA5MassDrift, 0) + ")"};
}

// --- A6 ---------------------------------------------------------------------

std::string classify_name(const EvolutionRecord& rec) {
  try {
    return to_string(classify(rec));
  } catch (const Undetermined&) {
    return "undetermined";
  }
}

Outcome a6(Context& ctx) {
  bool ok = true;
  std::string detail;
  for (const auto& [name, dir] : {std::pair{"drom09", "A6_drom09"}, {"dromgauss", "A6_dromgauss"}, {"gauss3", "A6_gauss3"}}) {
    const RunSummary s = ctx.evolve(ctx.scenario(name, dir));
    const std::string cls = classify_name(s.record);
    ok = ok && cls == "dispersing";
    detail += std::string(detail.empty() ? "" : "; ") + name + " " + cls;
    if (std::string(name) == "gauss3") {
      const auto q = ctx.q_standard();
      if (!q) return {false, detail + "; no Q for the mass ratio"};
      const RealField Q = to_real(read_snapshot(*q).field, 1e-10);
      const double ratio = s.record.m0 / quadrature_abs2(to_complex(Q));
      ok = ok && std::abs(ratio - kA6MassRatio) <= kA6MassTol;
      detail += " (mass " + fix(ratio, 3) + " M_Q)";
    }
  }
  return {ok, detail};
}

// --- A7-A9 ------------------------------------------------------------------

struct BlowupResult {
  RunSummary summary;
  FitReport linf, grad;
  fs::path dir;
  std::optional<double> restart_time;
};

BlowupResult blowup(Context& ctx, const std::string& preset_name, const std::string& dir_name) {
  RunConfig cfg = ctx.scenario(preset_name, dir_name);
  BlowupResult r;
  r.dir = cfg.output_dir;
  r.summary = ctx.evolve(cfg);
  const json ev = read_json(cfg.output_dir / "evolution.json");
  if (ev.contains("two_phase") && ev["two_phase"].value("refined", false))
    r.restart_time = ev["two_phase"]["restart_time"].get<double>();
  r.linf = fit_blowup(r.summary.record, NormKind::linf_psi);
  r.grad = fit_blowup(r.summary.record, NormKind::l2_grad_xi);
  return r;
}

std::string fit_text(const FitReport& f) {
  return "a " + fix(f.a_quoted(), 3) + (f.stabilized ? "" : " (unstabilized)") + ", t* " + fix(f.t_star, 4);
}

Outcome a7(Context& ctx, std::optional<BlowupResult>& keep) {
  const bool full = ctx.full;
  BlowupResult r;
  try {
    r = blowup(ctx, full ? "drom11" : "drom11_ci", full ? "A7_drom11" : "A7_drom11_ci");
  } catch (const std::exception& e) {
    return {false, std::string(full ? "2^12: " : "2^10 variant: ") + e.what()};
  }
  keep = r;
  const double lo = full ? kA7FullLo : kA7AInf - kA7CiWiden, hi = full ? kA7FullHi : kA7AInf + kA7CiWiden;
  const double glo = full ? kA7GradLo : kA7AGrad - kA7CiWiden, ghi = full ? kA7GradHi : kA7AGrad + kA7CiWiden;
  // "Near-critical": everything before the fine phase (or before the linf fit window).
  const double t_near = r.restart_time.value_or(r.linf.window.first);
  double worst = -INFINITY;
  const auto& rec = r.summary.record;
  for (std::size_t i = 0; i < rec.size(); ++i)
    if (rec.times[i] < t_near) worst = std::max(worst, rec.delta[i]);
  const double a = r.linf.a_quoted(), g = r.grad.a_quoted();
  const bool ok = a >= lo && a <= hi && g >= glo && g <= ghi && r.linf.stabilized && r.grad.stabilized &&
                  worst <= kA7Delta;
  return {ok, std::string(full ? "2^12" : "2^10 variant") + ": linf " + fit_text(r.linf) + " in [" + fix(lo, 2) +
                  ", " + fix(hi, 2) + "], grad^2 " + fit_text(r.grad) + " in [" + fix(glo, 2) + ", " + fix(ghi, 2) +
                  "], max Delta before t = " + fix(t_near, 4) + ": " + fix(worst, 2)};
}

Outcome a8(Context& ctx, std::optional<BlowupResult>& keep) {
  BlowupResult r;
  try {
    r = blowup(ctx, "gauss45", "A8_gauss45");
  } catch (const std::exception& e) {
    return {false, e.what()};
  }
  keep = r;
  const double a = r.linf.a_quoted(), g = r.grad.a_quoted();
  const bool ok = a >= kA8AInfLo && a <= kA8AInfHi && g >= kA8AGradLo && g <= kA8AGradHi &&
                  std::abs(r.linf.t_star - kA8TStar) <= kA8TStarTol;
  return {ok, "linf " + fit_text(r.linf) + ", grad^2 " + fit_text(r.grad) + ", |t* - " + fix(kA8TStar, 4) +
                  "| = " + fix(std::abs(r.linf.t_star - kA8TStar), 4) + " (tol " + fix(kA8TStarTol, 2) + ")"};
}

Outcome a9(Context& ctx, const std::optional<BlowupResult>& a7r, const std::optional<BlowupResult>& a8r) {
  const auto q = ctx.q_standard();
  if (!q) return {false, "no Q available"};
  bool ok = true;
  std::string detail;
  for (const auto* r : {&a7r, &a8r}) {
    if (!*r) {
      ok = false;
      detail += std::string(detail.empty() ? "" : "; ") + "run missing";
      continue;
    }
    const fs::path snap = (*r)->dir / "last_good.ds1";
    if (cmd_compare_profile(snap, *q, (*r)->dir, ctx.log) != 0) throw std::runtime_error("compare-profile failed");
    const json p = read_json((*r)->dir / "profile.json");
    const double frac = p["max_residual_fraction"];
    ok = ok && frac <= kA9Residual && !p["truncated_core"].get<bool>();
    detail += std::string(detail.empty() ? "" : "; ") + (*r)->dir.filename().string() + " residual " + fix(frac, 3) +
              " at t = " + fix(p["time"].get<double>(), 4) + ", L = " + sci(p["L"].get<double>());
  }
  return {ok, detail + " (tol " + fix(kA9Residual, 2) + ")"};
}

// --- A10 --------------------------------------------------------------------

double max_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double e = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) e = std::max(e, std::abs(a[k] - b[k]));
  return e;
}

ComplexField sampled(const SpectralGrid& g, const std::function<cplx(double, double)>& f) {
  ComplexField out(g, Representation::physical);
  for (std::size_t i = 0; i < g.n_xi(); ++i)
    for (std::size_t j = 0; j < g.n_eta(); ++j) out(i, j) = f(g.xi_points()[i], g.eta_points()[j]);
  return out;
}

cplx lopsided(double x, double y) {
  return 1.8 * std::exp(-x * x - 1.5 * y * y) * (1.0 + 0.3 * x - 0.2 * y * x) * std::cos(0.4 * y);
}

ComplexField run_to(const ComplexField& psi0, double t, std::size_t steps) {
  EvolutionConfig cfg;
  cfg.t_max = t;
  cfg.n_steps = steps;
  cfg.record_every = steps;
  cfg.record_energy = false;
  return inverse(evolve(psi0, cfg).final_state);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome a10(Context& ctx) {
  std::vector<std::string> failed;
  std::string detail;
  const auto note = [&](const std::string& name, bool ok, const std::string& value) {
    if (!ok) failed.push_back(name);
    detail += (detail.empty() ? "" : ", ") + name + " " + value;
  };
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr cplx I{0.0, 1.0};

  {  // transform round trip and Parseval
    const auto g = make_grid(64, 128, 3.0, 5.0);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    ComplexField f(g, Representation::physical);
    for (auto& v : f.values()) v = {nd(rng), nd(rng)};
    const ComplexField F = forward(f);
    const double rt = max_diff(inverse(F).values(), f.values()) / max_abs(f.values());
    double s = 0.0;
    for (const auto& c : F.values()) s += std::norm(c);
    s /= (2 * M_PI * 3.0) * (2 * M_PI * 5.0);
    const double q = quadrature_abs2(f);
    note("round trip", rt <= 10 * eps, sci(rt / eps, 1) + " eps");
    note("Parseval", std::abs(s - q) / q <= 1e-12, sci(std::abs(s - q) / q));
  }
  {  // derivative of the antiderivative, and the boundary-value law
    const auto g = make_grid(256, 256, 8.0, 8.0);
    const ComplexField f = derivative(sampled(g, [](double x, double y) { return lopsided(x, y); }), Axis::xi);
    const double e = max_diff(derivative(antiderivative(f, Axis::xi), Axis::xi).values(), f.values()) /
                     max_abs(f.values());
    note("d(d^-1 f)", e <= 1e-12, sci(e));
    const std::size_t n = 512;
    const double l = 10.0;
    std::vector<double> x(n), h(n);
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = l * (-M_PI + 2 * M_PI * static_cast<double>(j) / static_cast<double>(n));
      h[j] = std::exp(-x[j] * x[j]);
    }
    const auto H = antiderivative_line(h, l);
    const double half = 0.5 * std::sqrt(M_PI);
    const double bv = std::max(std::abs(H.front() + half), std::abs(H.back() - half));
    note("boundary law", bv <= 1e-13, sci(bv));
  }
  {  // Jacobian-vector product against central differences
    const auto g = make_grid(128, 128, 8.0, 8.0);
    const RealField q = gaussian(g, 2.0);
    const RealField v = to_real(sampled(g, [](double x, double y) { return lopsided(y, x); }));
    const double h = 1e-5;
    RealField qp = q, qm = q;
    for (std::size_t k = 0; k < q.values().size(); ++k) {
      qp.values()[k] += h * v.values()[k];
      qm.values()[k] -= h * v.values()[k];
    }
    const RealField fp = residual_F(qp, 1.0), fm = residual_F(qm, 1.0);
    const RealField jv = jacobian_vector_product(q, v, 1.0);
    double e = 0.0;
    for (std::size_t k = 0; k < jv.values().size(); ++k)
      e = std::max(e, std::abs((fp.values()[k] - fm.values()[k]) / (2 * h) - jv.values()[k]));
    e /= max_abs(jv.values());
    note("JVP", e <= kA10Jvp, sci(e));
  }
  if (const auto qp = ctx.q_standard()) {  // translation zero modes
    const RealField q = to_real(read_snapshot(*qp).field, 1e-10);
    double worst = 0.0;
    for (Axis a : {Axis::xi, Axis::eta}) {
      const RealField dq = derivative(q, a);
      const double scale = max_abs(jacobian_vector_product(RealField(q.grid()), dq, 1.0).values());
      worst = std::max(worst, max_abs(jacobian_vector_product(q, dq, 1.0).values()) / scale);
    }
    note("zero modes", worst <= 1e-6, sci(worst));
  } else {
    note("zero modes", false, "no Q");
  }
  {  // temporal order
    const auto g = make_grid(128, 128, 4.0, 4.0);
    const ComplexField psi0 = sampled(g, [](double x, double y) { return 2.0 * std::exp(-x * x - y * y); });
    const ComplexField ref = run_to(psi0, 0.4, 640);
    const double e1 = max_diff(run_to(psi0, 0.4, 20).values(), ref.values());
    const double e2 = max_diff(run_to(psi0, 0.4, 40).values(), ref.values());
    const double order = std::log2(e1 / e2);
    note("order", std::abs(order - kA10Order) <= kA10OrderTol, fix(order, 2));
  }
  {  // Galilei
    const auto g = make_grid(256, 256, 8.0, 8.0);
    const double v = 0.5, t = 0.1;
    const ComplexField psi0 = sampled(g, lopsided);
    ComplexField boosted0 = psi0;
    for (std::size_t i = 0; i < g.n_xi(); ++i)
      for (std::size_t j = 0; j < g.n_eta(); ++j)
        boosted0(i, j) *= std::exp(I * v * (g.xi_points()[i] + g.eta_points()[j]) / 4.0);
    ComplexField shifted = forward(run_to(psi0, t, 100));
    for (std::size_t p = 0; p < g.n_xi(); ++p)
      for (std::size_t q = 0; q < g.n_eta(); ++q) shifted(p, q) *= std::exp(-I * v * t * (g.k_xi()[p] + g.k_eta()[q]));
    shifted.to_physical();
    for (std::size_t i = 0; i < g.n_xi(); ++i)
      for (std::size_t j = 0; j < g.n_eta(); ++j)
        shifted(i, j) *= std::exp(I * v * (g.xi_points()[i] + g.eta_points()[j] - t * v) / 4.0);
    const double e = max_diff(run_to(boosted0, t, 100).values(), shifted.values());
    note("Galilei", e <= kA10Cov, sci(e));
  }
  {  // scaling, lambda = 2
    const auto ga = make_grid(128, 128, 6.0, 6.0), gb = make_grid(128, 128, 3.0, 3.0);
    const ComplexField a0 = sampled(ga, lopsided);
    ComplexField b0(gb, Representation::physical);
    for (std::size_t k = 0; k < b0.values().size(); ++k) b0.values()[k] = 2.0 * a0.values()[k];
    const ComplexField a = run_to(a0, 0.2, 80), b = run_to(b0, 0.05, 80);
    double e = 0.0;
    for (std::size_t k = 0; k < a.values().size(); ++k) e = std::max(e, std::abs(b.values()[k] - 2.0 * a.values()[k]));
    note("scaling", e <= kA10Cov, sci(e));
  }
  {  // determinism and resume
    const auto g = make_grid(64, 64, 6.0, 6.0);
    const ComplexField psi0 = sampled(g, lopsided);
    EvolutionConfig cfg;
    cfg.t_max = 0.2;
    cfg.n_steps = 40;
    cfg.record_every = 5;
    cfg.checkpoint_every = 10;
    cfg.snapshot_times = {0.1, 0.2};
    const fs::path base = ctx.dir("A10_resume");
    fs::remove_all(base);
    const EvolutionIO a{base / "a", "run", 1}, b{base / "b", "run", 1}, c{base / "c", "run", 1};
    const auto ra = evolve(psi0, cfg, a);
    const auto rb = evolve(psi0, cfg, b);
    struct Interrupt {};
    const RecordObserver stop = [](std::size_t step, double, const ComplexField&) {
      if (step == 25) throw Interrupt{};
    };
    try {
      evolve(psi0, cfg, c, stop);
    } catch (const Interrupt&) {
    }
    const auto rc = resume_evolution(g, cfg, c);
    const auto same = [](const EvolutionRecord& x, const EvolutionRecord& y, const EvolutionIO& ix,
                         const EvolutionIO& iy) {
      const auto& u = x.final_state.values();
      const auto& w = y.final_state.values();
      bool ok = u.size() == w.size() && std::memcmp(u.data(), w.data(), u.size() * sizeof(cplx)) == 0;
      ok = ok && slurp(ix.csv_path()) == slurp(iy.csv_path());
      for (std::size_t i = 0; i < 2; ++i) ok = ok && slurp(ix.snapshot_path(i)) == slurp(iy.snapshot_path(i));
      return ok;
    };
    note("determinism", same(ra, rb, a, b), same(ra, rb, a, b) ? "bitwise" : "differs");
    note("resume", same(ra, rc, a, c), same(ra, rc, a, c) ? "bitwise" : "differs");
    fs::remove_all(base);
  }
  if (!failed.empty()) {
    std::string f;
    for (const auto& s : failed) f += (f.empty() ? "" : ", ") + s;
    detail = "failed: " + f + ". " + detail;
  }
  return {failed.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria A1-A10"};
  fs::path out = "acceptance_runs";
  std::string only;
  Context ctx;
  app.add_option("--out", out, "Directory for run outputs and the log");
  app.add_option("--only", only, "Comma-separated subset, e.g. A1,A2,A10");
  app.add_flag("--reuse", ctx.reuse, "Reuse finished run directories with a matching configuration hash");
  app.add_flag("--full", ctx.full, "Run A7 on the 2^12 grid instead of the reduced 2^10 variant");
  CLI11_PARSE(app, argc, argv);
  use_default_fft_wisdom();

  std::set<std::string> selected;
  std::stringstream ss(only);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) selected.insert(item);
  const auto wanted = [&](const std::string& id) { return selected.empty() || selected.count(id) > 0; };

  fs::create_directories(out);
  ctx.out = out;
  ctx.log.open(out / "acceptance.log", std::ios::app);
  set_warning_handler([&](const std::string& m) { ctx.log << "warning: " << m << std::endl; });

  std::optional<BlowupResult> a7r, a8r;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"A1", [] { return selftest_line(0, kA1Tol); }},
      {"A2", [] { return selftest_line(1, kA2Tol); }},
      {"A3", [] { return selftest_line(2, kA3Tol); }},
      {"A4", [&] { return a4(ctx); }},
      {"A5", [&] { return a5(ctx); }},
      {"A6", [&] { return a6(ctx); }},
      {"A7", [&] { return a7(ctx, a7r); }},
      {"A8", [&] { return a8(ctx, a8r); }},
      {"A9",
       [&] {
         // A9 needs the blow-up runs; reuse them when A7/A8 were not selected.
         const bool was_reuse = ctx.reuse;
         ctx.reuse = true;
         if (!a7r) a7(ctx, a7r);
         if (!a8r) a8(ctx, a8r);
         ctx.reuse = was_reuse;
         return a9(ctx, a7r, a8r);
       }},
      {"A10", [&] { return a10(ctx); }},
  };

  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    if (!wanted(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%-4s %s  %s [%.1f s]\n", id.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
