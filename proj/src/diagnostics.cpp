#include "ds1/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "ds1/interpolation.hpp"
#include "ds1/nelder_mead.hpp"

namespace ds1 {

std::string to_string(Classification c) {
  switch (c) {
    case Classification::dispersing: return "dispersing";
    case Classification::blow_up_suspected: return "blow_up_suspected";
    case Classification::stationary: return "stationary";
  }
  return "unknown";
}

std::string to_string(NormKind k) { return k == NormKind::linf_psi ? "linf_psi" : "l2_grad_xi"; }

NormKind norm_kind_from_string(const std::string& s) {
  if (s == "linf_psi") return NormKind::linf_psi;
  if (s == "l2_grad_xi") return NormKind::l2_grad_xi;
  throw std::invalid_argument("unknown norm kind: " + s);
}

std::string to_string(RateLaw r) { return r == RateLaw::linear ? "linear" : "loglog"; }

namespace {

double ls_slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

const std::vector<double>& series(const EvolutionRecord& rec, NormKind kind) {
  return kind == NormKind::linf_psi ? rec.linf : rec.l2_grad_xi;
}

}  // namespace

Classification classify(const EvolutionRecord& rec) {
  const std::size_t n = rec.size();
  if (n < 100) throw std::invalid_argument("classify: at least 100 records are needed");
  const auto& linf = rec.linf;
  const auto [lo, hi] = std::minmax_element(linf.begin(), linf.end());
  if ((*hi - *lo) < 1e-6 * *hi) return Classification::stationary;
  if (rec.termination != Termination::completed && *hi >= 10.0 * linf.front())
    return Classification::blow_up_suspected;
  if (rec.termination == Termination::completed) {
    const std::size_t start = n - n / 3;
    const std::span<const double> t(rec.times.data() + start, n - start);
    const std::span<const double> y(linf.data() + start, n - start);
    if (ls_slope(t, y) < 0.0) return Classification::dispersing;
  }
  throw Undetermined("classify: neither stationary, dispersing nor a clear blow-up (termination " +
                     to_string(rec.termination) + ", max/initial L-infinity ratio " +
                     std::to_string(*hi / linf.front()) + ")");
}

FitSweepEntry fit_power_law(std::span<const double> t, std::span<const double> norm) {
  const std::size_t n = t.size();
  if (n < 4 || norm.size() != n) throw FitError("fit_power_law: need at least four points");
  const double t_lo = t.front(), t_hi = t.back();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(norm[i] > 0.0) || !std::isfinite(norm[i])) throw FitError("fit_power_law: norms must be positive");
    y[i] = std::log(norm[i]);
  }
  const auto objective = [&](const std::vector<double>& p) {
    const double a = p[0], b = p[1], ts = p[2];
    if (!(ts > t_hi)) return HUGE_VAL;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] + a * std::log(ts - t[i]) - b;
      s += r * r;
    }
    return s;
  };

  const double span = t_hi - t_lo;
  const double ts0 = t_hi + 0.1 * span;
  const double a0 = 1.0;
  const double b0 = y.back() + a0 * std::log(ts0 - t_hi);
  std::vector<double> step{0.1, 0.1 * std::max(1.0, std::abs(b0)), 0.05 * span};
  NelderMeadOptions nm;
  nm.f_tol = 1e-15;
  nm.x_tol = 1e-13;
  auto r = nelder_mead(objective, {a0, b0, ts0}, step, nm);
  // Polish by restarting from the optimum; once more from a perturbed simplex
  // when the blow-up time sits on the window edge.
  for (int pass = 0; pass < 3; ++pass) {
    const bool edge = r.x[2] - t_hi < 1e-6 * span;
    std::vector<double> start = r.x;
    if (edge) start[2] = t_hi + 0.05 * span;
    const std::vector<double> s2{0.05 * std::max(0.1, std::abs(start[0])), 0.05 * std::max(1.0, std::abs(start[1])),
                                 std::max(0.5 * (start[2] - t_hi), 1e-3 * span)};
    auto again = nelder_mead(objective, start, s2, nm);
    if (again.f <= r.f) r = again;
  }
  if (!r.converged) throw FitError("fit_power_law: simplex did not converge");
  FitSweepEntry e;
  e.a = r.x[0];
  e.b = r.x[1];
  e.t_star = r.x[2];
  e.rms_residual = std::sqrt(r.f / static_cast<double>(n));
  return e;
}

FitReport fit_blowup(const EvolutionRecord& rec, NormKind kind, const FitOptions& opt) {
  const auto& y = series(rec, kind);
  // Rows up to the last one whose mass defect is still below the cutoff.
  std::size_t cut = 0;
  bool any = false;
  for (std::size_t i = 0; i < rec.size(); ++i)
    if (rec.delta[i] <= opt.delta_cutoff && std::isfinite(y[i]) && y[i] > 0.0) {
      cut = i + 1;
      any = true;
    }
  if (!any) throw FitError("fit_blowup: no records pass the mass-conservation cutoff");

  FitReport rep;
  rep.norm_kind = kind;
  const auto fit_rows = [&](std::size_t first, std::size_t last, double fraction) {
    FitSweepEntry e = fit_power_law(std::span<const double>(rec.times.data() + first, last - first),
                                    std::span<const double>(y.data() + first, last - first));
    e.fraction = fraction;
    return e;
  };

  if (opt.window) {
    const auto [lo, hi] = *opt.window;
    std::size_t first = cut, last = 0;
    for (std::size_t i = 0; i < cut; ++i)
      if (rec.times[i] >= lo && rec.times[i] <= hi) {
        first = std::min(first, i);
        last = i + 1;
      }
    if (first >= last) throw FitError("fit_blowup: empty window");
    const auto e = fit_rows(first, last, 0.0);
    rep.sweep.push_back(e);
    rep.a = e.a;
    rep.b = e.b;
    rep.t_star = e.t_star;
    rep.rms_residual = e.rms_residual;
    rep.window = {rec.times[first], rec.times[last - 1]};
    rep.points = last - first;
    rep.stabilized = true;
  } else {
    std::vector<double> fractions = opt.fractions;
    if (std::find(fractions.begin(), fractions.end(), opt.report_fraction) == fractions.end())
      fractions.push_back(opt.report_fraction);
    std::sort(fractions.begin(), fractions.end());
    std::size_t reported = 0;
    for (std::size_t k = 0; k < fractions.size(); ++k) {
      const std::size_t len =
          std::min(cut, std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(fractions[k] * cut))));
      rep.sweep.push_back(fit_rows(cut - len, cut, fractions[k]));
      if (fractions[k] == opt.report_fraction) {
        reported = k;
        rep.window = {rec.times[cut - len], rec.times[cut - 1]};
        rep.points = len;
      }
    }
    const auto& e = rep.sweep[reported];
    rep.a = e.a;
    rep.b = e.b;
    rep.t_star = e.t_star;
    rep.rms_residual = e.rms_residual;
    // Stable when the reported window and its neighbours in the sweep agree.
    const std::size_t lo = reported == 0 ? 0 : reported - 1;
    const std::size_t hi = std::min(rep.sweep.size() - 1, reported + 1);
    double amin = e.a, amax = e.a;
    for (std::size_t k = lo; k <= hi; ++k) {
      amin = std::min(amin, rep.sweep[k].a);
      amax = std::max(amax, rep.sweep[k].a);
    }
    rep.stabilized = amax - amin < opt.stabilize_tol;
  }
  rep.a_squared = 2.0 * rep.a;
  rep.b_squared = 2.0 * rep.b;
  return rep;
}

std::vector<double> loglog_rate(std::span<const double> t, double t_star) {
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double s = t_star - t[i];
    if (!(s > 0.0)) throw std::domain_error("loglog_rate: t must be smaller than t*");
    const double d = std::log(std::abs(std::log(s)));
    if (!(d > 0.0)) throw std::domain_error("loglog_rate: ln|ln(t* - t)| must be positive");
    out[i] = std::sqrt(s / d);
  }
  return out;
}

RateLawComparison compare_rate_laws(std::span<const double> t, std::span<const double> L, double t_star) {
  std::vector<double> lin, ll, obs;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double s = t_star - t[i];
    if (!(s > 0.0) || !(L[i] > 0.0)) continue;
    if (!(std::log(std::abs(std::log(s))) > 0.0)) continue;
    obs.push_back(std::log(L[i]));
    lin.push_back(std::log(s));
    ll.push_back(std::log(loglog_rate(std::span<const double>(&t[i], 1), t_star)[0]));
  }
  if (obs.size() < 2) throw std::domain_error("compare_rate_laws: too few points inside the domain of both laws");
  const auto rms = [&](const std::vector<double>& model) {
    double c = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) c += obs[i] - model[i];
    c /= static_cast<double>(obs.size());
    double s = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) s += std::pow(obs[i] - model[i] - c, 2);
    return std::sqrt(s / static_cast<double>(obs.size()));
  };
  RateLawComparison r;
  r.points = obs.size();
  r.rms_linear = rms(lin);
  r.rms_loglog = rms(ll);
  r.better = r.rms_loglog < r.rms_linear ? RateLaw::loglog : RateLaw::linear;
  return r;
}

ProfileComparison compare_profile(const ComplexField& psi_in, const RealField& q) {
  const ComplexField psi = psi_in.is_physical() ? psi_in : inverse(psi_in);
  const auto& g = psi.grid();
  RealField mod(g);
  for (std::size_t k = 0; k < mod.values().size(); ++k) mod.values()[k] = std::abs(psi.values()[k]);
  const Extremum pm = locate_maximum(mod);
  const Extremum qm = locate_maximum(q);
  if (!(pm.value > 0.0) || !(qm.value > 0.0)) throw std::invalid_argument("compare_profile: zero field");

  ProfileComparison out;
  out.L = qm.value / pm.value;
  out.center_xi = pm.x;
  out.center_eta = pm.y;

  // Bounding box of the region where the model is evaluated.
  const std::size_t nx = g.n_xi(), ny = g.n_eta();
  std::size_t i0 = nx, i1 = 0, j0 = ny, j1 = 0;
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      if (mod(i, j) >= 1e-3 * pm.value) {
        i0 = std::min(i0, i);
        i1 = std::max(i1, i);
        j0 = std::min(j0, j);
        j1 = std::max(j1, j);
      }
  const auto xs = g.xi_points();
  const auto ys = g.eta_points();
  std::vector<double> X, Y;
  for (std::size_t i = i0; i <= i1; ++i) X.push_back(qm.x + (xs[i] - pm.x) / out.L);
  for (std::size_t j = j0; j <= j1; ++j) Y.push_back(qm.y + (ys[j] - pm.y) / out.L);
  const TrigInterpolant qi(q);
  const auto model = qi.on_tensor(X, Y, true);
  const double xlim = q.grid().l_xi() * M_PI, ylim = q.grid().l_eta() * M_PI;

  out.residual = mod;
  const std::size_t w = j1 - j0 + 1;
  double worst = 0.0;
  for (std::size_t i = i0; i <= i1; ++i)
    for (std::size_t j = j0; j <= j1; ++j) {
      const double m = model[(i - i0) * w + (j - j0)] / out.L;
      out.residual(i, j) = mod(i, j) - m;
      if (mod(i, j) >= 0.1 * pm.value) {
        ++out.core_points;
        worst = std::max(worst, std::abs(out.residual(i, j)));
        if (std::abs(X[i - i0]) >= xlim || std::abs(Y[j - j0]) >= ylim) out.truncated_core = true;
      }
    }
  out.max_residual_fraction = worst / (qm.value / out.L);
  return out;
}

namespace {

nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

std::string to_json(const FitReport& r) {
  nlohmann::json j;
  j["norm_kind"] = to_string(r.norm_kind);
  j["model"] = "ln N = -a ln(t* - t) + b";
  j["a"] = number(r.a);
  j["b"] = number(r.b);
  j["t_star"] = number(r.t_star);
  j["a_squared_norm"] = number(r.a_squared);
  j["b_squared_norm"] = number(r.b_squared);
  j["window"] = {number(r.window.first), number(r.window.second)};
  j["points"] = r.points;
  j["rms_residual"] = number(r.rms_residual);
  j["stabilized"] = r.stabilized;
  auto& sw = j["sweep"] = nlohmann::json::array();
  for (const auto& e : r.sweep)
    sw.push_back({{"fraction", e.fraction},
                  {"a", number(e.a)},
                  {"b", number(e.b)},
                  {"t_star", number(e.t_star)},
                  {"rms_residual", number(e.rms_residual)}});
  return j.dump(2);
}

std::string to_json(const ProfileComparison& p) {
  nlohmann::json j;
  j["L"] = number(p.L);
  j["max_residual_fraction"] = number(p.max_residual_fraction);
  j["center"] = {number(p.center_xi), number(p.center_eta)};
  j["core_points"] = p.core_points;
  j["truncated_core"] = p.truncated_core;
  return j.dump(2);
}

std::string to_json(const RateLawComparison& c) {
  nlohmann::json j;
  j["better"] = to_string(c.better);
  j["rms_linear"] = number(c.rms_linear);
  j["rms_loglog"] = number(c.rms_loglog);
  j["points"] = c.points;
  return j.dump(2);
}

void write_overlay_csv(const std::filesystem::path& path, const EvolutionRecord& rec, const FitReport& fit) {
  const auto& y = series(rec, fit.norm_kind);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < rec.size(); ++i)
    if (rec.times[i] >= fit.window.first && rec.times[i] <= fit.window.second) rows.push_back(i);

  // The loglog curve is -ln(rate) + c with c fitted over the window.
  std::vector<double> ll(rows.size(), std::numeric_limits<double>::quiet_NaN());
  double c = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double s = fit.t_star - rec.times[rows[k]];
    if (s > 0.0 && std::log(std::abs(std::log(s))) > 0.0) {
      ll[k] = -0.5 * (std::log(s) - std::log(std::log(std::abs(std::log(s)))));
      c += std::log(y[rows[k]]) - ll[k];
      ++used;
    }
  }
  if (used > 0) c /= static_cast<double>(used);

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "t,norm,fit,loglog\n";
  char buf[128];
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double t = rec.times[rows[k]];
    const double f = std::exp(-fit.a * std::log(fit.t_star - t) + fit.b);
    const double l = std::isnan(ll[k]) ? ll[k] : std::exp(ll[k] + c);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", t, y[rows[k]], f, l);
    out << buf;
  }
}

}  // namespace ds1
