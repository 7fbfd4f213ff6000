#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>

#include "ds1/diagnostics.hpp"
#include "ds1/nelder_mead.hpp"
#include "ds1/reference.hpp"

using namespace ds1;

namespace {

EvolutionRecord synthetic(std::size_t n, double t_end, const std::function<double(double)>& linf,
                          Termination term = Termination::completed) {
  EvolutionRecord r;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t_end * static_cast<double>(i) / static_cast<double>(n - 1);
    r.times.push_back(t);
    r.linf.push_back(linf(t));
    r.l2_grad_xi.push_back(linf(t) * linf(t));
    r.l2_grad_eta.push_back(1.0);
    r.mass.push_back(1.0);
    r.energy.push_back(0.0);
    r.delta.push_back(i == 0 ? -INFINITY : -15.0);
  }
  r.termination = term;
  return r;
}

}  // namespace

TEST_CASE("nelder-mead minimizes the Rosenbrock function") {
  const auto rosen = [](const std::vector<double>& x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  const auto r = nelder_mead(rosen, {-1.2, 1.0}, {0.1, 0.1});
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("power-law fits recover exponent and blow-up time from noisy data") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> noise(0.0, 1e-3);
  for (double a : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    const double ts = 0.75, b = 0.4;
    std::vector<double> t, y;
    for (int i = 0; i < 2000; ++i) {
      const double ti = 0.5 * ts + (0.999 * ts - 0.5 * ts) * i / 1999.0;
      t.push_back(ti);
      y.push_back(std::exp(-a * std::log(ts - ti) + b + noise(rng)));
    }
    const auto e = fit_power_law(t, y);
    CAPTURE(a);
    CHECK(std::abs(e.a - a) <= 0.02);
    CHECK(std::abs(e.t_star - ts) <= 1e-3 * ts);
    CHECK(e.rms_residual == doctest::Approx(1e-3).epsilon(0.1));
  }
}

TEST_CASE("fit_blowup sweeps windows and reports the squared-norm exponent") {
  const double ts = 0.2;
  auto rec = synthetic(3000, 0.198, [&](double t) { return 3.0 * std::pow(ts - t, -1.0); },
                       Termination::delta_abort);
  // Trailing rows past the mass cutoff are ignored.
  rec.times.push_back(0.1985);
  rec.linf.push_back(1e6);
  rec.l2_grad_xi.push_back(1e6);
  rec.l2_grad_eta.push_back(1.0);
  rec.mass.push_back(1.0);
  rec.energy.push_back(0.0);
  rec.delta.push_back(-2.0);

  const auto f = fit_blowup(rec, NormKind::linf_psi);
  CHECK(f.a == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(f.t_star == doctest::Approx(ts).epsilon(1e-8));
  CHECK(f.b == doctest::Approx(std::log(3.0)).epsilon(1e-6));
  CHECK(f.stabilized);
  CHECK(f.sweep.size() == 4);
  CHECK(f.window.second == rec.times[2999]);
  CHECK(f.points == 750);
  CHECK(f.t_star > f.window.second);

  const auto g = fit_blowup(rec, NormKind::l2_grad_xi);
  CHECK(g.a == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(g.a_squared == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(g.a_quoted() == g.a_squared);
  CHECK(f.a_quoted() == f.a);

  FitOptions opt;
  opt.window = std::make_pair(0.1, 0.15);
  const auto w = fit_blowup(rec, NormKind::linf_psi, opt);
  CHECK(w.window.first >= 0.1);
  CHECK(w.window.second <= 0.15);
  CHECK(w.a == doctest::Approx(1.0).epsilon(1e-5));

  auto bad = rec;
  for (double& d : bad.delta) d = -1.0;
  CHECK_THROWS_AS(fit_blowup(bad, NormKind::linf_psi), FitError);
}

TEST_CASE("an unstable exponent is flagged") {
  // Exponent drifting with the window: a(t) grows towards the end.
  auto rec = synthetic(2000, 0.95, [](double t) { return std::exp(40.0 * t * t) / std::sqrt(1.0 - t); },
                       Termination::delta_abort);
  const auto f = fit_blowup(rec, NormKind::linf_psi);
  CHECK_FALSE(f.stabilized);
}

TEST_CASE("loglog rate") {
  const double s = std::exp(-std::exp(1.0));
  const std::vector<double> t{1.0 - s};
  CHECK(loglog_rate(t, 1.0)[0] == doctest::Approx(std::sqrt(s)).epsilon(1e-12));
  const std::vector<double> late{1.0};
  CHECK_THROWS_AS(loglog_rate(late, 1.0), std::domain_error);
  const std::vector<double> early{0.0};  // ln|ln 1| = -inf
  CHECK_THROWS_AS(loglog_rate(early, 1.0), std::domain_error);
}

TEST_CASE("rate-law comparison picks the generating law") {
  const double ts = 0.5;
  std::vector<double> t;
  for (int i = 0; i < 400; ++i) t.push_back(ts - 1e-2 * std::pow(1e-3, i / 399.0));
  const auto ll = loglog_rate(t, ts);
  std::vector<double> lin(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) lin[i] = 0.7 * (ts - t[i]);
  CHECK(compare_rate_laws(t, ll, ts).better == RateLaw::loglog);
  const auto c = compare_rate_laws(t, lin, ts);
  CHECK(c.better == RateLaw::linear);
  CHECK(c.rms_linear <= 1e-12);
  CHECK(c.points == 400);
}

TEST_CASE("classification") {
  CHECK(classify(synthetic(200, 1.0, [](double) { return 1.85; })) == Classification::stationary);
  CHECK(classify(synthetic(200, 5.0, [](double t) { return 2.0 / (1.0 + t); })) == Classification::dispersing);
  // Initial growth, then decay in the last third.
  CHECK(classify(synthetic(300, 1.0, [](double t) { return 3.0 + std::sin(3.0 * t); })) ==
        Classification::dispersing);
  const auto blow = synthetic(300, 0.15, [](double t) { return 1.0 / (0.16 - t); }, Termination::delta_abort);
  CHECK(classify(blow) == Classification::blow_up_suspected);
  CHECK_THROWS_AS(classify(synthetic(300, 1.0, [](double t) { return 1.0 + t; })), Undetermined);
  CHECK_THROWS_AS(classify(synthetic(50, 1.0, [](double) { return 1.0; })), std::invalid_argument);

  auto scaled = blow;
  for (double& v : scaled.linf) v *= 1e-3;
  CHECK(classify(scaled) == Classification::blow_up_suspected);
  auto scaled_d = synthetic(200, 5.0, [](double t) { return 7e4 * 2.0 / (1.0 + t); });
  CHECK(classify(scaled_d) == Classification::dispersing);
}

TEST_CASE("profile comparison against a rescaled reference") {
  const auto g = make_grid(256, 256, 8.0, 8.0);
  const RealField q = sample(g, [](double x, double y) { return dromion_radiating(x, y); });

  SUBCASE("identity") {
    const auto p = compare_profile(to_complex(q), q);
    CHECK(p.L == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.max_residual_fraction <= 1e-10);
    CHECK_FALSE(p.truncated_core);
  }
  SUBCASE("shrunk, shifted and phase-rotated") {
    const double L = 0.5, x0 = 0.7, y0 = -0.4;
    const auto xs = g.xi_points();
    const auto ys = g.eta_points();
    ComplexField psi(g, Representation::physical);
    for (std::size_t i = 0; i < 256; ++i)
      for (std::size_t j = 0; j < 256; ++j)
        psi(i, j) = std::polar(dromion_radiating((xs[i] - x0) / L, (ys[j] - y0) / L) / L, 0.3 * xs[i]);
    const auto p = compare_profile(psi, q);
    CHECK(p.L == doctest::Approx(L).epsilon(1e-8));
    CHECK(p.max_residual_fraction <= 1e-6);
    CHECK(p.core_points > 100);
    CHECK(p.residual.grid() == g);
  }
  SUBCASE("a different shape leaves a residual") {
    const RealField gs = gaussian(g, 2.0);
    const auto p = compare_profile(to_complex(gs), q);
    CHECK(p.max_residual_fraction > 0.05);
  }
}

TEST_CASE("json documents and overlay csv") {
  const auto rec = synthetic(1000, 0.19, [](double t) { return 1.0 / (0.2 - t); }, Termination::delta_abort);
  const auto f = fit_blowup(rec, NormKind::linf_psi);
  const auto j = nlohmann::json::parse(to_json(f));
  CHECK(j["norm_kind"] == "linf_psi");
  CHECK(j["a"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(j["stabilized"].get<bool>());
  CHECK(j["sweep"].size() == 4);
  CHECK(j["window"].size() == 2);

  ProfileComparison p;
  p.L = 0.1;
  p.max_residual_fraction = 0.08;
  const auto pj = nlohmann::json::parse(to_json(p));
  CHECK(pj["L"].get<double>() == 0.1);
  CHECK(pj["truncated_core"] == false);

  const auto path = std::filesystem::temp_directory_path() / "ds1_test_overlay.csv";
  write_overlay_csv(path, rec, f);
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  CHECK(header == "t,norm,fit,loglog");
  std::size_t rows = 0;
  while (std::getline(in, row)) ++rows;
  CHECK(rows == f.points);
  std::filesystem::remove(path);
}
