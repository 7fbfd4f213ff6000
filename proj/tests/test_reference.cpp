#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "ds1/interpolation.hpp"
#include "ds1/log.hpp"
#include "ds1/reference.hpp"
#include "ds1/snapshot.hpp"

using namespace ds1;

TEST_CASE("radiating dromion values and symmetry") {
  CHECK(dromion_radiating(0.0, 0.0) == doctest::Approx(0.2).epsilon(1e-15));
  const auto g = make_grid(256, 256, 20.0, 20.0);
  std::vector<std::string> warnings;
  auto prev = set_warning_handler([&](const std::string& m) { warnings.push_back(m); });
  const auto q = dromion_radiating(g);
  set_warning_handler(prev);
  // e^{-|xi|/2} decay leaves ~1e-7 at the edge of 20[-pi, pi].
  CHECK(warnings.size() == 1);
  for (std::size_t i = 0; i < 256; i += 5)
    for (std::size_t j = 0; j < 256; j += 3) CHECK(q(i, j) == q(j, i));
  const auto m = locate_maximum(q);
  CHECK(m.x < 0.0);
  CHECK(m.x == doctest::Approx(m.y).epsilon(1e-8));
}

TEST_CASE("radiating dromion maximum lies on the diagonal at negative coordinates") {
  // Along xi = eta = s the closed form is 1 / (4 cosh^2(s/2) + e^s), maximal
  // where 2 sinh(s) + e^s = 0, i.e. s = -ln(2)/2.
  const double s = -0.5 * std::log(2.0);
  const double h = 1e-4;
  CHECK(dromion_radiating(s, s) > dromion_radiating(s + h, s + h));
  CHECK(dromion_radiating(s, s) > dromion_radiating(s - h, s - h));
}

TEST_CASE("squared omega=2 dromion") {
  CHECK(dromion2_squared(0.0, 0.0) == doctest::Approx(4.0 / 25.0).epsilon(1e-15));
  // Decay e^{-2|xi|} along the axis.
  const double r = dromion2_squared(21.0, 0.0) / dromion2_squared(20.0, 0.0);
  CHECK(r == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK(dromion2_B_exact(0.7, -0.2) == doctest::Approx(dromion2_B_exact(-0.2, 0.7)).epsilon(1e-15));
}

TEST_CASE("squared omega=2 dromion mass is stable under refinement") {
  const auto a = quadrature(dromion2_squared(make_grid(256, 256, 10.0, 10.0)));
  const auto b = quadrature(dromion2_squared(make_grid(512, 512, 10.0, 10.0)));
  CHECK(a > 0.0);
  CHECK(std::abs(a - b) <= 1e-12 * b);
}

TEST_CASE("radiating shift function") {
  CHECK(radiating_shift_f(-800.0) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(radiating_shift_f(800.0) == 0.0);
  CHECK(radiating_shift_f(0.0) == doctest::Approx(7.0 / 12.0).epsilon(1e-15));
  const std::vector<double> xs{-1.0, 0.5, 3.0};
  const auto v = radiating_shift_f(xs);
  for (std::size_t k = 0; k < xs.size(); ++k)
    CHECK(v[k] == doctest::Approx(1.0 / (1 + std::exp(xs[k])) + 1.0 / (4 * (1 + 2 * std::exp(xs[k])))));
}

TEST_CASE("omega rescaling") {
  const auto g = make_grid(512, 512, 8.0, 8.0);
  const auto bump = [](double x, double y) { return std::exp(-(x - 0.3) * (x - 0.3) - 0.8 * (y + 0.2) * (y + 0.2)); };
  const auto q = sample(g, bump);
  const auto same = omega_rescale(q, 1.0);
  CHECK(same.values()[1234] == q.values()[1234]);

  const auto mass = [](const RealField& f) { return quadrature_abs2(to_complex(f)); };
  const auto q4 = omega_rescale(q, 4.0);
  CHECK(locate_maximum(q4).value == doctest::Approx(2.0 * locate_maximum(q).value).epsilon(1e-12));
  CHECK(std::abs(mass(q4) - mass(q)) <= 1e-10 * mass(q));

  // Non-dyadic omega evaluates the interpolant off-grid.
  const double s = std::sqrt(2.0);
  const auto q2 = omega_rescale(q, 2.0);
  CHECK(q2(140, 100) == doctest::Approx(s * bump(s * g.xi_points()[140], s * g.eta_points()[100])).epsilon(1e-12));
  CHECK(std::abs(mass(q2) - mass(q)) <= 1e-10 * mass(q));

  CHECK_THROWS_AS(omega_rescale(q, 0.01), std::domain_error);
  CHECK_THROWS_AS(omega_rescale(q, -1.0), std::invalid_argument);
}

TEST_CASE("initial data builders") {
  const auto g = make_grid(128, 128, 10.0, 10.0);
  const auto q = dromion2_squared(g);

  const auto mu = build_initial_data({InitialKind::mu_times_Q, 1.1, std::nullopt}, g, &q);
  CHECK(mu.is_physical());
  CHECK(mu(64, 64).real() == doctest::Approx(1.1 * q(64, 64)).epsilon(1e-15));
  CHECK(mu(64, 64).imag() == 0.0);

  const auto gs = build_initial_data({InitialKind::gaussian, 4.5, std::nullopt}, g);
  CHECK(gs(64, 64).real() == 4.5);
  CHECK(quadrature_abs2(gs) == doctest::Approx(4.5 * 4.5 * std::numbers::pi / 2).epsilon(1e-8));

  const auto qm = build_initial_data({InitialKind::Q_minus_gaussian, 0.1, std::nullopt}, g, &q);
  CHECK(qm(64, 64).real() == doctest::Approx(q(64, 64) - 0.1).epsilon(1e-15));

  const auto d6 = build_initial_data({InitialKind::scaled_dromion_radiating, 6.0, std::nullopt}, g);
  CHECK(d6(64, 64).real() == doctest::Approx(1.2).epsilon(1e-15));

  CHECK_THROWS_AS(build_initial_data({InitialKind::mu_times_Q, 1.1, std::nullopt}, g), std::invalid_argument);
  CHECK_THROWS_AS(build_initial_data({InitialKind::gaussian, 0.0, std::nullopt}, g), std::invalid_argument);
  const auto other = make_grid(64, 64, 10.0, 10.0);
  CHECK_THROWS_AS(build_initial_data({InitialKind::mu_times_Q, 1.0, std::nullopt}, other, &q), std::invalid_argument);

  const auto path = std::filesystem::temp_directory_path() / "ds1_test_reference_init.ds1";
  write_snapshot(path, gs, 0.0);
  const auto ff = build_initial_data({InitialKind::from_file, 1.0, path}, g);
  CHECK(ff.values()[777] == gs.values()[777]);
  CHECK_THROWS(build_initial_data({InitialKind::from_file, 1.0, path}, other));
  std::filesystem::remove(path);

  for (auto k : {InitialKind::scaled_dromion_radiating, InitialKind::mu_times_Q, InitialKind::Q_minus_gaussian,
                 InitialKind::gaussian, InitialKind::from_file})
    CHECK(initial_kind_from_string(to_string(k)) == k);
  CHECK_THROWS(initial_kind_from_string("ring"));
}
