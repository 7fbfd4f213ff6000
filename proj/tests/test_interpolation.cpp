#include <doctest.h>

#include <cmath>

#include "ds1/interpolation.hpp"

using namespace ds1;

namespace {

double bump(double x, double y) { return std::exp(-0.7 * (x - 0.31) * (x - 0.31) - 0.5 * (y + 0.17) * (y + 0.17)); }

}  // namespace

TEST_CASE("interpolant reproduces grid values and off-grid values") {
  const auto g = make_grid(256, 256, 8.0, 8.0);
  const auto f = sample(g, bump);
  const TrigInterpolant t(f);
  CHECK(t(g.xi_points()[40], g.eta_points()[77]) == doctest::Approx(f(40, 77)).epsilon(1e-13));
  CHECK(t(0.123, -0.456) == doctest::Approx(bump(0.123, -0.456)).epsilon(1e-13));
  const auto d = t.derivatives(0.5, 0.2);
  CHECK(d.fx == doctest::Approx(-1.4 * (0.5 - 0.31) * bump(0.5, 0.2)).epsilon(1e-12));
  CHECK(d.fy == doctest::Approx(-1.0 * (0.2 + 0.17) * bump(0.5, 0.2)).epsilon(1e-12));

  const std::vector<double> xs{0.1, 0.2, 100.0}, ys{-0.3, 0.4};
  const auto v = t.on_tensor(xs, ys);
  CHECK(v[1] == doctest::Approx(bump(0.1, 0.4)).epsilon(1e-13));
  CHECK(v[4] == 0.0);
}

TEST_CASE("maximum location is sub-grid accurate") {
  const auto g = make_grid(256, 256, 8.0, 8.0);
  const auto m = locate_maximum(sample(g, bump));
  CHECK(m.x == doctest::Approx(0.31).epsilon(1e-12));
  CHECK(m.y == doctest::Approx(-0.17).epsilon(1e-12));
  CHECK(m.value == doctest::Approx(1.0).epsilon(1e-13));

  ComplexField c(g, Representation::physical);
  const auto f = sample(g, bump);
  for (std::size_t k = 0; k < c.values().size(); ++k) c.values()[k] = std::polar(f.values()[k], 0.3);
  const auto ma = locate_maximum_abs(c);
  CHECK(std::abs(ma.x - 0.31) < g.h_xi());
  CHECK(std::abs(ma.y + 0.17) < g.h_eta());
}

TEST_CASE("spectral translation") {
  const auto g = make_grid(256, 256, 8.0, 8.0);
  const auto f = sample(g, bump);
  const auto t = translate(f, 0.31, -0.17);
  const auto exact = sample(g, [](double x, double y) { return bump(x + 0.31, y - 0.17); });
  double e = 0.0;
  for (std::size_t k = 0; k < exact.values().size(); ++k) e = std::max(e, std::abs(t.values()[k] - exact.values()[k]));
  CHECK(e <= 1e-13);
}

TEST_CASE("resampling between resolutions") {
  const auto fine = make_grid(512, 512, 8.0, 8.0);
  const auto coarse = make_grid(256, 256, 8.0, 8.0);
  const auto f = sample(fine, bump);
  const auto down = resample(f, coarse);
  const auto up = resample(down, fine);
  double e = 0.0;
  for (std::size_t k = 0; k < f.values().size(); ++k) e = std::max(e, std::abs(up.values()[k] - f.values()[k]));
  CHECK(e <= 1e-13);
  CHECK(down(128, 128) == doctest::Approx(f(256, 256)).epsilon(1e-13));
  CHECK_THROWS(resample(f, make_grid(256, 256, 4.0, 4.0)));
}
