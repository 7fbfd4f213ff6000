#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>

#include "ds1/grid.hpp"
#include "ds1/snapshot.hpp"

using namespace ds1;

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

ComplexField random_field(const SpectralGrid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  ComplexField f(g, Representation::physical);
  for (auto& v : f.values()) v = {d(rng), d(rng)};
  return f;
}

}  // namespace

TEST_CASE("make_grid validates sizes and scales") {
  CHECK_THROWS_AS(make_grid(12, 16, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(4, 4, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(16, 16, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(16, 16, 1.0, -2.0), std::invalid_argument);
  CHECK_NOTHROW(make_grid(8, 16, 1.0, 2.0));
}

TEST_CASE("smallest grid has integer wavenumbers in transform order") {
  const auto g = make_grid(8, 8, 1.0, 1.0);
  const double expect[] = {0, 1, 2, 3, -4, -3, -2, -1};
  int zeros = 0;
  for (std::size_t p = 0; p < 8; ++p) {
    CHECK(g.k_xi()[p] == expect[p]);
    CHECK(g.k_eta()[p] == expect[p]);
    zeros += g.k_xi()[p] == 0.0;
  }
  CHECK(zeros == 1);
  CHECK(g.k_xi_odd()[4] == 0.0);
}

TEST_CASE("collocation points and spacing") {
  const auto g = make_grid(1024, 1024, 20.0, 20.0);
  CHECK(g.h_xi() == doctest::Approx(40.0 * std::numbers::pi / 1024).epsilon(1e-15));
  for (std::size_t j : {0u, 1u, 511u, 512u, 1023u})
    CHECK(g.xi_points()[j] == doctest::Approx(20.0 * (-std::numbers::pi + 2 * std::numbers::pi * j / 1024.0)));
  CHECK(g.xi_points()[g.origin_index(Axis::xi)] == 0.0);
}

TEST_CASE("constant maps to the zero mode") {
  const auto g = make_grid(16, 32, 1.5, 2.0);
  ComplexField f(g, Representation::physical);
  for (auto& v : f.values()) v = 1.0;
  const auto F = forward(f);
  CHECK(F.is_fourier());
  const double area = g.period_xi() * g.period_eta();
  CHECK(std::abs(F(0, 0) - area) <= 1e-13 * area);
  double rest = 0.0;
  for (std::size_t k = 1; k < F.values().size(); ++k) rest = std::max(rest, std::abs(F.values()[k]));
  CHECK(rest <= 1e-13 * area);
}

TEST_CASE("pure harmonic maps to a single mode") {
  const auto g = make_grid(32, 16, 3.0, 1.0);
  const int m = 5;
  ComplexField f(g, Representation::physical);
  for (std::size_t i = 0; i < 32; ++i)
    for (std::size_t j = 0; j < 16; ++j) f(i, j) = std::polar(1.0, m * g.xi_points()[i] / 3.0);
  const auto F = forward(f);
  const double area = g.period_xi() * g.period_eta();
  for (std::size_t p = 0; p < 32; ++p)
    for (std::size_t q = 0; q < 16; ++q) {
      const double expect = (p == m && q == 0) ? area : 0.0;
      CHECK(std::abs(F(p, q) - expect) <= 1e-12 * area);
    }
}

TEST_CASE("round trip is exact to round-off") {
  const auto g = make_grid(128, 64, 7.0, 3.0);
  const auto f = random_field(g, 1);
  const auto back = inverse(forward(f));
  double err = 0.0;
  for (std::size_t k = 0; k < f.values().size(); ++k) err = std::max(err, std::abs(back.values()[k] - f.values()[k]));
  CHECK(err <= 10 * eps * max_abs(f.values()));
}

TEST_CASE("Parseval under the documented normalization") {
  const auto g = make_grid(64, 128, 2.0, 5.0);
  const auto f = random_field(g, 2);
  const auto F = forward(f);
  double s = 0.0;
  for (const auto& v : F.values()) s += std::norm(v);
  s /= g.period_xi() * g.period_eta();
  const double q = quadrature_abs2(f);
  CHECK(std::abs(s - q) <= 1e-12 * q);
}

TEST_CASE("zero mode equals the grid quadrature") {
  const auto g = make_grid(64, 64, 4.0, 4.0);
  const auto f = sample(g, [](double x, double y) { return std::exp(-x * x - 2 * y * y) * (1 + x); });
  const auto F = forward(to_complex(f));
  CHECK(F(0, 0).real() == doctest::Approx(quadrature(f)).epsilon(1e-14));
}

TEST_CASE("to_real rejects genuinely complex fields") {
  const auto g = make_grid(8, 8, 1.0, 1.0);
  ComplexField f(g, Representation::physical);
  for (auto& v : f.values()) v = {1.0, 1e-6};
  CHECK_THROWS_AS(to_real(f), std::domain_error);
  for (auto& v : f.values()) v = {1.0, 1e-14};
  CHECK_NOTHROW(to_real(f));
}

TEST_CASE("resolved check") {
  const auto g = make_grid(512, 512, 10.0, 10.0);
  CHECK(is_resolved(sample(g, [](double x, double y) { return std::exp(-x * x - y * y); })));
  const auto narrow = sample(g, [](double x, double y) { return std::exp(-40 * (x * x + y * y)); });
  CHECK_FALSE(is_resolved(narrow));
}

TEST_CASE("two-thirds filter removes the outer modes") {
  const auto g = make_grid(32, 32, 1.0, 1.0);
  auto F = forward(random_field(g, 3));
  apply_two_thirds_filter(F);
  CHECK(spectral_tail_ratio(F) == 0.0);
  CHECK(std::abs(F(1, 1)) > 0.0);
}

TEST_CASE("snapshot round trip") {
  const auto g = make_grid(16, 32, 2.5, 1.25);
  const auto f = random_field(g, 4);
  const auto dir = std::filesystem::temp_directory_path() / "ds1_test_grid";
  std::filesystem::create_directories(dir);
  const auto path = dir / "f.ds1";
  write_snapshot(path, f, 0.75);

  const auto h = read_snapshot_header(path);
  CHECK(h.n_xi == 16);
  CHECK(h.n_eta == 32);
  CHECK(h.l_xi == 2.5);
  CHECK(h.l_eta == 1.25);
  CHECK(h.time == 0.75);
  CHECK(h.representation == Representation::physical);

  const auto s = read_snapshot(path, g);
  CHECK(s.time == 0.75);
  for (std::size_t k = 0; k < f.values().size(); ++k) CHECK(s.field.values()[k] == f.values()[k]);

  CHECK_THROWS_AS(read_snapshot(path, make_grid(16, 32, 2.5, 1.0)), FormatError);

  Checkpoint cp{Snapshot{forward(f), 1.5}, CheckpointTrailer{42, 0xabcdefULL, 3.25, 17}};
  write_checkpoint(dir / "c.ds1", cp);
  const auto back = read_checkpoint(dir / "c.ds1", g);
  CHECK(back.trailer.step == 42);
  CHECK(back.trailer.config_hash == 0xabcdefULL);
  CHECK(back.trailer.initial_mass == 3.25);
  CHECK(back.trailer.records == 17);
  CHECK(back.state.field.is_fourier());
  std::filesystem::remove_all(dir);
}
