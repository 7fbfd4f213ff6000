#include <doctest.h>

#include <cmath>
#include <random>

#include "ds1/gmres.hpp"
#include "ds1/interpolation.hpp"
#include "ds1/reference.hpp"
#include "ds1/singular_ops.hpp"
#include "ds1/stationary.hpp"
#include "q_cache.hpp"

using namespace ds1;

namespace {

double max_diff(std::span<const double> a, std::span<const double> b) {
  double e = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) e = std::max(e, std::abs(a[k] - b[k]));
  return e;
}

RealField scaled(const RealField& f, double s) {
  RealField out = f;
  for (double& v : out.values()) v *= s;
  return out;
}

RealField axpy(const RealField& x, double a, const RealField& y) {
  RealField out = x;
  auto o = out.values();
  auto w = y.values();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] += a * w[k];
  return out;
}

}  // namespace

TEST_CASE("gmres solves small nonsymmetric systems") {
  const std::size_t n = 40;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  std::vector<double> A(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) A[i * n + j] = (i == j ? 2.0 + 0.05 * i : 0.0) + u(rng);
  std::vector<double> xs(n), b(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) xs[i] = std::sin(1.0 + i);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b[i] += A[i * n + j] * xs[j];
  const LinearOperator op = [&](std::span<const double> in, std::span<double> out) {
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = 0.0;
      for (std::size_t j = 0; j < n; ++j) out[i] += A[i * n + j] * in[j];
    }
  };
  for (int restart : {0, 5}) {
    std::vector<double> x(n, 0.0);
    const auto r = gmres(op, b, x, GmresOptions{1e-12, 400, restart});
    CHECK(r.converged);
    CHECK(max_diff(x, xs) <= 1e-10);
  }
  std::vector<double> z(n, 1.0), zero(n, 0.0);
  CHECK(gmres(op, zero, z, {}).converged);
  CHECK(z[3] == 0.0);
}

TEST_CASE("residual of the zero field vanishes") {
  const auto g = make_grid(64, 64, 5.0, 5.0);
  CHECK(max_abs(residual_F(RealField(g), 1.0).values()) == 0.0);
}

TEST_CASE("the radiating dromion is not stationary for trivial boundary conditions") {
  const auto g = make_grid(512, 512, 20.0, 20.0);
  const auto r = residual_F(dromion_radiating(g), 1.0);
  MESSAGE("max|F(Q~)| = " << max_abs(r.values()));
  CHECK(max_abs(r.values()) > 1e-2);
}

TEST_CASE("jacobian-vector product matches centered differences") {
  const auto g = make_grid(256, 256, 20.0, 20.0);
  const auto q = scaled(dromion_radiating(g), 6.0);
  const auto v = sample(g, [](double x, double y) { return std::exp(-0.3 * (x * x + y * y)) * (1 + 0.2 * x); });
  for (const RealField* dir : {&q, &v}) {
    const double h = 1e-6;
    const auto fp = residual_F(axpy(q, h, *dir), 1.0);
    const auto fm = residual_F(axpy(q, -h, *dir), 1.0);
    RealField fd(g);
    for (std::size_t k = 0; k < fd.values().size(); ++k) fd.values()[k] = (fp.values()[k] - fm.values()[k]) / (2 * h);
    const auto jv = jacobian_vector_product(q, *dir, 1.0);
    const double rel = max_diff(jv.values(), fd.values()) / max_abs(jv.values());
    MESSAGE("relative difference " << rel);
    CHECK(rel <= 1e-7);
  }
}

TEST_CASE("jacobian at zero is the linear part") {
  const auto g = make_grid(128, 128, 8.0, 8.0);
  const auto v = sample(g, [](double x, double y) { return std::exp(-x * x - y * y); });
  const auto jv = jacobian_vector_product(RealField(g), v, 1.0);
  const auto lap = laplacian(v);
  RealField expect(g);
  for (std::size_t k = 0; k < v.values().size(); ++k) expect.values()[k] = -v.values()[k] + 2 * lap.values()[k];
  CHECK(max_diff(jv.values(), expect.values()) <= 1e-13);
}

TEST_CASE("converged stationary state on the 2^10 grid") {
  const auto q = testing::cached_Q(1024, 20.0);
  const auto& g = q.grid();
  CHECK(max_abs(residual_F(q, 1.0).values()) < 1e-10);
  CHECK(exchange_asymmetry(q) <= 1e-9);

  // Maximum positive, at the grid point nearest the origin, above the
  // radiating dromion's.
  std::size_t best = 0;
  for (std::size_t k = 1; k < q.values().size(); ++k)
    if (q.values()[k] > q.values()[best]) best = k;
  CHECK(best / 1024 == g.origin_index(Axis::xi));
  CHECK(best % 1024 == g.origin_index(Axis::eta));
  CHECK(q.values()[best] > 0.0);
  CHECK(q.values()[best] > dromion_radiating(-0.5 * std::log(2.0), -0.5 * std::log(2.0)));

  for (Axis a : {Axis::xi, Axis::eta}) {
    const auto fit = exponential_tail_fit(q, a);
    MESSAGE("tail slope " << fit.slope << ", residual " << fit.rel_residual << " over " << fit.points);
    CHECK(fit.points > 20);
    CHECK(fit.slope < 0.0);
    CHECK(fit.rel_residual < 0.05);
  }

  SUBCASE("translation modes lie in the kernel of the Jacobian") {
    for (Axis a : {Axis::xi, Axis::eta}) {
      const auto dq = derivative(q, a);
      const auto jv = jacobian_vector_product(q, dq, 1.0);
      const auto lin = jacobian_vector_product(RealField(g), dq, 1.0);
      const double scale = max_abs(lin.values());
      MESSAGE("|DF dQ| / |L dQ| = " << max_abs(jv.values()) / scale);
      CHECK(max_abs(jv.values()) <= 1e-6 * scale);
    }
  }

  SUBCASE("restarting from the solution takes no Newton steps") {
    const auto r = newton_solve(q, 1.0);
    CHECK(r.gmres_iterations.empty());
    CHECK(r.final_residual() < 1e-10);
    CHECK(max_diff(r.Q.values(), q.values()) <= 1e-12);
  }
}

TEST_CASE("stationary state is stable under grid refinement") {
  // 2^9 points on 20[-pi, pi] do not resolve Q (tail ratio ~4e-6); the
  // refinement oracle runs one level up.
  const auto coarse = testing::cached_Q(1024, 20.0);
  const auto fine = testing::cached_Q(2048, 20.0);
  const auto down = resample(fine, coarse.grid());
  const double e = max_diff(down.values(), coarse.values());
  MESSAGE("2^10 vs 2^11: " << e);
  CHECK(e <= 1e-8);
  CHECK(quadrature_abs2(to_complex(coarse)) == doctest::Approx(quadrature_abs2(to_complex(fine))).epsilon(1e-12));
}

TEST_CASE("solver failure modes") {
  const auto g = make_grid(512, 512, 20.0, 20.0);
  const auto q0 = scaled(dromion_radiating(g), 6.0);
  NewtonConfig one;
  one.max_newton_iters = 1;
  CHECK_THROWS_AS(newton_solve(q0, 1.0, one), NonConvergence);

  NewtonConfig strict;
  strict.resolution_tol = 1e-12;
  CHECK_THROWS_AS(newton_solve(q0, 1.0, strict), LostResolution);

  NewtonConfig bad;
  bad.residual_tol = 0.0;
  CHECK_THROWS_AS(newton_solve(q0, 1.0, bad), std::invalid_argument);
  CHECK_THROWS_AS(newton_solve(q0, -1.0), std::invalid_argument);
}
