#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ds1/evolution.hpp"
#include "ds1/reference.hpp"
#include "ds1/snapshot.hpp"
#include "q_cache.hpp"

using namespace ds1;

namespace {

constexpr cplx I{0.0, 1.0};

ComplexField physical(const SpectralGrid& g, double (*f)(double, double)) {
  ComplexField out(g, Representation::physical);
  const auto& xs = g.xi_points();
  const auto& ys = g.eta_points();
  for (std::size_t i = 0; i < g.n_xi(); ++i)
    for (std::size_t j = 0; j < g.n_eta(); ++j) out(i, j) = f(xs[i], ys[j]);
  return out;
}

double gauss2(double x, double y) { return 2.0 * std::exp(-x * x - y * y); }
double lopsided(double x, double y) {
  return 1.8 * std::exp(-x * x - 1.5 * y * y) * (1.0 + 0.3 * x - 0.2 * y * x) * std::exp(0.4 * I * y).real();
}

double max_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double e = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) e = std::max(e, std::abs(a[k] - b[k]));
  return e;
}

bool bitwise_equal(std::span<const cplx> a, std::span<const cplx> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(cplx)) == 0;
}

ComplexField run_to(const ComplexField& psi0, double t, std::size_t steps,
                    exec::Policy policy = exec::default_policy) {
  EvolutionConfig cfg;
  cfg.t_max = t;
  cfg.n_steps = steps;
  cfg.record_every = steps;
  cfg.record_energy = false;
  return inverse(evolve(psi0, cfg, {}, {}, policy).final_state);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ds1_test_evolution_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("linear-only stepping is the exact dispersive flow") {
  const auto g = make_grid(128, 128, 4.0, 4.0);
  const ComplexField psi0 = physical(g, gauss2);
  ComplexField u = forward(psi0);
  Etdrk4 stepper(g);
  stepper.set_linear_only(true);
  const double dt = 0.037;
  for (int s = 0; s < 10; ++s) stepper.step(u.values(), dt);
  ComplexField exact = forward(psi0);
  const auto kx = g.k_xi();
  const auto ky = g.k_eta();
  for (std::size_t p = 0; p < g.n_xi(); ++p)
    for (std::size_t q = 0; q < g.n_eta(); ++q)
      exact(p, q) *= std::exp(-2.0 * I * (kx[p] * kx[p] + ky[q] * ky[q]) * (10 * dt));
  CHECK(max_diff(inverse(u).values(), inverse(exact).values()) <= 1e-12);
}

TEST_CASE("the stationary state satisfies L u + N(u) = i u") {
  const auto q = testing::cached_Q(1024, 20.0);
  const ComplexField u = forward(to_complex(q));
  const RhsSplit r = rhs_split(u);
  ComplexField rhs(u.grid(), Representation::fourier);
  for (std::size_t k = 0; k < rhs.values().size(); ++k)
    rhs.values()[k] = r.linear_symbol[k] * u.values()[k] + r.nonlinear.values()[k] - I * u.values()[k];
  CHECK(max_abs(inverse(rhs).values()) <= 1e-9);
}

TEST_CASE("Q evolves along its orbit Q e^{it}") {
  const auto q = testing::cached_Q(1024, 20.0);
  const ComplexField psi0 = to_complex(q);
  EvolutionConfig cfg;
  cfg.t_max = 0.05;
  cfg.n_steps = 50;
  cfg.record_every = 10;
  double worst = 0.0;
  const RecordObserver check = [&](std::size_t, double t, const ComplexField& hat) {
    const ComplexField psi = inverse(hat);
    const cplx phase = std::exp(I * t);
    for (std::size_t k = 0; k < psi.values().size(); ++k)
      worst = std::max(worst, std::abs(psi.values()[k] - q.values()[k] * phase));
  };
  const auto rec = evolve(psi0, cfg, {}, check);
  CHECK(rec.termination == Termination::completed);
  CHECK(rec.size() == 6);
  CHECK(worst <= 1e-11);
  for (double m : rec.mass) CHECK(std::abs(m / rec.m0 - 1.0) <= 1e-13);
  CHECK(rec.times.back() == doctest::Approx(0.05).epsilon(1e-15));
}

TEST_CASE("ETDRK4 converges at fourth order") {
  const auto g = make_grid(128, 128, 4.0, 4.0);
  const ComplexField psi0 = physical(g, gauss2);
  const double T = 0.4;
  const ComplexField ref = run_to(psi0, T, 640);
  std::vector<double> err;
  for (std::size_t n : {10, 20, 40, 80}) err.push_back(max_diff(run_to(psi0, T, n).values(), ref.values()));
  for (std::size_t i = 0; i + 1 < err.size(); ++i) {
    const double order = std::log2(err[i] / err[i + 1]);
    MESSAGE("dt = " << T / (10 << i) << "  error " << err[i] << "  order " << order);
    CHECK(order == doctest::Approx(4.0).epsilon(0.05));
  }
}

TEST_CASE("Galilei covariance") {
  const auto g = make_grid(256, 256, 8.0, 8.0);
  const double vx = 0.5, vy = 0.5, t = 0.1;
  const ComplexField psi0 = physical(g, lopsided);
  ComplexField boosted0 = psi0;
  const auto& xs = g.xi_points();
  const auto& ys = g.eta_points();
  for (std::size_t i = 0; i < g.n_xi(); ++i)
    for (std::size_t j = 0; j < g.n_eta(); ++j) boosted0(i, j) *= std::exp(I * (vx * xs[i] + vy * ys[j]) / 4.0);

  const ComplexField plain = run_to(psi0, t, 100);
  const ComplexField boosted = run_to(boosted0, t, 100);

  // Psi(xi - vx t, eta - vy t, t) by a spectral shift, then the boost phase.
  ComplexField shifted = forward(plain);
  const auto kx = g.k_xi();
  const auto ky = g.k_eta();
  for (std::size_t p = 0; p < g.n_xi(); ++p)
    for (std::size_t q = 0; q < g.n_eta(); ++q) shifted(p, q) *= std::exp(-I * (kx[p] * vx * t + ky[q] * vy * t));
  shifted.to_physical();
  for (std::size_t i = 0; i < g.n_xi(); ++i)
    for (std::size_t j = 0; j < g.n_eta(); ++j)
      shifted(i, j) *= std::exp(I * (vx * (xs[i] - 0.5 * t * vx) + vy * (ys[j] - 0.5 * t * vy)) / 4.0);
  CHECK(max_diff(boosted.values(), shifted.values()) <= 1e-8);
}

TEST_CASE("scaling covariance") {
  // lambda = 2: half the domain, a quarter of the time step, same indices.
  const double lambda = 2.0;
  const auto ga = make_grid(128, 128, 6.0, 6.0);
  const auto gb = make_grid(128, 128, 3.0, 3.0);
  const ComplexField a0 = physical(ga, lopsided);
  ComplexField b0(gb, Representation::physical);
  for (std::size_t k = 0; k < b0.values().size(); ++k) b0.values()[k] = lambda * a0.values()[k];
  const ComplexField a = run_to(a0, 0.2, 80);
  const ComplexField b = run_to(b0, 0.05, 80);
  double e = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k)
    e = std::max(e, std::abs(b.values()[k] - lambda * a.values()[k]));
  CHECK(e <= 1e-8);
}

TEST_CASE("exchanging xi and eta commutes with the flow") {
  const auto g = make_grid(128, 128, 4.0, 4.0);
  const ComplexField psi0 = physical(g, lopsided);
  ComplexField swapped0(g, Representation::physical);
  for (std::size_t i = 0; i < 128; ++i)
    for (std::size_t j = 0; j < 128; ++j) swapped0(i, j) = psi0(j, i);
  const ComplexField a = run_to(psi0, 0.2, 40);
  const ComplexField b = run_to(swapped0, 0.2, 40);
  double e = 0.0;
  for (std::size_t i = 0; i < 128; ++i)
    for (std::size_t j = 0; j < 128; ++j) e = std::max(e, std::abs(a(i, j) - b(j, i)));
  CHECK(e <= 1e-10);
}

TEST_CASE("runs are deterministic and the serial policy matches OpenMP bitwise") {
  const auto g = make_grid(128, 128, 4.0, 4.0);
  const ComplexField psi0 = physical(g, lopsided);
  const int threads = exec::max_threads();
  exec::set_num_threads(4);
  const ComplexField a = run_to(psi0, 0.1, 20, exec::Policy::omp);
  const ComplexField b = run_to(psi0, 0.1, 20, exec::Policy::omp);
  const ComplexField c = run_to(psi0, 0.1, 20, exec::Policy::serial);
  exec::set_num_threads(threads);
  CHECK(bitwise_equal(a.values(), b.values()));
  CHECK(bitwise_equal(a.values(), c.values()));
}

TEST_CASE("records, snapshots and CSV output") {
  const auto g = make_grid(128, 128, 4.0, 4.0);
  const ComplexField psi0 = physical(g, gauss2);
  EvolutionConfig cfg;
  cfg.t_max = 0.2;
  cfg.n_steps = 40;
  cfg.record_every = 8;
  cfg.snapshot_times = {0.0, 0.1026, 0.2};
  EvolutionIO io{scratch("records"), "run", 0};
  const auto rec = evolve(psi0, cfg, io);
  // steps 0, 8, 16, 21 (snapshot), 24, 32, 40
  REQUIRE(rec.size() == 7);
  CHECK(rec.times[3] == doctest::Approx(21 * 0.005));
  CHECK(std::isinf(rec.delta[0]));
  CHECK(rec.delta[0] < 0.0);
  CHECK(rec.m0 == doctest::Approx(2.0 * M_PI).epsilon(1e-12));
  CHECK(rec.linf[0] == doctest::Approx(2.0));
  // ||d_xi (2 e^{-x^2-y^2})||^2 = 2 pi.
  CHECK(rec.l2_grad_xi[0] == doctest::Approx(std::sqrt(2.0 * M_PI)).epsilon(1e-12));
  CHECK(rec.l2_grad_eta[0] == doctest::Approx(rec.l2_grad_xi[0]).epsilon(1e-12));
  for (std::size_t i = 1; i < rec.size(); ++i) {
    CHECK(rec.delta[i] <= -8.0);
    CHECK(rec.energy[i] == doctest::Approx(rec.energy[0]).epsilon(1e-6));
  }
  REQUIRE(rec.snapshots.size() == 3);
  const Snapshot s = read_snapshot(rec.snapshots[1].path, g);
  CHECK(s.time == rec.times[3]);

  const auto back = read_norms_csv(io.csv_path());
  REQUIRE(back.size() == rec.size());
  for (std::size_t i = 0; i < rec.size(); ++i) {
    CHECK(back.times[i] == rec.times[i]);
    CHECK(back.mass[i] == rec.mass[i]);
    CHECK(back.energy[i] == rec.energy[i]);
    CHECK(back.delta[i] == rec.delta[i]);
  }
  std::ifstream in(io.csv_path());
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,linf,mass,l2gradxi,l2gradeta,energy,delta");
  std::filesystem::remove_all(io.dir);
}

TEST_CASE("energy identities") {
  const auto g = make_grid(128, 128, 4.0, 4.0);
  CHECK(energy(ComplexField(g, Representation::physical)) == 0.0);
  // A linear phase adds |v|^2 mass / 16 ... per component: |grad(e^{i v.x/4} Psi)|^2.
  const ComplexField psi = physical(g, gauss2);
  ComplexField moving = psi;
  const auto& xs = g.xi_points();
  for (std::size_t i = 0; i < g.n_xi(); ++i)
    for (std::size_t j = 0; j < g.n_eta(); ++j) moving(i, j) *= std::exp(I * 0.25 * xs[i]);
  CHECK(energy(moving) - energy(psi) == doctest::Approx(mass(psi) / 16.0).epsilon(1e-10));
}

TEST_CASE("resume from a checkpoint reproduces the uninterrupted run bitwise") {
  const auto g = make_grid(128, 128, 4.0, 4.0);
  const ComplexField psi0 = physical(g, lopsided);
  EvolutionConfig cfg;
  cfg.t_max = 0.15;
  cfg.n_steps = 30;
  cfg.record_every = 5;
  cfg.checkpoint_every = 10;
  cfg.snapshot_times = {0.05, 0.125};
  const EvolutionIO full_io{scratch("full"), "run", 42};
  const EvolutionIO cut_io{scratch("cut"), "run", 42};
  const auto full = evolve(psi0, cfg, full_io);

  struct Interrupt {};
  const RecordObserver stop = [](std::size_t step, double, const ComplexField&) {
    if (step == 25) throw Interrupt{};
  };
  CHECK_THROWS_AS(evolve(psi0, cfg, cut_io, stop), Interrupt);
  const auto resumed = resume_evolution(g, cfg, cut_io);

  CHECK(bitwise_equal(full.final_state.values(), resumed.final_state.values()));
  CHECK(slurp(full_io.csv_path()) == slurp(cut_io.csv_path()));
  REQUIRE(resumed.snapshots.size() == full.snapshots.size());
  for (std::size_t i = 0; i < full.snapshots.size(); ++i)
    CHECK(slurp(full.snapshots[i].path) == slurp(resumed.snapshots[i].path));
  CHECK(resumed.size() == full.size());
  CHECK(resumed.last_good_time == full.last_good_time);

  const EvolutionIO other{cut_io.dir, "run", 43};
  CHECK_THROWS_AS(resume_evolution(g, cfg, other), FormatError);
  CHECK_THROWS_AS(resume_evolution(make_grid(64, 64, 4.0, 4.0), cfg, cut_io), FormatError);
  std::filesystem::remove_all(full_io.dir);
  std::filesystem::remove_all(cut_io.dir);
}

TEST_CASE("delta abort and the two-phase restart") {
  const auto g = make_grid(128, 128, 4.0, 4.0);
  const ComplexField psi0 = physical(g, lopsided);
  TwoPhaseConfig tp;
  tp.coarse.t_max = 1.0;
  tp.coarse.n_steps = 10;
  tp.coarse.record_every = 1;
  tp.coarse.delta_abort = -13.0;
  const auto res = run_two_phase(psi0, tp);
  MESSAGE("coarse deltas end at " << res.coarse.delta.back() << ", termination "
                                  << to_string(res.coarse.termination));
  REQUIRE(res.refined);
  CHECK(res.coarse.termination == Termination::delta_abort);
  CHECK(res.restart_time <= 0.9 * res.abort_time);
  CHECK(res.fine.times.front() == res.restart_time);
  CHECK(res.fine.dt == doctest::Approx(0.01));
  for (std::size_t i = 1; i < res.combined.size(); ++i) CHECK(res.combined.times[i] > res.combined.times[i - 1]);
  CHECK(res.combined.m0 == res.coarse.m0);
}

TEST_CASE("resolution abort stops at the first record whose tail ratio exceeds the threshold") {
  const auto g = make_grid(64, 64, 1.0, 1.0);
  const ComplexField psi0 = physical(g, gauss2);
  EvolutionConfig cfg;
  cfg.t_max = 0.2;
  cfg.n_steps = 40;
  cfg.record_every = 4;
  cfg.record_energy = false;
  std::vector<double> tails;
  const auto full = evolve(psi0, cfg, {}, [&](std::size_t, double, const ComplexField& h) {
    tails.push_back(spectral_tail_ratio(h));
  });
  REQUIRE(full.termination == Termination::completed);
  REQUIRE(tails.size() == full.size());
  std::size_t peak = 0;
  for (std::size_t i = 1; i < tails.size(); ++i)
    if (tails[i] > tails[peak]) peak = i;
  MESSAGE("tail ratio " << tails.front() << " -> " << tails[peak] << " at record " << peak);
  REQUIRE(peak > 0);

  cfg.resolution_abort = std::sqrt(tails.front() * tails[peak]);
  std::size_t first = 0;
  while (tails[first] <= cfg.resolution_abort) ++first;
  const auto cut = evolve(psi0, cfg);
  CHECK(cut.termination == Termination::resolution_lost);
  CHECK(cut.size() == first + 1);
  CHECK(cut.last_good_time == full.times[first - 1]);

  cfg.resolution_abort = 2.0 * tails[peak];
  CHECK(evolve(psi0, cfg).termination == Termination::completed);
}

TEST_CASE("configuration validation") {
  EvolutionConfig cfg;
  cfg.t_max = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.record_every = 3;
  cfg.checkpoint_every = 10;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.n_steps = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.resolution_abort = -1e-3;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
