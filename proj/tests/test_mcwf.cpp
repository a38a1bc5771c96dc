#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "oracles.hpp"
#include "rydcav/csv.hpp"
#include "rydcav/errors.hpp"
#include "rydcav/mcwf.hpp"
#include "rydcav/rk4.hpp"
#include "rydcav/rng.hpp"

using namespace rydcav;

namespace {

PhysicalParams driven() {
  PhysicalParams p;
  p.omega_rabi = angular_from_mhz(4.0);
  p.g_collective = angular_from_mhz(1.0);
  p.delta_e = angular_from_mhz(10.0);
  p.gamma_e = angular_from_mhz(1.0);
  p.gamma_r = angular_from_mhz(0.2);
  p.kappa = angular_from_mhz(0.2);
  return p;
}

double max_diff(const FockLadderState& a, const FockLadderState& b) {
  double d = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    d = std::max({d, std::abs(a.c_b[n] - b.c_b[n]), std::abs(a.c_e[n] - b.c_e[n]),
                  std::abs(a.c_r[n] - b.c_r[n])});
  }
  return d;
}

}  // namespace

TEST_CASE("coherent tail mass equals the regularized incomplete gamma") {
  for (double a : {0.5, 1.0, 4.0, 7.0}) {
    for (int c : {0, 3, 10, 30, 50}) {
      const double ref = boost::math::gamma_p(c + 1.0, a * a);
      const double got = coherent_tail_mass(cplx(a, 0.0), c);
      CHECK(got == doctest::Approx(ref).epsilon(1e-9).scale(1e-300));
    }
  }
  CHECK(coherent_tail_mass(cplx(0.0, 0.0), 0) == 0.0);
}

TEST_CASE("coherent ladder amplitudes and cutoff guard") {
  const cplx alpha = std::polar(2.0, 0.7);
  const auto s = coherent_ladder(alpha, 30);
  CHECK(s.norm_sq() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.mean_photon() == doctest::Approx(4.0).epsilon(1e-9));
  // amplitude ratio c[n+1]/c[n] = alpha / sqrt(n+1)
  for (int n = 0; n < 10; ++n) {
    const cplx ratio = s.c_b[n + 1] / s.c_b[n];
    CHECK(std::abs(ratio - alpha / std::sqrt(n + 1.0)) < 1e-12);
  }
  try {
    coherent_ladder(cplx(4.0, 0.0), 20);
    FAIL("expected CutoffTooSmall");
  } catch (const CutoffTooSmall& e) {
    CHECK(e.tail_mass() == doctest::Approx(boost::math::gamma_p(21.0, 16.0)).epsilon(1e-9));
  }
  CHECK_NOTHROW(coherent_ladder(cplx(4.0, 0.0), 50));
}

TEST_CASE("jump operators") {
  FockLadderState s(3);
  s.c_b[2] = {1.0, 0.0};
  s.c_e[1] = {0.0, 2.0};
  s.c_r[0] = {3.0, 0.0};
  s.renormalize();

  const auto k = apply_jump(s, JumpKind::Kappa);
  CHECK(k.norm_sq() == doctest::Approx(1.0));
  // only b[2] -> sqrt(2) b[1] and e[1] -> e[0] survive
  const double w = std::sqrt(2.0 + 4.0);
  CHECK(std::abs(k.c_b[1] - cplx(std::sqrt(2.0) / w, 0.0)) < 1e-14);
  CHECK(std::abs(k.c_e[0] - cplx(0.0, 2.0 / w)) < 1e-14);
  CHECK(k.c_r[0] == cplx(0.0, 0.0));

  const auto e = apply_jump(s, JumpKind::GammaE);
  CHECK(std::abs(e.c_b[1] - cplx(0.0, 1.0)) < 1e-14);
  CHECK(e.excited_population() == 0.0);
  const auto r = apply_jump(s, JumpKind::GammaR);
  CHECK(std::abs(r.c_b[0] - cplx(1.0, 0.0)) < 1e-14);
  CHECK(r.rydberg_population() == 0.0);

  FockLadderState vac(2);
  vac.c_b[0] = 1.0;
  CHECK_THROWS_AS(apply_jump(vac, JumpKind::Kappa), ImpossibleJump);
  CHECK_THROWS_AS(apply_jump(vac, JumpKind::GammaE), ImpossibleJump);
}

TEST_CASE("jump probabilities and the step guard") {
  const PhysicalParams p = driven();
  FockLadderState s(4);
  s.c_b[3] = std::sqrt(0.5);
  s.c_e[1] = std::sqrt(0.3);
  s.c_r[2] = std::sqrt(0.2);
  const double dt = 1e-3;
  const auto jp = jump_probabilities(s, p, dt);
  CHECK(jp.p_e == doctest::Approx(p.gamma_e * dt * 0.3));
  CHECK(jp.p_r == doctest::Approx(p.gamma_r * dt * 0.2));
  CHECK(jp.p_kappa == doctest::Approx(p.kappa * dt * (1.5 + 0.3 + 0.4)));
  try {
    jump_probabilities(s, p, 1.0);
    FAIL("expected StepTooLarge");
  } catch (const StepTooLarge& e) {
    CHECK(e.suggested_dt() < 1.0);
    CHECK(jump_probabilities(s, p, e.suggested_dt()).total() < kMaxJumpProbability);
  }
}

TEST_CASE("precomputed propagator equals an RK4 step of the ladder equations") {
  PhysicalParams p = driven();
  p.omega_rabi = std::polar(angular_from_mhz(4.0), -0.4);
  p.delta_r = angular_from_mhz(0.7);
  auto s = coherent_ladder(cplx(1.2, 0.5), 8, 1e-3);
  s.c_e[3] = {0.1, -0.2};
  s.c_r[8] = {0.05, 0.0};
  s.c_e[8] = {0.0, 0.07};
  s.renormalize();
  const double dt = 2e-3;
  const FockPropagator prop(p, 8, dt);
  FockLadderState a = s;
  prop.step(a);
  const auto b = rk4_step(s, dt, [&p](const FockLadderState& x) { return eom_fock(x, p); });
  CHECK(max_diff(a, b) < 1e-13);
}

TEST_CASE("closed system: Hamiltonian steps conserve the norm and the ensemble has zero variance") {
  PhysicalParams p = driven();
  p.gamma_e = p.gamma_r = p.kappa = 0.0;
  const auto s0 = coherent_ladder(cplx(1.0, 0.0), 10, 1e-6);
  McwfOptions mo{2.0, 1e-3, 0.1};
  const auto t = run_trajectory(s0, p, mo, 42);
  CHECK(t.jumps.empty());
  CHECK(t.final_state.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));

  EnsembleOptions eo{mo, 20, 5, 2};
  const auto r = ensemble_average(s0, p, eo);
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    CHECK(r.stderr_photon[k] == 0.0);
    CHECK(r.stderr_rydberg[k] == 0.0);
    CHECK(r.mean_photon[k] == doctest::Approx(t.mean_photon[k]).epsilon(1e-15));
  }
}

TEST_CASE("single-trajectory ensemble reproduces run_trajectory") {
  const PhysicalParams p = driven();
  const auto s0 = coherent_ladder(cplx(1.0, 0.0), 6, 1e-3);
  McwfOptions mo{3.0, 1e-3, 0.05};
  EnsembleOptions eo{mo, 1, 99, 1};
  const auto r = ensemble_average(s0, p, eo);
  const auto t = run_trajectory(s0, p, mo, trajectory_seed(99, 0));
  CHECK(r.times == t.times);
  CHECK(r.mean_photon == t.mean_photon);
  CHECK(r.rydberg_pop == t.rydberg_pop);
  std::uint64_t jumps = 0;
  for (auto c : r.jump_counts) jumps += c;
  CHECK(jumps == t.jumps.size());
}

TEST_CASE("ensemble statistics are independent of the worker count") {
  const PhysicalParams p = driven();
  const auto s0 = coherent_ladder(cplx(1.0, 0.0), 6, 1e-3);
  McwfOptions mo{2.0, 1e-3, 0.1};
  EnsembleOptions eo{mo, 75, 2024, 1};
  const auto a = ensemble_average(s0, p, eo);
  for (unsigned w : {2u, 3u, 8u}) {
    eo.workers = w;
    const auto b = ensemble_average(s0, p, eo);
    CHECK(a.mean_photon == b.mean_photon);
    CHECK(a.stderr_photon == b.stderr_photon);
    CHECK(a.rydberg_pop == b.rydberg_pop);
    CHECK(a.stderr_rydberg == b.stderr_rydberg);
    CHECK(a.jump_counts == b.jump_counts);
  }
  std::ostringstream x, y;
  write_ensemble_csv(x, a);
  eo.workers = 4;
  write_ensemble_csv(y, ensemble_average(s0, p, eo));
  CHECK(x.str() == y.str());
  const auto table = read_csv(x.str());
  CHECK(table.header == std::vector<std::string>{"t_us", "mean_photon", "stderr_photon",
                                                 "rydberg_pop", "stderr_rydberg"});
}

TEST_CASE("trajectory seeds are distinct and the uniform stream lies in [0, 1)") {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.push_back(trajectory_seed(3, i));
  std::sort(seeds.begin(), seeds.end());
  CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
  CHECK(trajectory_seed(3, 0) != trajectory_seed(4, 0));
  UniformStream u(1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = u.next();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    sum += x;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("cavity photon detection times follow the exponential law") {
  PhysicalParams p;
  p.kappa = 1.0;  // rad/us
  FockLadderState s0(1);
  s0.c_b[1] = 1.0;
  const McwfOptions mo{6.0, 1e-3, 6.0};  // kappa dt = 1e-3
  const std::size_t n = 10000;
  std::vector<double> first;
  for (std::size_t i = 0; i < n; ++i) {
    const auto t = run_trajectory(s0, p, mo, trajectory_seed(11, i));
    REQUIRE(t.jumps.size() <= 1);
    if (!t.jumps.empty()) {
      CHECK(t.jumps[0].kind == JumpKind::Kappa);
      first.push_back(t.jumps[0].time);
    }
  }
  std::sort(first.begin(), first.end());
  const double d =
      oracle::ks_statistic(first, n, [&](double t) { return 1.0 - std::exp(-p.kappa * t); });
  const double p_value = oracle::kolmogorov_survival(std::sqrt(static_cast<double>(n)) * d);
  INFO("KS D = " << d << ", p = " << p_value);
  CHECK(p_value > 0.01);
  // censored fraction e^{-6}
  const double censored = 1.0 - static_cast<double>(first.size()) / n;
  CHECK(censored == doctest::Approx(std::exp(-6.0)).epsilon(0.5));
}
