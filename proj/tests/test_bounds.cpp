#include <doctest.h>

#include <cmath>
#include <random>

#include "dualaction/action.hpp"
#include "dualaction/bounds.hpp"
#include "dualaction/error.hpp"

using namespace dualaction;

namespace {

const HamiltonianModel saddle = HamiltonianModel::saddle_quadratic();
const TimeGrid grid{0.0, 1.0, 400};

ShootingReport s_critical() {
  return solve_position_bvp(saddle, {BoundaryKind::position, 0.0, 1.0}, grid);
}

}  // namespace

TEST_CASE("restrictions invert each other on the critical path") {
  const auto r = s_critical();
  const auto pi = pi_from_theta(saddle, grid, r.path.q());
  const auto theta = theta_from_pi(saddle, grid, r.path.p());
  for (std::size_t j = 1; j + 1 < grid.nodes(); j += 37) {
    CHECK(pi[j] == doctest::Approx(r.path.p()[j]).epsilon(1e-4));
    CHECK(theta[j] == doctest::Approx(r.path.q()[j]).epsilon(1e-4));
  }
}

TEST_CASE("root-finding restriction agrees with the separable shortcut") {
  // Same Hamiltonian, written as a black box so pi_from_theta must solve H_p = theta'.
  const auto boxed = HamiltonianModel::general([](double p, double q) { return 0.5 * p * p - 0.5 * q * q; });
  const auto r = s_critical();
  const auto a = pi_from_theta(saddle, grid, r.path.q());
  const auto b = pi_from_theta(boxed, grid, r.path.q());
  for (std::size_t j = 0; j < grid.nodes(); j += 50) CHECK(a[j] == doctest::Approx(b[j]).epsilon(1e-8));
}

TEST_CASE("theta restriction needs q-dependence in H_q") {
  try {
    theta_from_pi(HamiltonianModel::free_particle(), grid, std::vector<double>(grid.nodes(), 1.0));
    FAIL("expected unsolvable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unsolvable);
  }
}

TEST_CASE("functionals reproduce S and R on the critical path") {
  const auto r = s_critical();
  const double s = action_s(saddle, r.path).value;
  CHECK(functional_J(saddle, grid, r.path.q()) == doctest::Approx(s).epsilon(1e-4));
  CHECK(functional_G(saddle, grid, r.path.p()) == doctest::Approx(s).epsilon(1e-4));
  const double rv = action_r(saddle, r.path).value;
  CHECK(functional_Jp(saddle, grid, r.path.q(), r.path.p().front()) == doctest::Approx(rv).epsilon(1e-4));
  CHECK(functional_Gp(saddle, grid, r.path.p(), r.path.q().front()) == doctest::Approx(rv).epsilon(1e-4));
}

TEST_CASE("random series shapes and normalization") {
  std::mt19937_64 rng(3);
  for (auto shape : {SeriesShape::sine, SeriesShape::cosine, SeriesShape::mixed}) {
    const auto f = random_series(grid, shape, 5, 0.2, rng);
    double sup = 0.0;
    for (double x : f) sup = std::max(sup, std::abs(x));
    CHECK(sup == doctest::Approx(0.2));
    if (shape == SeriesShape::sine) {
      CHECK(std::abs(f.front()) < 1e-15);
      CHECK(std::abs(f.back()) < 1e-12);
    }
    if (shape == SeriesShape::cosine) {
      const double h = grid.step();
      CHECK(std::abs(f[1] - f[0]) / h < 1e-2);
    }
  }
}

TEST_CASE("both chains certify with zero violations") {
  PerturbationSpec spec;
  const auto s = certify_bounds(saddle, BoundChain::S, s_critical(), spec, 200);
  CHECK(s.violations == 0);
  CHECK(s.records.size() == 200);
  for (const auto& rec : s.records) {
    CHECK(rec.lower <= rec.critical + rec.slack);
    CHECK(rec.critical <= rec.upper + rec.slack);
  }
  spec.pinned = PinnedVariable::p;
  const auto rc = solve_momentum_bvp(saddle, {BoundaryKind::momentum, 1.0, 2.0}, grid);
  const auto r = certify_bounds(saddle, BoundChain::R, rc, spec, 200);
  CHECK(r.violations == 0);
}

TEST_CASE("margins shrink quadratically with the perturbation size") {
  PerturbationSpec spec;
  spec.modes = 3;
  auto worst = [&](double eps) {
    spec.amplitude = eps;
    const auto c = certify_bounds(saddle, BoundChain::S, s_critical(), spec, 20);
    double m = 0.0;
    for (const auto& r : c.records) m = std::max(m, r.upper_margin());
    return m;
  };
  const double ratio = worst(0.2) / worst(0.1);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("certification is seeded") {
  PerturbationSpec spec;
  const auto a = certify_bounds(saddle, BoundChain::S, s_critical(), spec, 10);
  const auto b = certify_bounds(saddle, BoundChain::S, s_critical(), spec, 10);
  spec.seed = 2;
  const auto c = certify_bounds(saddle, BoundChain::S, s_critical(), spec, 10);
  CHECK(a.records[3].upper == b.records[3].upper);
  CHECK(a.records[3].upper != c.records[3].upper);
}

TEST_CASE("certification preconditions") {
  PerturbationSpec spec;
  const auto sho = HamiltonianModel::harmonic();
  const auto sho_path = solve_position_bvp(sho, {BoundaryKind::position, 0.0, 1.0}, grid);
  try {
    certify_bounds(sho, BoundChain::S, sho_path, spec, 5);
    FAIL("expected not-saddle");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_saddle);
  }
  spec.pinned = PinnedVariable::p;
  CHECK_THROWS_AS(certify_bounds(saddle, BoundChain::S, s_critical(), spec, 5), Error);
  spec.pinned = PinnedVariable::q;
  spec.modes = 0;
  CHECK_THROWS_AS(certify_bounds(saddle, BoundChain::S, s_critical(), spec, 5), Error);
  spec.modes = 8;
  const TimeGrid odd{0.0, 1.0, 401};
  const auto odd_path = solve_position_bvp(saddle, {BoundaryKind::position, 0.0, 1.0}, odd);
  CHECK_THROWS_AS(certify_bounds(saddle, BoundChain::S, odd_path, spec, 5), Error);
}
