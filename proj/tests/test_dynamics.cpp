#include <doctest.h>

#include <cmath>

#include "dualaction/dynamics.hpp"
#include "dualaction/error.hpp"
#include "oracles.hpp"

using namespace dualaction;

TEST_CASE("grid and path validation") {
  CHECK_THROWS_AS((TimeGrid{0.0, 1.0, 0}.validate()), Error);
  CHECK_THROWS_AS((TimeGrid{1.0, 1.0, 10}.validate()), Error);
  const TimeGrid g{0.0, 1.0, 4};
  CHECK_THROWS_AS(PhasePath(g, {0, 0, 0}, {0, 0, 0, 0, 0}), Error);
  CHECK_THROWS_AS(PhasePath(g, {0, 0, NAN, 0, 0}, {0, 0, 0, 0, 0}), Error);
}

TEST_CASE("RK4 reproduces the oscillator to fourth order") {
  const auto sho = HamiltonianModel::harmonic(1.0, 2.0);
  auto err = [&](std::size_t n) {
    const auto path = integrate_ivp(sho, 1.0, 0.5, {0.0, 3.0, n});
    const double t = 3.0, w = 2.0;
    const double q = 0.5 * std::cos(w * t) + std::sin(w * t) / w;
    return std::abs(path.q().back() - q);
  };
  const double e1 = err(100), e2 = err(200);
  CHECK(e1 < 1e-5);
  CHECK(e1 / e2 > 14.0);
}

TEST_CASE("energy is conserved along a quartic trajectory") {
  const auto quartic = HamiltonianModel::separable(1.0, std::vector<double>{0, 0, 0, 0, 1.0});
  const auto path = integrate_ivp(quartic, 0.3, 1.0, {0.0, 5.0, 4000});
  const double e0 = quartic(path.p().front(), path.q().front());
  for (std::size_t j = 0; j < path.p().size(); j += 400) {
    CHECK(quartic(path.p()[j], path.q()[j]) == doctest::Approx(e0).epsilon(1e-9));
  }
}

TEST_CASE("exponential blow-up is reported with its node") {
  const auto cubic = HamiltonianModel::separable(1.0, std::vector<double>{0, 0, 0, 0, -1.0});
  try {
    integrate_ivp(cubic, 10.0, 10.0, {0.0, 10.0, 200});
    FAIL("expected blow-up");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::blow_up);
    CHECK(e.node().has_value());
  }
}

TEST_CASE("position BVP matches the closed-form initial momentum") {
  for (double t : {0.5, 1.0, 2.5}) {
    const auto sho = HamiltonianModel::harmonic(1.5, 1.2);
    const auto r = solve_position_bvp(sho, {BoundaryKind::position, 0.3, -0.7}, {0.0, t, 400});
    CHECK(r.flag == Degeneracy::unique);
    CHECK(r.residual <= 1e-9);
    CHECK(r.free_parameter ==
          doctest::Approx(oracle::sho_initial_momentum(1.5, 1.2, 0.3, -0.7, t)).epsilon(1e-8));
    CHECK(r.path.q().back() == doctest::Approx(-0.7).epsilon(1e-9));
  }
}

TEST_CASE("position BVP with a boundary type mismatch is rejected") {
  const auto free = HamiltonianModel::free_particle();
  CHECK_THROWS_AS(solve_position_bvp(free, {BoundaryKind::momentum, 0, 1}, {0.0, 1.0, 10}), Error);
}

TEST_CASE("conjugate points are flagged") {
  const auto sho = HamiltonianModel::harmonic();
  const TimeGrid at_pi{0.0, std::numbers::pi, 1000};
  CHECK(solve_position_bvp(sho, {BoundaryKind::position, 0.0, 0.0}, at_pi).flag ==
        Degeneracy::conjugate_degenerate);
  // A non-zero end at the conjugate time has no solution at all.
  CHECK(solve_position_bvp(sho, {BoundaryKind::position, 0.0, 1.0}, at_pi).flag ==
        Degeneracy::infeasible);
  const auto near = solve_position_bvp(sho, {BoundaryKind::position, 0.0, 0.0},
                                       {0.0, std::numbers::pi - 0.1, 1000});
  CHECK(near.flag == Degeneracy::unique);
  CHECK(std::abs(near.free_parameter) < 1e-9);
}

TEST_CASE("momentum BVP") {
  const auto free = HamiltonianModel::free_particle();
  const TimeGrid g{0.0, 1.0, 200};
  const auto same = solve_momentum_bvp(free, {BoundaryKind::momentum, 1.0, 1.0}, g);
  CHECK(same.flag == Degeneracy::unique_up_to_offset);
  CHECK(same.solved());
  CHECK(solve_momentum_bvp(free, {BoundaryKind::momentum, 1.0, 2.0}, g).flag ==
        Degeneracy::infeasible);

  // p(t) = p0 cos t - q0 sin t for m = w = 1.
  const auto sho = HamiltonianModel::harmonic();
  const auto r = solve_momentum_bvp(sho, {BoundaryKind::momentum, 1.0, 0.2}, {0.0, 1.0, 400});
  CHECK(r.flag == Degeneracy::unique);
  CHECK(r.free_parameter == doctest::Approx((std::cos(1.0) - 0.2) / std::sin(1.0)).epsilon(1e-8));

  // Constant force: p(t) = p0 + F t regardless of q0.
  const auto force = HamiltonianModel::constant_force(1.0, 2.0);
  CHECK(solve_momentum_bvp(force, {BoundaryKind::momentum, 0.0, 2.0}, g).flag ==
        Degeneracy::unique_up_to_offset);
}

TEST_CASE("shooting is deterministic") {
  const auto sho = HamiltonianModel::harmonic();
  const auto a = solve_position_bvp(sho, {BoundaryKind::position, 0.1, 0.9}, {0.0, 2.0, 300});
  const auto b = solve_position_bvp(sho, {BoundaryKind::position, 0.1, 0.9}, {0.0, 2.0, 300});
  CHECK(a.free_parameter == b.free_parameter);
  CHECK(a.path.q() == b.path.q());
}
