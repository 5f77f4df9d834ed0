#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dualaction/action.hpp"
#include "dualaction/extrema.hpp"
#include "oracles.hpp"

using namespace dualaction;

namespace {

HamiltonianModel p2_minus_q2() {
  return HamiltonianModel::polynomial(BivariatePolynomial({{2, 0, 1.0}, {0, 2, -1.0}}));
}

PhasePath critical(const HamiltonianModel& h, double t = 1.0) {
  return solve_position_bvp(h, {BoundaryKind::position, 0.0, 1.0}, {0.0, t, 400}).path;
}

}  // namespace

TEST_CASE("printed matrix examples") {
  const auto a = hessian_s(p2_minus_q2(), 0.3, -0.2);
  CHECK(a.a11 == 2.0);
  CHECK(a.a12 == 0.0);
  CHECK(a.a22 == 2.0);
  const auto b = hessian_s(HamiltonianModel::harmonic(), 0.3, 0.4);
  CHECK(b.a11 == doctest::Approx(1.0));
  CHECK(b.a22 == doctest::Approx(-1.0));
  const auto c = hessian_r(HamiltonianModel::saddle_quadratic(), 0.3, 0.4);
  CHECK(c.a11 == doctest::Approx(-1.0));
  CHECK(c.a22 == doctest::Approx(-1.0));
  const auto d = hessian_r(HamiltonianModel::free_particle(2.0), 1.0, 1.0);
  CHECK(d.a11 == doctest::Approx(-0.5));
  CHECK(d.a22 == 0.0);
}

TEST_CASE("matrix entries match hand-written third derivatives") {
  const oracle::Cubic c{0.7, -0.4, 0.3, -0.2};
  const auto h = HamiltonianModel::polynomial(BivariatePolynomial(
      {{2, 0, c.a}, {0, 2, c.b}, {1, 2, c.c}, {2, 1, c.d}}));
  for (double p : {-1.0, 0.5}) {
    for (double q : {-0.3, 2.0}) {
      const auto s = hessian_s(h, p, q);
      const auto se = c.s_entries(p, q);
      CHECK(s.a11 == doctest::Approx(se[0]));
      CHECK(s.a12 == doctest::Approx(se[1]));
      CHECK(s.a22 == doctest::Approx(se[2]));
      const auto r = hessian_r(h, p, q);
      const auto re = c.r_entries(p, q);
      CHECK(r.a11 == doctest::Approx(re[0]));
      CHECK(r.a12 == doctest::Approx(re[1]));
      CHECK(r.a22 == doctest::Approx(re[2]));
    }
  }
}

TEST_CASE("eigenvalues: trace, determinant and ordering") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 500; ++k) {
    SecondVariationMatrix m{u(rng), u(rng), u(rng)};
    if (k % 50 == 0) m.a22 = m.a12 * m.a12 / m.a11;  // singular case
    const auto e = m.eigenvalues();
    CHECK(e[0] <= e[1]);
    CHECK(e[0] + e[1] == doctest::Approx(m.a11 + m.a22));
    CHECK(std::abs(e[0] * e[1] - m.determinant()) <= 1e-12 * std::max(1.0, std::abs(m.a11 * m.a22)));
  }
  // Tiny eigenvalue next to a large one keeps relative accuracy.
  const SecondVariationMatrix stiff{1e8, 0.0, 1e-8};
  CHECK(stiff.eigenvalues()[0] == doctest::Approx(1e-8));
}

TEST_CASE("classification verdicts") {
  const auto q = p2_minus_q2();
  CHECK(classify_extremum(q, critical(q), WhichAction::S).classification == Extremum::minimum);
  const auto sho = HamiltonianModel::harmonic();
  CHECK(classify_extremum(sho, critical(sho), WhichAction::S).classification == Extremum::indefinite);
  const auto saddle = HamiltonianModel::saddle_quadratic();
  CHECK(classify_extremum(saddle, critical(saddle), WhichAction::R).classification == Extremum::maximum);
  CHECK(classify_extremum(saddle, critical(saddle), WhichAction::S).classification == Extremum::minimum);
  const auto free = HamiltonianModel::free_particle();
  const auto rep = classify_extremum(free, critical(free), WhichAction::S);
  CHECK(rep.classification == Extremum::degenerate);
  CHECK(rep.zero_tolerance == doctest::Approx(1e-9));
}

TEST_CASE("separable models: S is minimum iff -H_qq > 0 along the path") {
  for (double c2 : {-0.8, -0.1, 0.1, 0.6}) {
    const auto h = HamiltonianModel::separable(1.0, std::vector<double>{0.0, 0.0, c2});
    const auto rep = classify_extremum(h, critical(h), WhichAction::S);
    CHECK((rep.classification == Extremum::minimum) == (-2.0 * c2 > 0.0));
    for (const auto& n : rep.nodes) CHECK(n.lambda1 * n.lambda2 == doctest::Approx(n.determinant));
  }
}

TEST_CASE("classification does not see a momentum-linear term B(q) p") {
  // B(q) = 3 q^2: H = p^2/2 + 3 q^2 p + q^2/2 against the same path.
  const auto base = HamiltonianModel::harmonic();
  const auto with_b = HamiltonianModel::polynomial(
      BivariatePolynomial({{2, 0, 0.5}, {1, 2, 3.0}, {0, 2, 0.5}}));
  const auto path = critical(base);
  const auto a = classify_extremum(base, path, WhichAction::S);
  const auto b = classify_extremum(with_b, path, WhichAction::S);
  CHECK(a.classification == b.classification);
  REQUIRE(a.nodes.size() == b.nodes.size());
  for (std::size_t j = 0; j < a.nodes.size(); ++j) {
    CHECK(a.nodes[j].lambda1 == b.nodes[j].lambda1);
    CHECK(a.nodes[j].lambda2 == b.nodes[j].lambda2);
  }
}

TEST_CASE("stationarity is reported and CSV has a header") {
  const auto sho = HamiltonianModel::harmonic();
  const auto on = classify_extremum(sho, critical(sho), WhichAction::S);
  const auto off = classify_extremum(sho, smooth_random_path({0.0, 1.0, 400}, 2), WhichAction::S);
  CHECK(on.stationarity < 1e-3);
  CHECK(off.stationarity > 1e-2);
  std::ostringstream out;
  write_csv(out, on);
  CHECK(out.str().rfind("t,lambda1,lambda2", 0) == 0);
}
