#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dualaction/error.hpp"
#include "dualaction/propagator.hpp"
#include "oracles.hpp"

using namespace dualaction;

namespace {

double rel(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("free chain is exact for any slicing") {
  const auto free = HamiltonianModel::free_particle(1.7);
  for (std::size_t n : {1u, 2u, 7u, 64u}) {
    const auto v = sliced_position_propagator(free, 0.2, -0.9, 1.3, {n, Representation::position});
    CHECK(rel(v.amplitude, oracle::free_position_kernel(1.7, 0.2, -0.9, 1.3)) < 1e-12);
  }
}

TEST_CASE("oscillator chain converges to the Mehler kernel at second order") {
  const auto sho = HamiltonianModel::harmonic(1.2, 0.9);
  const auto exact = oracle::sho_position_kernel(1.2, 0.9, 0.3, 0.7, 1.4);
  auto err = [&](std::size_t n) {
    return rel(sliced_position_propagator(sho, 0.3, 0.7, 1.4, {n, Representation::position}).amplitude,
               exact);
  };
  const double e1 = err(128), e2 = err(256);
  CHECK(e2 < 1e-4);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("inverted oscillator has no caustic") {
  const auto saddle = HamiltonianModel::saddle_quadratic();
  const auto v = sliced_position_propagator(saddle, 0.0, 1.0, 5.0, {512, Representation::position});
  CHECK(std::isfinite(std::abs(v.amplitude)));
  CHECK(std::abs(v.amplitude) < std::abs(oracle::free_position_kernel(1.0, 0.0, 1.0, 5.0)));
}

TEST_CASE("momentum chain matches the momentum-space closed form") {
  const auto sho = HamiltonianModel::harmonic(0.8, 1.1);
  const auto exact = oracle::sho_momentum_kernel(0.8, 1.1, 0.4, -0.2, 0.9);
  const auto v = sliced_momentum_propagator(sho, 0.4, -0.2, 0.9, {512, Representation::momentum});
  CHECK(rel(v.amplitude, exact) < 1e-5);
}

TEST_CASE("kernels are symmetric in their endpoints") {
  const auto sho = HamiltonianModel::harmonic();
  const auto k = momentum_chain(sho, 0.7, 100);
  CHECK(k.c_ff == doctest::Approx(k.c_ii));
  CHECK(k(0.3, -0.4) == k(-0.4, 0.3));
}

TEST_CASE("chain action equals the Gaussian exponent on the stationary path") {
  for (double stiffness : {0.0, 1.3, -0.7}) {
    const auto k = gaussian_chain(1.0, stiffness, 1.1, 40);
    const auto x = chain_classical_path(1.0, stiffness, 0.25, -0.6, 1.1, 40);
    CHECK(x.front() == 0.25);
    CHECK(x.back() == -0.6);
    CHECK(chain_action(1.0, stiffness, x, 1.1) == doctest::Approx(k.exponent(-0.6, 0.25)).epsilon(1e-12));
  }
}

TEST_CASE("semigroup: composing two chains gives the joined chain") {
  // Integrate the midpoint numerically on a wide grid.
  const double t1 = 0.4, t2 = 0.5;
  const auto a = gaussian_chain(1.0, 1.0, t1, 8);
  const auto b = gaussian_chain(1.0, 1.0, t2, 10);
  const auto joined = gaussian_chain(1.0, 1.0, t1 + t2, 18);
  const double xi = 0.3, xf = -0.2;
  // Rotate the contour slightly into the convergent half-plane.
  const Complex tilt = std::polar(1.0, 0.2);
  Complex sum = 0.0;
  const double h = 1e-3;
  for (double s = -12.0; s <= 12.0; s += h) {
    const Complex x = tilt * s;
    auto eval = [](const GaussianKernel& k, Complex f, Complex i) {
      return k.prefactor * std::exp(Complex(0, 1) * (k.c_ff * f * f + k.c_ii * i * i + k.c_if * f * i));
    };
    sum += eval(b, xf, x) * eval(a, x, xi) * tilt * h;
  }
  CHECK(rel(sum, joined(xf, xi)) < 1e-6);
}

TEST_CASE("caustics and invalid slicing") {
  const auto sho = HamiltonianModel::harmonic();
  try {
    sliced_position_propagator(sho, 0.0, 0.0, std::numbers::pi, {256, Representation::position});
    FAIL("expected caustic");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::caustic);
  }
  CHECK_THROWS_AS(sliced_position_propagator(sho, 0, 0, 1.0, {0, Representation::position}), Error);
  CHECK_THROWS_AS(
      sliced_momentum_propagator(HamiltonianModel::constant_force(1, 1), 0, 0, 1.0, {8, Representation::momentum}),
      Error);
}

TEST_CASE("free momentum propagator is a delta with an exact phase") {
  const auto on = free_momentum_propagator(2.0, 1.5, 1.5, 0.8);
  CHECK(on.variant == PropagatorValue::Variant::delta);
  CHECK(on.support_matched);
  CHECK(on.causal);
  CHECK(std::abs(on.phase - oracle::free_momentum_phase(2.0, 1.5, 0.8)) < 1e-15);
  CHECK_FALSE(free_momentum_propagator(2.0, 1.5, 1.6, 0.8).support_matched);
  CHECK_FALSE(free_momentum_propagator(2.0, 1.5, 1.5, -0.8).causal);
}

TEST_CASE("window is smooth and bounded") {
  CHECK(window(0.0, 2.0, 4.0) == 1.0);
  CHECK(window(2.0, 2.0, 4.0) == 1.0);
  CHECK(window(4.0, 2.0, 4.0) == 0.0);
  CHECK(window(3.0, 2.0, 4.0) == doctest::Approx(0.5));
  double prev = 1.0;
  for (double x = 2.0; x <= 4.0; x += 0.01) {
    const double w = window(x, 2.0, 4.0);
    CHECK(w <= prev + 1e-15);
    prev = w;
  }
}

TEST_CASE("Fourier round trip is the identity") {
  FourierGrid g;
  g.points = 64;
  g.flat_radius = 3.0;
  g.taper_radius = 5.0;
  const auto sho = HamiltonianModel::harmonic();
  const auto kernel = position_chain(sho, 1.0, 64);
  const auto sampled = sample_kernel([&](double f, double i) { return kernel(f, i); },
                                     Representation::position, g);
  const auto there = fourier_transform(sampled, g);
  CHECK(there.rep == Representation::momentum);
  const auto back = fourier_transform(there, g);
  double worst = 0.0;
  for (std::size_t k = 0; k < sampled.values.size(); ++k) {
    worst = std::max(worst, std::abs(back.values[k] - sampled.values[k]));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("delta-source transform reproduces the free position kernel") {
  FourierGrid g;
  g.points = 512;
  g.spacing = 48.0 / 512.0;
  g.flat_radius = 8.0;
  g.taper_radius = 16.0;
  const std::vector<double> dq{-3.0, -1.0, 0.0, 0.5, 2.0, 3.0};
  const auto v = fourier_endpoints(DeltaSource{1.0, 1.0, 1.0}, g, dq);
  for (std::size_t k = 0; k < dq.size(); ++k) {
    // With unit weight the momentum integral is the free position kernel itself.
    CHECK(std::abs(v[k] - oracle::free_position_kernel(1.0, 0.0, dq[k], 1.0)) < 1e-4);
  }
  try {
    fourier_endpoints(DeltaSource{1.0, 1e-3, 1.0}, g, dq);
    FAIL("expected bandwidth error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::bandwidth);
  }
}

TEST_CASE("normalization extraction of the exact kernel is one") {
  for (double t : {0.5, 1.0, 2.0}) {
    CHECK(normalization_extraction(oracle::free_position_kernel(1.3, 0.0, 0.7, t), 1.3, t) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("sampled kernel CSV") {
  FourierGrid g;
  g.points = 8;
  g.flat_radius = 1.0;
  g.taper_radius = 2.0;
  const auto s = sample_kernel([](double, double) { return Complex(1, 0); }, Representation::position, g);
  std::ostringstream out;
  write_csv(out, s);
  CHECK(out.str().rfind("final,initial,re,im", 0) == 0);
}
