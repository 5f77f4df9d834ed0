#pragma once

// Closed forms used as test oracles. Nothing here calls into the library.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

// sqrt(1 / i) on the principal branch.
inline cplx inv_sqrt_i() { return std::polar(1.0, -pi / 4.0); }

inline double free_action(double m, double qi, double qf, double t) {
  return m * (qf - qi) * (qf - qi) / (2.0 * t);
}

// Classical action of p^2/2m + m w^2 q^2/2 between (qi, 0) and (qf, t).
inline double sho_action(double m, double w, double qi, double qf, double t) {
  const double s = std::sin(w * t), c = std::cos(w * t);
  return m * w / (2.0 * s) * ((qi * qi + qf * qf) * c - 2.0 * qi * qf);
}

// Same for the inverted oscillator p^2/2m - k q^2/2.
inline double saddle_action(double m, double k, double qi, double qf, double t) {
  const double g = std::sqrt(k / m);
  const double s = std::sinh(g * t), c = std::cosh(g * t);
  return m * g / (2.0 * s) * ((qi * qi + qf * qf) * c - 2.0 * qi * qf);
}

// Initial momentum of the SHO path from qi to qf in time t.
inline double sho_initial_momentum(double m, double w, double qi, double qf, double t) {
  return m * w * (qf - qi * std::cos(w * t)) / std::sin(w * t);
}

inline cplx free_position_kernel(double m, double qi, double qf, double t) {
  return std::sqrt(m / (2.0 * pi * t)) * inv_sqrt_i() *
         std::exp(cplx(0.0, free_action(m, qi, qf, t)));
}

// Mehler kernel, valid for 0 < w t < pi.
inline cplx sho_position_kernel(double m, double w, double qi, double qf, double t) {
  return std::sqrt(m * w / (2.0 * pi * std::sin(w * t))) * inv_sqrt_i() *
         std::exp(cplx(0.0, sho_action(m, w, qi, qf, t)));
}

// Momentum-space SHO kernel: the position form with m -> 1 / (m w^2).
inline cplx sho_momentum_kernel(double m, double w, double pi_, double pf, double t) {
  return sho_position_kernel(1.0 / (m * w * w), w, pi_, pf, t);
}

inline cplx free_momentum_phase(double m, double p, double t) {
  return std::exp(cplx(0.0, -p * p * t / (2.0 * m)));
}

// Spin-1/2: every path has |l| = l, so the unconstrained sum is 2^N equal
// phases over 2^N.
inline cplx spin_half_unconstrained(double inertia, double l, double t) {
  return std::exp(cplx(0.0, -l * l * t / (2.0 * inertia)));
}

// Brute force over sign strings of length n with both ends fixed.
inline double filtered_sign_count(int n, int first, int last) {
  double count = 0.0;
  for (long mask = 0; mask < (1L << n); ++mask) {
    const int a = (mask & 1) ? -1 : 1;
    const int b = (mask >> (n - 1) & 1) ? -1 : 1;
    if (a == first && b == last) count += 1.0;
  }
  return count;
}

// Composite spin: per interval two constituents of +-l0 each, t split evenly.
// Direct sum over all 4^N constituent sign strings.
inline cplx composite_bruteforce(double inertia, double l0, double t, int n) {
  cplx total = 0.0;
  const long combos = 1L << (2 * n);
  for (long mask = 0; mask < combos; ++mask) {
    double phase = 0.0;
    for (int j = 0; j < n; ++j) {
      const double s1 = (mask >> (2 * j) & 1) ? -l0 : l0;
      const double s2 = (mask >> (2 * j + 1) & 1) ? -l0 : l0;
      const double lj = s1 + s2;
      phase += -lj * lj * t / (static_cast<double>(n) * 2.0 * inertia);
    }
    total += std::exp(cplx(0.0, phase));
  }
  return total / static_cast<double>(combos);
}

// Second-variation entries written out for H = a p^2 + b q^2 + c p q^2 + d p^2 q.
struct Cubic {
  double a, b, c, d;
  double hpp(double, double q) const { return 2 * a + 2 * d * q; }
  double hqq(double p, double) const { return 2 * b + 2 * c * p; }
  double hppp() const { return 0.0; }
  double hppq() const { return 2 * d; }
  double hpqq() const { return 2 * c; }
  double hqqq() const { return 0.0; }
  // S matrix: [H_pp + p H_ppp, p H_ppq; p H_ppq, p H_pqq - H_qq]
  std::array<double, 3> s_entries(double p, double q) const {
    return {hpp(p, q) + p * hppp(), p * hppq(), p * hpqq() - hqq(p, q)};
  }
  // R matrix: [q H_ppq - H_pp, q H_qqp; q H_qqp, q H_qqq + H_qq]
  std::array<double, 3> r_entries(double p, double q) const {
    return {q * hppq() - hpp(p, q), q * hpqq(), q * hqqq() + hqq(p, q)};
  }
};

// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
