#include "dualaction/spin.hpp"

#include <cmath>

#include "dualaction/error.hpp"

namespace dualaction {

double SpinPathEnsemble::path_count() const {
  double total = 0.0;
  for (const auto& v : values) total += v.multiplicity;
  return std::pow(total, static_cast<double>(intervals));
}

double SpinPathEnsemble::value_paths() const {
  return std::pow(static_cast<double>(values.size()), static_cast<double>(intervals));
}

void SpinPathEnsemble::validate() const {
  if (intervals < 1) throw Error(ErrorCode::invalid_argument, "need >= 1 interval");
  if (values.empty()) throw Error(ErrorCode::invalid_argument, "need >= 1 interval value");
  for (const auto& v : values) {
    if (v.multiplicity < 1) {
      throw Error(ErrorCode::invalid_argument, "multiplicities must be >= 1");
    }
  }
}

namespace {

void require_inertia(double inertia) {
  if (!(inertia > 0.0)) throw Error(ErrorCode::invalid_argument, "inertia must be > 0");
}

bool admitted_at(const SpinPathEnsemble& e, std::size_t interval, double value) {
  if (e.policy == EndpointPolicy::unconstrained) return true;
  if (interval == 0 && value != e.first) return false;
  if (interval + 1 == e.intervals && value != e.last) return false;
  return true;
}

}  // namespace

namespace {

struct Neumaier {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

SpinAmplitude enumerate_paths(const SpinPathEnsemble& e, double inertia, double t) {
  e.validate();
  require_inertia(inertia);
  if (e.value_paths() > kEnumerationCap) {
    throw Error(ErrorCode::enumeration_cap, "too many paths to enumerate");
  }
  const std::size_t n = e.intervals;
  const std::size_t v = e.values.size();
  const double rate = t / static_cast<double>(n) / (2.0 * inertia);
  std::vector<std::size_t> digit(n, 0);
  // Compensated sums: up to 2^20 terms of comparable size.
  Neumaier re, im;
  double admitted = 0.0;
  for (;;) {
    bool ok = true;
    double weight = 1.0;
    double sum_sq = 0.0;
    for (std::size_t j = 0; j < n && ok; ++j) {
      const auto& iv = e.values[digit[j]];
      ok = admitted_at(e, j, iv.value);
      weight *= iv.multiplicity;
      sum_sq += iv.value * iv.value;
    }
    if (ok) {
      re.add(weight * std::cos(-rate * sum_sq));
      im.add(weight * std::sin(-rate * sum_sq));
      admitted += weight;
    }
    std::size_t j = 0;
    while (j < n && ++digit[j] == v) digit[j++] = 0;
    if (j == n) break;
  }
  const double count = e.path_count();
  return {Complex(re.value(), im.value()) / count, admitted, count, SpinMethod::enumeration};
}

SpinAmplitude closed_form(const SpinPathEnsemble& e, double inertia, double t) {
  e.validate();
  require_inertia(inertia);
  const double rate = t / static_cast<double>(e.intervals) / (2.0 * inertia);
  Complex amp(1.0, 0.0);
  double admitted = 1.0;
  for (std::size_t j = 0; j < e.intervals; ++j) {
    Complex factor(0.0, 0.0);
    double weight = 0.0;
    for (const auto& iv : e.values) {
      if (!admitted_at(e, j, iv.value)) continue;
      factor += static_cast<double>(iv.multiplicity) *
                std::polar(1.0, -rate * iv.value * iv.value);
      weight += iv.multiplicity;
    }
    amp *= factor;
    admitted *= weight;
  }
  const double count = e.path_count();
  return {amp / count, admitted, count, SpinMethod::closed_form};
}

SpinPathEnsemble spin_half_ensemble(double l, int sign_i, int sign_f,
                                    std::size_t intervals, EndpointPolicy policy) {
  if ((sign_i != 1 && sign_i != -1) || (sign_f != 1 && sign_f != -1)) {
    throw Error(ErrorCode::invalid_argument, "signs must be +1 or -1");
  }
  SpinPathEnsemble e;
  e.intervals = intervals;
  e.values = {{l, 1}, {-l, 1}};
  e.policy = policy;
  e.first = sign_i * l;
  e.last = sign_f * l;
  return e;
}

SpinPathEnsemble composite_ensemble(double l0, double l_i, double l_f,
                                    std::size_t intervals, EndpointPolicy policy) {
  SpinPathEnsemble e;
  e.intervals = intervals;
  e.values = {{2.0 * l0, 1}, {0.0, 2}, {-2.0 * l0, 1}};
  e.policy = policy;
  auto allowed = [&](double x) { return x == 2.0 * l0 || x == 0.0 || x == -2.0 * l0; };
  if (!allowed(l_i) || !allowed(l_f)) {
    throw Error(ErrorCode::invalid_argument, "endpoint values must be +2 l0, 0 or -2 l0");
  }
  e.first = l_i;
  e.last = l_f;
  return e;
}

namespace {

SpinAmplitude evaluate(const SpinPathEnsemble& e, double inertia, double t,
                       bool allow_closed_form) {
  if (e.value_paths() > kEnumerationCap && allow_closed_form) {
    return closed_form(e, inertia, t);
  }
  return enumerate_paths(e, inertia, t);
}

}  // namespace

SpinAmplitude spin_half_propagator(double inertia, double l, int sign_i,
                                   int sign_f, double t, std::size_t intervals,
                                   EndpointPolicy policy, bool allow_closed_form) {
  return evaluate(spin_half_ensemble(l, sign_i, sign_f, intervals, policy), inertia,
                  t, allow_closed_form);
}

SpinAmplitude composite_spin_propagator(double inertia, double l0, double l_i,
                                        double l_f, double t,
                                        std::size_t intervals,
                                        EndpointPolicy policy,
                                        bool allow_closed_form) {
  return evaluate(composite_ensemble(l0, l_i, l_f, intervals, policy), inertia, t,
                  allow_closed_form);
}

const char* to_string(EndpointPolicy policy) {
  return policy == EndpointPolicy::unconstrained ? "unconstrained"
                                                       : "endpoint-filtered";
}

}  // namespace dualaction
