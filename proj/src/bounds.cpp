#include "dualaction/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "dualaction/action.hpp"
#include "dualaction/error.hpp"

namespace dualaction {

const char* to_string(BoundChain chain) {
  return chain == BoundChain::S ? "S" : "R";
}

namespace {

void require_samples(const TimeGrid& grid, const std::vector<double>& v) {
  grid.validate();
  if (v.size() != grid.nodes()) {
    throw Error(ErrorCode::invalid_argument, "sample count must be N + 1");
  }
  if (grid.intervals < 2) {
    throw Error(ErrorCode::invalid_argument, "restrictions need N >= 2");
  }
}

// Root of g near `guess`: expand a bracket outward, then TOMS 748.
double bracketed_root(const std::function<double(double)>& g, double guess,
                      std::size_t node) {
  double g0 = g(guess);
  if (g0 == 0.0) return guess;
  double step = std::max(1.0, std::abs(guess)) * 1e-2;
  double a = guess, fa = g0, b = guess, fb = g0;
  bool found = false;
  for (int k = 0; k < 200 && step < 1e12; ++k, step *= 2.0) {
    const double lo = guess - step;
    const double hi = guess + step;
    const double flo = g(lo);
    const double fhi = g(hi);
    if (std::isfinite(fhi) && (fhi > 0) != (g0 > 0)) {
      a = guess, fa = g0, b = hi, fb = fhi;
      found = true;
      break;
    }
    if (std::isfinite(flo) && (flo > 0) != (g0 > 0)) {
      a = lo, fa = flo, b = guess, fb = g0;
      found = true;
      break;
    }
  }
  if (!found) throw Error(ErrorCode::root_failure, "no bracket for restriction", node);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  std::uintmax_t iters = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      g, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
  if (iters >= 200) throw Error(ErrorCode::root_failure, "restriction root did not converge", node);
  return 0.5 * (lo + hi);
}

void require_finite(const std::vector<double>& v) {
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (!std::isfinite(v[j])) throw Error(ErrorCode::blow_up, "restriction blew up", j);
  }
}

}  // namespace

std::vector<double> pi_from_theta(const HamiltonianModel& model,
                                  const TimeGrid& grid,
                                  const std::vector<double>& theta) {
  require_samples(grid, theta);
  const auto theta_dot = sampled_derivative(theta, grid.step());
  std::vector<double> pi(theta.size());
  if (model.mass() && model.kind() != ModelKind::general) {
    for (std::size_t j = 0; j < pi.size(); ++j) pi[j] = *model.mass() * theta_dot[j];
    return pi;
  }
  double guess = 0.0;
  for (std::size_t j = 0; j < pi.size(); ++j) {
    const double th = theta[j];
    const double target = theta_dot[j];
    pi[j] = bracketed_root(
        [&](double x) { return model.dp(x, th) - target; }, guess, j);
    guess = pi[j];
  }
  return pi;
}

std::vector<double> theta_from_pi(const HamiltonianModel& model,
                                  const TimeGrid& grid,
                                  const std::vector<double>& pi) {
  require_samples(grid, pi);
  if (const auto& poly = model.polynomial_form();
      poly && !poly->derivative(0, 1).depends_on(Axis::q)) {
    throw Error(ErrorCode::unsolvable, "H_q does not depend on q");
  }
  const auto pi_dot = sampled_derivative(pi, grid.step());
  std::vector<double> theta(pi.size());
  if (const auto k = model.quadratic_stiffness(); k && *k != 0.0) {
    // H_q = k q
    for (std::size_t j = 0; j < theta.size(); ++j) theta[j] = -pi_dot[j] / *k;
    return theta;
  }
  double guess = 0.0;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double p = pi[j];
    const double target = pi_dot[j];
    theta[j] = bracketed_root(
        [&](double x) { return target + model.dq(p, x); }, guess, j);
    guess = theta[j];
  }
  return theta;
}

std::vector<double> integrate_pi(const HamiltonianModel& model,
                                 const TimeGrid& grid,
                                 const std::vector<double>& theta,
                                 double pi_start) {
  require_samples(grid, theta);
  const double h = grid.step();
  std::vector<double> pi(theta.size());
  pi[0] = pi_start;
  for (std::size_t j = 0; j + 1 < pi.size(); ++j) {
    const double f0 = -model.dq(pi[j], theta[j]);
    const double pred = pi[j] + h * f0;
    const double f1 = -model.dq(pred, theta[j + 1]);
    pi[j + 1] = pi[j] + 0.5 * h * (f0 + f1);
  }
  require_finite(pi);
  return pi;
}

std::vector<double> integrate_theta(const HamiltonianModel& model,
                                    const TimeGrid& grid,
                                    const std::vector<double>& pi,
                                    double theta_start) {
  require_samples(grid, pi);
  const double h = grid.step();
  std::vector<double> theta(pi.size());
  theta[0] = theta_start;
  for (std::size_t j = 0; j + 1 < theta.size(); ++j) {
    const double g0 = model.dp(pi[j], theta[j]);
    const double pred = theta[j] + h * g0;
    const double g1 = model.dp(pi[j + 1], pred);
    theta[j + 1] = theta[j] + 0.5 * h * (g0 + g1);
  }
  require_finite(theta);
  return theta;
}

double functional_J(const HamiltonianModel& model, const TimeGrid& grid,
                    const std::vector<double>& theta) {
  auto pi = pi_from_theta(model, grid, theta);
  return action_s(model, PhasePath(grid, std::move(pi), theta)).value;
}

double functional_G(const HamiltonianModel& model, const TimeGrid& grid,
                    const std::vector<double>& pi) {
  auto theta = theta_from_pi(model, grid, pi);
  return action_s(model, PhasePath(grid, pi, std::move(theta))).value;
}

double functional_Jp(const HamiltonianModel& model, const TimeGrid& grid,
                     const std::vector<double>& theta, double pi_start) {
  auto pi = integrate_pi(model, grid, theta, pi_start);
  return action_r(model, PhasePath(grid, std::move(pi), theta)).value;
}

double functional_Gp(const HamiltonianModel& model, const TimeGrid& grid,
                     const std::vector<double>& pi, double theta_start) {
  auto theta = integrate_theta(model, grid, pi, theta_start);
  return action_r(model, PhasePath(grid, pi, std::move(theta))).value;
}

std::vector<double> random_series(const TimeGrid& grid, SeriesShape shape,
                                  int modes, double amplitude,
                                  std::mt19937_64& rng) {
  if (modes < 1) throw Error(ErrorCode::invalid_argument, "need >= 1 mode");
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> sine(static_cast<std::size_t>(modes));
  std::vector<double> cosine(static_cast<std::size_t>(modes));
  for (int k = 1; k <= modes; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    if (shape != SeriesShape::cosine) sine[i] = unit(rng) / k;
    if (shape != SeriesShape::sine) cosine[i] = unit(rng) / k;
  }
  std::vector<double> v(grid.nodes());
  double sup = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double tau = static_cast<double>(j) / static_cast<double>(grid.intervals);
    double s = 0.0;
    for (int k = 1; k <= modes; ++k) {
      const auto i = static_cast<std::size_t>(k - 1);
      const double arg = std::numbers::pi * k * tau;
      s += sine[i] * std::sin(arg) + cosine[i] * std::cos(arg);
    }
    if (shape == SeriesShape::sine && (j == 0 || j + 1 == v.size())) s = 0.0;
    v[j] = s;
    sup = std::max(sup, std::abs(s));
  }
  if (sup > 0.0) {
    for (auto& x : v) x *= amplitude / sup;
  }
  return v;
}

namespace {

std::vector<double> every_other(const std::vector<double>& v) {
  std::vector<double> out;
  out.reserve(v.size() / 2 + 1);
  for (std::size_t j = 0; j < v.size(); j += 2) out.push_back(v[j]);
  return out;
}

std::vector<double> add(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] + b[j];
  return out;
}

// Theta = base + c sin(pi tau) with c chosen by secant so that Pi(Theta)
// integrated from pi_start ends at pi_end; returns J' on that Theta.
double corrected_Jp(const HamiltonianModel& model, const TimeGrid& grid,
                    const std::vector<double>& base, double pi_start,
                    double pi_end) {
  std::vector<double> bump(base.size());
  for (std::size_t j = 0; j < bump.size(); ++j) {
    bump[j] = std::sin(std::numbers::pi * static_cast<double>(j) /
                       static_cast<double>(grid.intervals));
  }
  auto theta_at = [&](double c) {
    std::vector<double> th(base.size());
    for (std::size_t j = 0; j < th.size(); ++j) th[j] = base[j] + c * bump[j];
    return th;
  };
  auto miss = [&](double c) {
    return integrate_pi(model, grid, theta_at(c), pi_start).back() - pi_end;
  };
  const double tol = 1e-12 * std::max(1.0, std::abs(pi_end));
  double c0 = 0.0, f0 = miss(c0);
  double c1 = 1e-2, f1 = miss(c1);
  for (int it = 0; it < 50 && std::abs(f1) > tol; ++it) {
    if (f1 == f0) {
      throw Error(ErrorCode::root_failure, "end-momentum correction stalled");
    }
    const double c2 = c1 - f1 * (c1 - c0) / (f1 - f0);
    c0 = c1, f0 = f1;
    c1 = c2, f1 = miss(c1);
  }
  if (std::abs(f1) > tol) {
    throw Error(ErrorCode::root_failure, "end-momentum correction did not converge");
  }
  return functional_Jp(model, grid, theta_at(c1), pi_start);
}

DomainBox probe_box(const PhasePath& path, double pad) {
  const auto [pmin, pmax] = std::minmax_element(path.p().begin(), path.p().end());
  const auto [qmin, qmax] = std::minmax_element(path.q().begin(), path.q().end());
  return DomainBox{*pmin - pad, *pmax + pad, *qmin - pad, *qmax + pad, 11, 11};
}

}  // namespace

BoundCertificate certify_bounds(const HamiltonianModel& model, BoundChain chain,
                                const ShootingReport& critical,
                                const PerturbationSpec& spec,
                                std::size_t samples) {
  const PhasePath& path = critical.path;
  const TimeGrid grid = path.grid();
  const TimeGrid half{grid.t_start, grid.t_end, grid.intervals / 2};
  if (grid.intervals < 4 || grid.intervals % 2 != 0) {
    throw Error(ErrorCode::invalid_argument, "bound certification needs an even N >= 4");
  }
  if (!(spec.amplitude >= 0.0) || spec.modes < 1 || spec.modes > 8) {
    throw Error(ErrorCode::invalid_argument, "perturbation needs amplitude >= 0 and 1..8 modes");
  }
  const PinnedVariable wanted = chain == BoundChain::S ? PinnedVariable::q : PinnedVariable::p;
  if (spec.pinned != wanted) {
    throw Error(ErrorCode::invalid_argument,
                chain == BoundChain::S ? "S chain needs q-pinned perturbations"
                                       : "R chain needs p-pinned perturbations");
  }
  if (!critical.solved()) {
    throw Error(ErrorCode::invalid_argument, "critical path was not solved");
  }
  if (saddle_probe(model, probe_box(path, std::max(1.0, 2.0 * spec.amplitude))) !=
      SaddleVerdict::saddle) {
    throw Error(ErrorCode::not_saddle, "bounds need a saddle Hamiltonian");
  }

  const auto& p = path.p();
  const auto& q = path.q();
  const PhasePath half_path(half, every_other(p), every_other(q));

  BoundCertificate cert;
  cert.chain = chain;
  cert.samples = samples;
  cert.intervals = grid.intervals;
  const double crit_fine = chain == BoundChain::S ? action_s(model, path).value
                                                  : action_r(model, path).value;
  const double crit_coarse = chain == BoundChain::S ? action_s(model, half_path).value
                                                    : action_r(model, half_path).value;
  cert.critical = crit_fine;
  cert.worst_margin = std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (std::size_t id = 0; id < samples; ++id) {
    BoundSample s;
    s.id = id;
    s.critical = crit_fine;
    double lower_coarse = 0.0;
    double upper_coarse = 0.0;
    if (chain == BoundChain::S) {
      const auto theta = add(q, random_series(grid, SeriesShape::sine, spec.modes,
                                              spec.amplitude, rng));
      const auto pi = add(p, random_series(grid, SeriesShape::cosine, spec.modes,
                                           spec.amplitude, rng));
      s.upper = functional_J(model, grid, theta);
      s.lower = functional_G(model, grid, pi);
      upper_coarse = functional_J(model, half, every_other(theta));
      lower_coarse = functional_G(model, half, every_other(pi));
    } else {
      const auto pi = add(p, random_series(grid, SeriesShape::sine, spec.modes,
                                           spec.amplitude, rng));
      const double theta_start = q.front() + spec.amplitude * unit(rng);
      const auto theta = add(q, random_series(grid, SeriesShape::mixed, spec.modes,
                                              spec.amplitude, rng));
      s.upper = functional_Gp(model, grid, pi, theta_start);
      s.lower = corrected_Jp(model, grid, theta, p.front(), p.back());
      upper_coarse = functional_Gp(model, half, every_other(pi), theta_start);
      lower_coarse = corrected_Jp(model, half, every_other(theta), p.front(), p.back());
    }
    const double crit_err = std::abs(crit_fine - crit_coarse);
    const double lower_slack = kBoundSlack + crit_err + std::abs(s.lower - lower_coarse);
    const double upper_slack = kBoundSlack + crit_err + std::abs(s.upper - upper_coarse);
    s.slack = std::max(lower_slack, upper_slack);
    s.violated = s.lower_margin() < -lower_slack || s.upper_margin() < -upper_slack;
    if (s.violated) ++cert.violations;
    cert.worst_margin = std::min({cert.worst_margin, s.lower_margin(), s.upper_margin()});
    cert.records.push_back(s);
  }
  if (samples == 0) cert.worst_margin = 0.0;
  return cert;
}

}  // namespace dualaction
