#include "dualaction/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "dualaction/error.hpp"

namespace dualaction {

void TimeGrid::validate() const {
  if (!(t_end > t_start) || !std::isfinite(t_start) || !std::isfinite(t_end)) {
    throw Error(ErrorCode::invalid_argument, "time grid needs t_end > t_start");
  }
  if (intervals < 1) {
    throw Error(ErrorCode::invalid_argument, "time grid needs >= 1 interval");
  }
}

PhasePath::PhasePath(TimeGrid grid, std::vector<double> p, std::vector<double> q)
    : grid_(grid), p_(std::move(p)), q_(std::move(q)) {
  grid_.validate();
  if (p_.size() != grid_.nodes() || q_.size() != grid_.nodes()) {
    throw Error(ErrorCode::invalid_argument,
                "path samples must have intervals + 1 entries");
  }
  for (std::size_t j = 0; j < p_.size(); ++j) {
    if (!std::isfinite(p_[j]) || !std::isfinite(q_[j])) {
      throw Error(ErrorCode::domain, "non-finite path sample", j);
    }
  }
}

const char* to_string(Degeneracy flag) {
  switch (flag) {
    case Degeneracy::unique: return "unique";
    case Degeneracy::conjugate_degenerate: return "conjugate-degenerate";
    case Degeneracy::infeasible: return "infeasible";
    case Degeneracy::unique_up_to_offset: return "unique-up-to-offset";
  }
  return "unknown";
}

PhasePath integrate_ivp(const HamiltonianModel& model, double p0, double q0,
                        const TimeGrid& grid) {
  grid.validate();
  const double h = grid.step();
  std::vector<double> p(grid.nodes());
  std::vector<double> q(grid.nodes());
  p[0] = p0;
  q[0] = q0;
  auto rhs = [&model](double pp, double qq) {
    return std::pair{-model.dq(pp, qq), model.dp(pp, qq)};  // (p', q')
  };
  for (std::size_t j = 0; j < grid.intervals; ++j) {
    try {
      const auto [k1p, k1q] = rhs(p[j], q[j]);
      const auto [k2p, k2q] = rhs(p[j] + 0.5 * h * k1p, q[j] + 0.5 * h * k1q);
      const auto [k3p, k3q] = rhs(p[j] + 0.5 * h * k2p, q[j] + 0.5 * h * k2q);
      const auto [k4p, k4q] = rhs(p[j] + h * k3p, q[j] + h * k3q);
      p[j + 1] = p[j] + h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
      q[j + 1] = q[j] + h / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::domain) throw;
      throw Error(ErrorCode::blow_up, "integration blew up", j + 1);
    }
    if (!std::isfinite(p[j + 1]) || !std::isfinite(q[j + 1])) {
      throw Error(ErrorCode::blow_up, "integration blew up", j + 1);
    }
  }
  return PhasePath(grid, std::move(p), std::move(q));
}

namespace {

// Endpoint-mismatch function of the free parameter for either problem type.
struct Shooter {
  const HamiltonianModel& model;
  const BoundarySpec& bounds;
  const TimeGrid& grid;

  PhasePath shoot(double x) const {
    return bounds.kind == BoundaryKind::position
               ? integrate_ivp(model, x, bounds.start, grid)
               : integrate_ivp(model, bounds.start, x, grid);
  }
  double mismatch(const PhasePath& path) const {
    const double end = bounds.kind == BoundaryKind::position ? path.q().back()
                                                             : path.p().back();
    return end - bounds.end;
  }
  std::optional<double> f(double x) const {
    try {
      return mismatch(shoot(x));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::blow_up || e.code() == ErrorCode::domain) {
        return std::nullopt;
      }
      throw;
    }
  }
};

std::vector<double> scan_points(const ShootingOptions& opt) {
  std::vector<double> magnitudes;
  for (double r = opt.search_range; r >= opt.smallest_probe; r *= 0.5) {
    magnitudes.push_back(r);
  }
  std::vector<double> xs;
  for (double m : magnitudes) xs.push_back(-m);
  xs.push_back(0.0);
  for (auto it = magnitudes.rbegin(); it != magnitudes.rend(); ++it) {
    xs.push_back(*it);
  }
  return xs;
}

// Secant iteration kept inside [a, b]; falls back to the midpoint when a
// secant step leaves the bracket (Illinois-style weighting keeps it moving).
std::pair<double, int> secant_in_bracket(const Shooter& s, double a, double fa,
                                         double b, double fb, double tol,
                                         int max_iter) {
  int side = 0;
  double x = a;
  double fx = fa;
  for (int it = 1; it <= max_iter; ++it) {
    x = b - fb * (b - a) / (fb - fa);
    if (!(x > std::min(a, b) && x < std::max(a, b)) || !std::isfinite(x)) {
      x = 0.5 * (a + b);
    }
    const auto val = s.f(x);
    if (!val) {
      x = 0.5 * (a + b);
      const auto mid = s.f(x);
      if (!mid) throw Error(ErrorCode::root_failure, "shooting blew up inside bracket");
      fx = *mid;
    } else {
      fx = *val;
    }
    if (std::abs(fx) <= tol) return {x, it};
    if ((fx > 0) == (fb > 0)) {
      b = x;
      fb = fx;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = x;
      fa = fx;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
    if (std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(x))) return {x, it};
  }
  return {x, max_iter};
}

ShootingReport solve_bvp(const HamiltonianModel& model,
                         const BoundarySpec& bounds, const TimeGrid& grid,
                         const ShootingOptions& opt) {
  grid.validate();
  const Shooter s{model, bounds, grid};
  const auto xs = scan_points(opt);
  std::vector<std::optional<double>> fs;
  fs.reserve(xs.size());
  for (double x : xs) fs.push_back(s.f(x));

  // Endpoint independent of the free parameter over the whole scan.
  double fmin = std::numeric_limits<double>::infinity();
  double fmax = -fmin;
  std::size_t finite = 0;
  for (const auto& f : fs) {
    if (!f) continue;
    ++finite;
    fmin = std::min(fmin, *f);
    fmax = std::max(fmax, *f);
  }
  if (finite == 0) {
    throw Error(ErrorCode::blow_up, "every shooting probe blew up");
  }
  const std::size_t zero_index = xs.size() / 2;  // xs[zero_index] == 0
  if (bounds.kind == BoundaryKind::momentum &&
      fmax - fmin <= opt.tolerance && fs[zero_index]) {
    PhasePath path = s.shoot(0.0);
    const double res = std::abs(s.mismatch(path));
    return ShootingReport{std::move(path), 0.0, res,
                          res <= opt.tolerance ? Degeneracy::unique_up_to_offset
                                               : Degeneracy::infeasible,
                          0.0, 0};
  }

  // Collect roots: samples already within tolerance, and sign changes.
  struct Bracket {
    double a, fa, b, fb;
  };
  std::vector<double> exact_roots;
  std::vector<Bracket> brackets;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (fs[i] && std::abs(*fs[i]) <= opt.tolerance) exact_roots.push_back(xs[i]);
  }
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (!fs[i] || !fs[i + 1]) continue;
    const double fa = *fs[i];
    const double fb = *fs[i + 1];
    if (std::abs(fa) <= opt.tolerance || std::abs(fb) <= opt.tolerance) continue;
    if ((fa > 0) != (fb > 0)) brackets.push_back({xs[i], fa, xs[i + 1], fb});
  }
  const std::size_t root_count = exact_roots.size() + brackets.size();

  if (root_count == 0) {
    // Report the closest probe so callers can see how far off it was.
    std::size_t best = zero_index;
    double best_abs = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (fs[i] && std::abs(*fs[i]) < best_abs) {
        best_abs = std::abs(*fs[i]);
        best = i;
      }
    }
    return ShootingReport{s.shoot(xs[best]), xs[best], best_abs,
                          Degeneracy::infeasible, 0.0, 0};
  }

  double root = 0.0;
  int iterations = 0;
  if (!brackets.empty()) {
    const auto& b = brackets.front();
    std::tie(root, iterations) = secant_in_bracket(
        s, b.a, b.fa, b.b, b.fb, opt.tolerance, opt.max_iterations);
  } else {
    root = exact_roots.front();
  }

  PhasePath path = s.shoot(root);
  const double residual = std::abs(s.mismatch(path));

  const double delta = 1e-4 * std::max(1.0, std::abs(root));
  const auto fp = s.f(root + delta);
  const auto fm = s.f(root - delta);
  double sensitivity = 0.0;
  if (fp && fm) sensitivity = std::abs(*fp - *fm) / (2.0 * delta);

  Degeneracy flag = Degeneracy::unique;
  if (root_count > 1 || sensitivity < opt.sensitivity_floor) {
    flag = Degeneracy::conjugate_degenerate;
  } else if (residual > opt.tolerance) {
    flag = Degeneracy::infeasible;
  }
  return ShootingReport{std::move(path), root, residual, flag, sensitivity,
                        iterations};
}

}  // namespace

ShootingReport solve_position_bvp(const HamiltonianModel& model,
                                  const BoundarySpec& bounds,
                                  const TimeGrid& grid,
                                  const ShootingOptions& options) {
  if (bounds.kind != BoundaryKind::position) {
    throw Error(ErrorCode::invalid_argument,
                "solve_position_bvp needs position-type bounds");
  }
  return solve_bvp(model, bounds, grid, options);
}

ShootingReport solve_momentum_bvp(const HamiltonianModel& model,
                                  const BoundarySpec& bounds,
                                  const TimeGrid& grid,
                                  const ShootingOptions& options) {
  if (bounds.kind != BoundaryKind::momentum) {
    throw Error(ErrorCode::invalid_argument,
                "solve_momentum_bvp needs momentum-type bounds");
  }
  return solve_bvp(model, bounds, grid, options);
}

}  // namespace dualaction
