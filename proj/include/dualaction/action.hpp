#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dualaction/dynamics.hpp"
#include "dualaction/model.hpp"

namespace dualaction {

enum class QuadratureRule { trapezoid, simpson };

/// Simpson when the interval count is even, trapezoid otherwise.
QuadratureRule default_rule(std::size_t intervals);

struct ActionValue {
  double value = 0.0;
  QuadratureRule rule = QuadratureRule::trapezoid;
  std::size_t intervals = 0;
};

/// Centered differences inside, one-sided second order at both ends.
/// Needs at least 3 samples.
std::vector<double> sampled_derivative(const std::vector<double>& f, double h);

/// Composite rule on uniform samples. Simpson with an odd interval count
/// throws ErrorCode::rule.
double integrate(const std::vector<double>& f, double h, QuadratureRule rule);

/// S = integral of p q' - H.
ActionValue action_s(const HamiltonianModel& model, const PhasePath& path);
ActionValue action_s(const HamiltonianModel& model, const PhasePath& path,
                     QuadratureRule rule);

/// R = -integral of q p' + H.
ActionValue action_r(const HamiltonianModel& model, const PhasePath& path);
ActionValue action_r(const HamiltonianModel& model, const PhasePath& path,
                     QuadratureRule rule);

/// S - R - ([pq] at t_end - [pq] at t_start).
double legendre_residual(const HamiltonianModel& model, const PhasePath& path);
double legendre_residual(const HamiltonianModel& model, const PhasePath& path,
                         QuadratureRule rule);

/// Seeded smooth test path: p and q are each c_0 + sum_{k=1..modes}
/// c_k sin(pi k tau + phi_k) / k^2 with c uniform in [-amplitude, amplitude]
/// and tau = (t - t_start) / (t_end - t_start). The coefficients depend on the
/// seed only, so refining the grid samples the same continuous path.
PhasePath smooth_random_path(const TimeGrid& grid, std::uint64_t seed,
                             double amplitude = 0.5, int modes = 4);

/// max |dK/dt + q p'' + q' p'| over nodes 2..N-2, K = -q p' - H, every time
/// derivative by centered differences. Only meaningful on critical paths.
/// Needs N >= 4.
double k_total_derivative_residual(const HamiltonianModel& model,
                                   const PhasePath& path);

/// Rectangular (endpoint, t) grid for action surfaces. The initial time is
/// fixed at zero, so `t` is also the elapsed time. Each node is evaluated with
/// `intervals` path steps, and the surface derivatives use a local centered
/// stencil of half-width `delta` in both directions.
struct SurfaceGrid {
  double endpoint_min = 0.5;
  double endpoint_max = 1.5;
  std::size_t endpoint_count = 5;
  double t_min = 0.5;
  double t_max = 1.5;
  std::size_t t_count = 5;
  std::size_t intervals = 200;
  double delta = 1e-3;

  void validate() const;
  double endpoint(std::size_t i) const;
  double time(std::size_t j) const;
};

struct HjNode {
  double endpoint = 0.0;
  double t = 0.0;
  double residual = 0.0;
  /// dS/dq_f - p(t_f), or dR/dp_f + q(t_f).
  double companion = 0.0;
  bool companion_available = true;
  bool flagged = false;
  Degeneracy flag = Degeneracy::unique;
};

struct HjField {
  std::vector<HjNode> nodes;

  /// Maxima over unflagged nodes; zero when every node is flagged.
  double max_abs_residual() const;
  double max_abs_companion() const;
  std::size_t flagged_count() const;
};

/// H(dS/dq_f, q_f) + dS/dt over the (q_f, t) grid with q_i fixed.
HjField hj_residual_s(const HamiltonianModel& model, double q_i,
                      const SurfaceGrid& grid);

/// H(p_f, -dR/dp_f) + dR/dt over the (p_f, t) grid with p_i fixed.
///
/// Where dR/dp_f can't be formed because the neighbouring momentum problems
/// are infeasible (H_q == 0), -dR/dp_f is replaced by the path's q(t_f) and
/// the companion residual is marked unavailable.
HjField hj_residual_r(const HamiltonianModel& model, double p_i,
                      const SurfaceGrid& grid);

/// endpoint,t,residual,companion,flag
void write_csv(std::ostream& out, const HjField& field,
               const std::string& endpoint_name);

const char* to_string(QuadratureRule rule);

}  // namespace dualaction
