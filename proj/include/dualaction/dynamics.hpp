#pragma once

#include <cstddef>
#include <vector>

#include "dualaction/model.hpp"

namespace dualaction {

/// Uniform grid of `intervals` steps on [t_start, t_end].
struct TimeGrid {
  double t_start = 0.0;
  double t_end = 1.0;
  std::size_t intervals = 1;

  double step() const {
    return (t_end - t_start) / static_cast<double>(intervals);
  }
  double time(std::size_t node) const {
    return t_start + static_cast<double>(node) * step();
  }
  std::size_t nodes() const { return intervals + 1; }
  void validate() const;
};

/// Paired momentum and position samples on a uniform time grid.
class PhasePath {
 public:
  PhasePath(TimeGrid grid, std::vector<double> p, std::vector<double> q);

  const TimeGrid& grid() const { return grid_; }
  const std::vector<double>& p() const { return p_; }
  const std::vector<double>& q() const { return q_; }
  std::size_t intervals() const { return grid_.intervals; }

 private:
  TimeGrid grid_;
  std::vector<double> p_;
  std::vector<double> q_;
};

enum class BoundaryKind { position, momentum };

/// Position-type: q(t_i), q(t_f) given. Momentum-type: p(t_i), p(t_f) given.
struct BoundarySpec {
  BoundaryKind kind = BoundaryKind::position;
  double start = 0.0;
  double end = 0.0;
};

enum class Degeneracy {
  unique,
  conjugate_degenerate,
  infeasible,
  /// The far endpoint does not depend on the free parameter and the target is
  /// met for every value of it (momentum problems with H_q == 0).
  unique_up_to_offset,
};

struct ShootingOptions {
  double tolerance = 1e-9;
  int max_iterations = 100;
  double sensitivity_floor = 1e-6;
  double search_range = 1e3;
  double smallest_probe = 1e-3;
};

struct ShootingReport {
  PhasePath path;
  /// Initial p for position problems, initial q for momentum problems.
  double free_parameter = 0.0;
  double residual = 0.0;
  Degeneracy flag = Degeneracy::infeasible;
  /// |d(endpoint)/d(free parameter)| at the root.
  double sensitivity = 0.0;
  int iterations = 0;

  bool solved() const {
    return flag == Degeneracy::unique || flag == Degeneracy::unique_up_to_offset;
  }
};

/// Classical fixed-step RK4 on q' = H_p, p' = -H_q. Throws ErrorCode::blow_up
/// with the failing node index when the state stops being finite.
PhasePath integrate_ivp(const HamiltonianModel& model, double p0, double q0,
                        const TimeGrid& grid);

/// Shoots over the initial momentum so that q(t_end) matches bounds.end.
ShootingReport solve_position_bvp(const HamiltonianModel& model,
                                  const BoundarySpec& bounds,
                                  const TimeGrid& grid,
                                  const ShootingOptions& options = {});

/// Shoots over the initial position so that p(t_end) matches bounds.end.
ShootingReport solve_momentum_bvp(const HamiltonianModel& model,
                                  const BoundarySpec& bounds,
                                  const TimeGrid& grid,
                                  const ShootingOptions& options = {});

const char* to_string(Degeneracy flag);

}  // namespace dualaction
