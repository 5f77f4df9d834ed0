#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "dualaction/dynamics.hpp"
#include "dualaction/model.hpp"

namespace dualaction {

enum class WhichAction { S, R };

/// Symmetric 2x2 second-variation matrix at one (p, q) point.
struct SecondVariationMatrix {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;
  WhichAction which = WhichAction::S;

  double determinant() const { return a11 * a22 - a12 * a12; }
  /// Closed-form eigenvalues, ascending.
  std::array<double, 2> eigenvalues() const;
};

/// [H_pp + p H_ppp, p H_ppq; p H_ppq, p H_pqq - H_qq]
SecondVariationMatrix hessian_s(const HamiltonianModel& model, double p, double q);
/// [q H_ppq - H_pp, q H_qqp; q H_qqp, q H_qqq + H_qq]
SecondVariationMatrix hessian_r(const HamiltonianModel& model, double p, double q);
SecondVariationMatrix hessian(const HamiltonianModel& model, WhichAction which,
                              double p, double q);

enum class Extremum { minimum, maximum, indefinite, degenerate };

inline constexpr double kRelativeZeroTolerance = 1e-9;

struct NodeEigen {
  double t = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double determinant = 0.0;
};

struct ExtremumReport {
  WhichAction which = WhichAction::S;
  std::vector<NodeEigen> nodes;
  Extremum classification = Extremum::degenerate;
  /// Absolute tolerance actually applied to the eigenvalues.
  double zero_tolerance = 0.0;
  /// max over interior nodes of |q' - H_p| and |p' + H_q|, centered
  /// differences. Large values mean the path was not critical.
  double stationarity = 0.0;
};

/// Classification holds over the supplied time window only. Precedence:
/// degenerate if any |lambda| <= tol, then minimum, then maximum.
ExtremumReport classify_extremum(const HamiltonianModel& model,
                                 const PhasePath& path, WhichAction which,
                                 double relative_tolerance = kRelativeZeroTolerance);

/// t,lambda1,lambda2
void write_csv(std::ostream& out, const ExtremumReport& report);

const char* to_string(Extremum e);
const char* to_string(WhichAction w);

}  // namespace dualaction
