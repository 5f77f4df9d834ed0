#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dualaction/propagator.hpp"

namespace dualaction {

enum class EndpointPolicy { unconstrained, endpoint_filtered };

/// One admissible angular-momentum value per interval and the number of
/// constituent sign combinations producing it.
struct IntervalValue {
  double value = 0.0;
  int multiplicity = 1;
};

struct SpinPathEnsemble {
  std::size_t intervals = 1;
  std::vector<IntervalValue> values;
  EndpointPolicy policy = EndpointPolicy::unconstrained;
  /// Required first and last interval values under endpoint_filtered.
  double first = 0.0;
  double last = 0.0;

  /// (sum of multiplicities)^N, the normalizing count.
  double path_count() const;
  /// Distinct value sequences an enumeration has to visit.
  double value_paths() const;
  void validate() const;
};

/// Upper bound on value sequences visited by brute force: 2^20.
inline constexpr double kEnumerationCap = 1048576.0;

enum class SpinMethod { enumeration, closed_form };

struct SpinAmplitude {
  Complex amplitude{0.0, 0.0};
  /// Multiplicity-weighted number of admitted paths.
  double admitted = 0.0;
  double path_count = 0.0;
  SpinMethod method = SpinMethod::enumeration;
};

/// Sum over admitted paths of prod_j multiplicity * exp(-i l_j^2 (t/N) / (2I)),
/// divided by path_count(). Throws ErrorCode::enumeration_cap when
/// value_paths() exceeds the cap.
SpinAmplitude enumerate_paths(const SpinPathEnsemble& ensemble, double inertia,
                              double t);

/// Same quantity from the product structure over intervals.
SpinAmplitude closed_form(const SpinPathEnsemble& ensemble, double inertia,
                          double t);

/// Values {+l, -l}, each once.
SpinPathEnsemble spin_half_ensemble(double l, int sign_i, int sign_f,
                                    std::size_t intervals, EndpointPolicy policy);
/// Values {+2 l0 : 1, 0 : 2, -2 l0 : 1} from two spin-1/2 constituents.
SpinPathEnsemble composite_ensemble(double l0, double l_i, double l_f,
                                    std::size_t intervals, EndpointPolicy policy);

/// Enumeration when within the cap, otherwise the closed form if allowed.
SpinAmplitude spin_half_propagator(double inertia, double l, int sign_i,
                                   int sign_f, double t, std::size_t intervals,
                                   EndpointPolicy policy,
                                   bool allow_closed_form = false);
SpinAmplitude composite_spin_propagator(double inertia, double l0, double l_i,
                                        double l_f, double t,
                                        std::size_t intervals,
                                        EndpointPolicy policy,
                                        bool allow_closed_form = false);

const char* to_string(EndpointPolicy policy);

}  // namespace dualaction
