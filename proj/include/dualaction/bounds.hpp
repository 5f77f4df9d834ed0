#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dualaction/dynamics.hpp"
#include "dualaction/model.hpp"

namespace dualaction {

/// Solves dTheta/dt = H_Pi(Pi, Theta) for Pi node by node, with dTheta/dt from
/// centered differences. Separable models use Pi = m dTheta/dt directly.
std::vector<double> pi_from_theta(const HamiltonianModel& model,
                                  const TimeGrid& grid,
                                  const std::vector<double>& theta);

/// Solves dPi/dt = -H_Theta(Pi, Theta) for Theta node by node. Throws
/// ErrorCode::unsolvable when H_Theta does not depend on Theta.
std::vector<double> theta_from_pi(const HamiltonianModel& model,
                                  const TimeGrid& grid,
                                  const std::vector<double>& pi);

/// Pi(t) integrated from pi_start along dPi/dt = -H_Theta(Pi, Theta).
std::vector<double> integrate_pi(const HamiltonianModel& model,
                                 const TimeGrid& grid,
                                 const std::vector<double>& theta,
                                 double pi_start);

/// Theta(t) integrated from theta_start along dTheta/dt = H_Pi(Pi, Theta).
std::vector<double> integrate_theta(const HamiltonianModel& model,
                                    const TimeGrid& grid,
                                    const std::vector<double>& pi,
                                    double theta_start);

/// S on (Pi(Theta), Theta).
double functional_J(const HamiltonianModel& model, const TimeGrid& grid,
                    const std::vector<double>& theta);
/// S on (Pi, Theta(Pi)).
double functional_G(const HamiltonianModel& model, const TimeGrid& grid,
                    const std::vector<double>& pi);
/// R on (Pi(Theta), Theta), Pi integrated from pi_start.
double functional_Jp(const HamiltonianModel& model, const TimeGrid& grid,
                     const std::vector<double>& theta, double pi_start);
/// R on (Pi, Theta(Pi)), Theta integrated from theta_start.
double functional_Gp(const HamiltonianModel& model, const TimeGrid& grid,
                     const std::vector<double>& pi, double theta_start);

enum class PinnedVariable { q, p };
enum class BoundChain { S, R };

struct PerturbationSpec {
  double amplitude = 0.2;
  int modes = 8;
  std::uint64_t seed = 1;
  PinnedVariable pinned = PinnedVariable::q;
};

enum class SeriesShape {
  sine,    // zero at both ends
  cosine,  // zero slope at both ends
  mixed,   // no end condition
};

/// Random series sum_k a_k f_k(pi k tau), k = 1..modes, a_k uniform in
/// [-1, 1] / k, rescaled so that the sup-norm over the grid is `amplitude`.
std::vector<double> random_series(const TimeGrid& grid, SeriesShape shape,
                                  int modes, double amplitude,
                                  std::mt19937_64& rng);

struct BoundSample {
  std::size_t id = 0;
  double lower = 0.0;     // G(Pi) or J'(Theta)
  double critical = 0.0;  // S or R of the critical path
  double upper = 0.0;     // J(Theta) or G'(Pi)
  double slack = 0.0;
  bool violated = false;

  double lower_margin() const { return critical - lower; }
  double upper_margin() const { return upper - critical; }
};

struct BoundCertificate {
  BoundChain chain = BoundChain::S;
  std::size_t samples = 0;
  std::size_t violations = 0;
  /// Smallest of every lower and upper margin.
  double worst_margin = 0.0;
  std::size_t intervals = 0;
  double critical = 0.0;
  std::vector<BoundSample> records;
};

inline constexpr double kBoundSlack = 1e-6;

/// Checks G <= S <= J (S chain, position-type critical path) or
/// J' <= R <= G' (R chain, momentum-type critical path) on `samples` seeded
/// perturbations. Slack per sample is kBoundSlack plus the change of each
/// functional when evaluated on every other node. Needs an even N >= 4.
///
/// Perturbation families: S chain perturbs Theta by a sine series and Pi by a
/// cosine series, so Theta(Pi) keeps the end positions. R chain perturbs Pi by
/// a sine series with a random Theta start, and Theta by a mixed series plus a
/// multiple of sin(pi tau) chosen so that Pi(Theta) lands on p(t_f).
BoundCertificate certify_bounds(const HamiltonianModel& model, BoundChain chain,
                                const ShootingReport& critical,
                                const PerturbationSpec& spec,
                                std::size_t samples);

const char* to_string(BoundChain chain);

}  // namespace dualaction
