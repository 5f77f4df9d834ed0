#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "dualaction/model.hpp"

namespace dualaction {

using Complex = std::complex<double>;

enum class Representation { position, momentum };

struct SliceScheme {
  std::size_t slices = 512;
  Representation rep = Representation::position;
};

/// Either an ordinary amplitude or a delta-supported value carried
/// symbolically as (support matched, phase, causal).
struct PropagatorValue {
  enum class Variant { regular, delta };
  Variant variant = Variant::regular;
  Complex amplitude{0.0, 0.0};
  bool support_matched = false;
  Complex phase{1.0, 0.0};
  bool causal = true;
};

/// prefactor * exp(i (c_ff x_f^2 + c_ii x_i^2 + c_if x_f x_i)), the exact
/// N-slice result of a quadratic chain.
struct GaussianKernel {
  Complex prefactor{0.0, 0.0};
  double c_ff = 0.0;
  double c_ii = 0.0;
  double c_if = 0.0;

  double exponent(double x_f, double x_i) const {
    return c_ff * x_f * x_f + c_ii * x_i * x_i + c_if * x_f * x_i;
  }
  Complex operator()(double x_f, double x_i) const;
};

/// Time-sliced chain with slice action
///   M (x_j - x_{j-1})^2 / (2 eps) - eps K (x_j^2 + x_{j-1}^2) / 4,
/// integrated exactly over the N - 1 interior nodes. Throws ErrorCode::caustic
/// when eps * D_{N-1} <= 1e-9, D from D_{k+1} = a D_k - D_{k-1}, a = 2 - K eps^2 / M.
GaussianKernel gaussian_chain(double inertia, double stiffness, double t,
                              std::size_t slices);

/// Stationary discrete path of the chain above, endpoints included.
std::vector<double> chain_classical_path(double inertia, double stiffness,
                                         double x_i, double x_f, double t,
                                         std::size_t slices);

/// Value of the slice action on a full discrete path.
double chain_action(double inertia, double stiffness,
                    const std::vector<double>& x, double t);

/// Position chain for p^2/(2m) + k q^2/2 (free, harmonic, saddle).
GaussianKernel position_chain(const HamiltonianModel& model, double t,
                              std::size_t slices);
/// Momentum chain for the harmonic oscillator: q eliminated through
/// p' = -m w^2 q, giving inertia 1/(m w^2) and stiffness 1/m.
GaussianKernel momentum_chain(const HamiltonianModel& model, double t,
                              std::size_t slices);

PropagatorValue sliced_position_propagator(const HamiltonianModel& model,
                                           double q_i, double q_f, double t,
                                           const SliceScheme& scheme);
PropagatorValue sliced_momentum_propagator(const HamiltonianModel& model,
                                           double p_i, double p_f, double t,
                                           const SliceScheme& scheme);

/// delta(p_f - p_i) theta(t) exp(-i p^2 t / (2 m)).
PropagatorValue free_momentum_propagator(double mass, double p_i, double p_f,
                                         double t);

/// Reciprocal grids for endpoint transforms. The source axis is
/// x_j = (j - n/2) dx; the conjugate axis has spacing 2 pi / (n dx). Sources
/// are multiplied by a smooth window that is 1 for |x| <= flat_radius and 0
/// for |x| >= taper_radius. Zero spacing selects the symmetric choice
/// dx = sqrt(2 pi / n).
struct FourierGrid {
  std::size_t points = 1024;
  double spacing = 0.0;
  double flat_radius = 8.0;
  double taper_radius = 13.0;

  void validate() const;
  double source_spacing() const;
  double target_spacing() const;
  std::vector<double> source_axis() const;
  std::vector<double> target_axis() const;
};

/// C-infinity cutoff used on sources.
double window(double x, double flat_radius, double taper_radius);

/// Kernel sampled on a square endpoint grid; values[f * n + i] holds
/// G(axis[f], axis[i]).
struct SampledKernel {
  Representation rep = Representation::position;
  std::vector<double> axis;
  std::vector<Complex> values;

  std::size_t size() const { return axis.size(); }
  Complex at(std::size_t f, std::size_t i) const { return values[f * axis.size() + i]; }
};

using KernelFunction = std::function<Complex(double x_f, double x_i)>;

/// Windowed samples of `source` on the grid's source axis.
SampledKernel sample_kernel(const KernelFunction& source, Representation rep,
                            const FourierGrid& grid);

/// Unitary transform over both endpoints into the conjugate representation.
/// Position to momentum uses exp(-i p_f q_f) on the final endpoint and
/// exp(+i p_i q_i) on the initial one, each with 1/sqrt(2 pi); momentum to
/// position uses the opposite signs, so a round trip is the identity.
SampledKernel fourier_transform(const SampledKernel& kernel,
                                const FourierGrid& grid);

/// sample_kernel followed by fourier_transform. Throws ErrorCode::bandwidth
/// when more than 1% of the output energy sits in the outer 20% of either
/// conjugate axis.
SampledKernel fourier_endpoints(const KernelFunction& source,
                                Representation source_rep,
                                const FourierGrid& grid);

/// Free-particle momentum kernel A delta(p_f - p_i) exp(-i p^2 t/(2m)).
struct DeltaSource {
  double mass = 1.0;
  double t = 1.0;
  double prefactor = 1.0;
};

/// Position samples G(q_f - q_i) of a delta source. The delta collapses one
/// endpoint integral, leaving (1/2 pi) sum_p w(p) A phase(p) exp(i p dq) dp
/// over the grid's source axis (read as momenta). Throws ErrorCode::bandwidth
/// when the stationary momentum m dq / t plus a Fresnel zone 4 sqrt(m/t)
/// leaves the flat part of the window.
std::vector<Complex> fourier_endpoints(const DeltaSource& source,
                                       const FourierGrid& grid,
                                       const std::vector<double>& dq);

/// |G| sqrt(2 pi t / m): the constant multiplying the reference free kernel.
double normalization_extraction(Complex sample, double mass, double t);

/// final,initial,re,im
void write_csv(std::ostream& out, const SampledKernel& kernel);

const char* to_string(Representation rep);

}  // namespace dualaction
