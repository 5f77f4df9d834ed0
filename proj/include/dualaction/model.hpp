#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace dualaction {

inline constexpr double kDefaultFdStep = 1e-5;
inline constexpr double kConvexitySlack = 1e-12;

enum class Axis { p, q };

/// c * p^p_power * q^q_power
struct Monomial {
  int p_power = 0;
  int q_power = 0;
  double coeff = 0.0;
};

/// Polynomial in (p, q). Like terms are merged and zero terms dropped on
/// construction, so two polynomials that print the same compare equal.
class BivariatePolynomial {
 public:
  BivariatePolynomial() = default;
  explicit BivariatePolynomial(std::vector<Monomial> terms);

  double operator()(double p, double q) const;
  BivariatePolynomial derivative(int dp, int dq) const;
  BivariatePolynomial operator-() const;
  friend BivariatePolynomial operator+(const BivariatePolynomial& a,
                                       const BivariatePolynomial& b);

  bool depends_on(Axis axis) const;
  const std::vector<Monomial>& terms() const { return terms_; }

 private:
  std::vector<Monomial> terms_;
};

enum class ModelKind { separable, quadratic_saddle, general };
enum class DerivativeMode { analytic, finite_difference };

/// Multi-index of a partial derivative d^p d^q H / dp^p dq^q.
struct PartialOrder {
  int p = 0;
  int q = 0;
  int total() const { return p + q; }
};

/// Autonomous one-dimensional Hamiltonian H(p, q).
///
/// Analytic models are carried as a polynomial in (p, q); black-box models
/// (a user potential or a full evaluator) fall back to central finite
/// differences. Total derivative order is capped at three, which is all the
/// second-variation matrices need.
///
/// Finite-difference steps are order-dependent: plain central differences
/// with step h_fd for first derivatives, and fourth-order stencils with step
/// h_fd^(2/5) (order 2) or h_fd^(1/3) (order 3) for higher ones, each scaled
/// by max(1, |x|). Mixed partials nest one-dimensional stencils.
class HamiltonianModel {
 public:
  using Evaluator = std::function<double(double, double)>;
  using Potential = std::function<double(double)>;

  /// p^2/(2 mass) + sum_k coeffs[k] q^k
  static HamiltonianModel separable(double mass,
                                    const std::vector<double>& potential_coeffs);
  /// p^2/(2 mass) + V(q) with V a black box.
  static HamiltonianModel separable(double mass, Potential potential,
                                    double fd_step = kDefaultFdStep);
  static HamiltonianModel free_particle(double mass = 1.0);
  static HamiltonianModel harmonic(double mass = 1.0, double omega = 1.0);
  /// p^2/(2 mass) - stiffness q^2 / 2, stiffness > 0.
  static HamiltonianModel saddle_quadratic(double mass = 1.0,
                                           double stiffness = 1.0);
  /// p^2/(2 mass) - force q
  static HamiltonianModel constant_force(double mass, double force);
  static HamiltonianModel polynomial(BivariatePolynomial h);
  static HamiltonianModel general(Evaluator h, double fd_step = kDefaultFdStep);

  double operator()(double p, double q) const;

  /// d^a d^b H / dp^a dq^b at (p, q). `first` selects the outer axis of the
  /// nested stencil for mixed finite-difference partials; analytic results do
  /// not depend on it.
  double partial(PartialOrder order, double p, double q,
                 Axis first = Axis::p) const;

  double dp(double p, double q) const { return partial({1, 0}, p, q); }
  double dq(double p, double q) const { return partial({0, 1}, p, q); }

  ModelKind kind() const { return kind_; }
  DerivativeMode derivative_mode() const { return mode_; }
  double fd_step() const { return fd_step_; }

  /// Kinetic mass, for models of the form p^2/(2m) + V(q).
  std::optional<double> mass() const { return mass_; }
  /// k when V(q) = k q^2 / 2 exactly (free particle: 0).
  std::optional<double> quadratic_stiffness() const;
  const std::optional<BivariatePolynomial>& polynomial_form() const {
    return poly_;
  }

  /// -H, as a general model.
  HamiltonianModel negated() const;

 private:
  HamiltonianModel() = default;
  double evaluate_raw(double p, double q) const;
  double fd_partial(PartialOrder order, double p, double q, Axis first) const;

  ModelKind kind_ = ModelKind::general;
  DerivativeMode mode_ = DerivativeMode::analytic;
  std::optional<double> mass_;
  std::optional<BivariatePolynomial> poly_;
  std::vector<BivariatePolynomial> poly_partials_;  // indexed (a, b) -> 4a+b
  Potential potential_;
  Evaluator evaluator_;
  double fd_step_ = kDefaultFdStep;
};

/// Probe region for convexity tests. Verdicts are statements about this box
/// only.
struct DomainBox {
  double p_min = -1.0;
  double p_max = 1.0;
  double q_min = -1.0;
  double q_max = 1.0;
  std::size_t p_count = 11;
  std::size_t q_count = 11;

  /// Throws ErrorCode::domain on a degenerate box.
  void validate() const;
};

/// Chord-versus-arc outcome along one axis. `affine` means both the convex
/// and the concave inequality held at every tested triple.
enum class Curvature { convex, concave, affine, neither };

/// Samples `samples` points along `axis` for every frozen grid value of the
/// other axis and checks H(l x1 + (1-l) x2) against the chord for every pair
/// and l in {0.1, ..., 0.9}, with absolute slack kConvexitySlack.
Curvature convexity_probe(const HamiltonianModel& model, const DomainBox& box,
                          Axis axis, std::size_t samples);

enum class SaddleVerdict { saddle, not_saddle };

/// Convex (or affine) in p and concave (or affine) in q over the box.
SaddleVerdict saddle_probe(const HamiltonianModel& model, const DomainBox& box);

}  // namespace dualaction
