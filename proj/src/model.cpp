#include "dualaction/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "dualaction/error.hpp"

namespace dualaction {

namespace {

constexpr int kMaxOrder = 3;

int partial_index(int a, int b) { return 4 * a + b; }

double checked(double value, double p, double q) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::domain, "non-finite Hamiltonian value at p=" +
                                       std::to_string(p) +
                                       ", q=" + std::to_string(q));
  }
  return value;
}

void check_order(PartialOrder order) {
  if (order.p < 0 || order.q < 0 || order.total() > kMaxOrder) {
    throw Error(ErrorCode::unsupported_order,
                "partial order (" + std::to_string(order.p) + "," +
                    std::to_string(order.q) + ") exceeds total order 3");
  }
}

double step_for(int total_order, double h_fd, double x) {
  double base = h_fd;
  if (total_order == 2) base = std::pow(h_fd, 0.4);
  if (total_order >= 3) base = std::cbrt(h_fd);
  return base * std::max(1.0, std::abs(x));
}

// n-th derivative of g at x. Plain central differences when the requested
// partial is first order overall, fourth-order stencils otherwise.
template <typename F>
double stencil(const F& g, double x, int n, int total_order, double h_fd) {
  const double h = step_for(total_order, h_fd, x);
  switch (n) {
    case 0:
      return g(x);
    case 1:
      if (total_order == 1) return (g(x + h) - g(x - h)) / (2.0 * h);
      return (-g(x + 2 * h) + 8 * g(x + h) - 8 * g(x - h) + g(x - 2 * h)) /
             (12.0 * h);
    case 2:
      return (-g(x + 2 * h) + 16 * g(x + h) - 30 * g(x) + 16 * g(x - h) -
              g(x - 2 * h)) /
             (12.0 * h * h);
    case 3:
      return (-g(x + 3 * h) + 8 * g(x + 2 * h) - 13 * g(x + h) +
              13 * g(x - h) - 8 * g(x - 2 * h) + g(x - 3 * h)) /
             (8.0 * h * h * h);
    default:
      throw Error(ErrorCode::unsupported_order, "stencil order above 3");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// BivariatePolynomial

BivariatePolynomial::BivariatePolynomial(std::vector<Monomial> terms) {
  std::map<std::pair<int, int>, double> merged;
  for (const auto& t : terms) {
    if (t.p_power < 0 || t.q_power < 0) {
      throw Error(ErrorCode::invalid_argument, "negative monomial power");
    }
    merged[{t.p_power, t.q_power}] += t.coeff;
  }
  for (const auto& [powers, c] : merged) {
    if (c != 0.0) terms_.push_back({powers.first, powers.second, c});
  }
}

double BivariatePolynomial::operator()(double p, double q) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    sum += t.coeff * std::pow(p, t.p_power) * std::pow(q, t.q_power);
  }
  return sum;
}

BivariatePolynomial BivariatePolynomial::derivative(int dp, int dq) const {
  std::vector<Monomial> out;
  for (const auto& t : terms_) {
    if (t.p_power < dp || t.q_power < dq) continue;
    double c = t.coeff;
    for (int k = 0; k < dp; ++k) c *= t.p_power - k;
    for (int k = 0; k < dq; ++k) c *= t.q_power - k;
    out.push_back({t.p_power - dp, t.q_power - dq, c});
  }
  return BivariatePolynomial(std::move(out));
}

BivariatePolynomial BivariatePolynomial::operator-() const {
  BivariatePolynomial out = *this;
  for (auto& t : out.terms_) t.coeff = -t.coeff;
  return out;
}

BivariatePolynomial operator+(const BivariatePolynomial& a,
                              const BivariatePolynomial& b) {
  std::vector<Monomial> all = a.terms_;
  all.insert(all.end(), b.terms_.begin(), b.terms_.end());
  return BivariatePolynomial(std::move(all));
}

bool BivariatePolynomial::depends_on(Axis axis) const {
  return std::any_of(terms_.begin(), terms_.end(), [axis](const Monomial& t) {
    return axis == Axis::p ? t.p_power > 0 : t.q_power > 0;
  });
}

// ---------------------------------------------------------------------------
// HamiltonianModel

HamiltonianModel HamiltonianModel::polynomial(BivariatePolynomial h) {
  HamiltonianModel m;
  m.kind_ = ModelKind::general;
  m.mode_ = DerivativeMode::analytic;
  m.poly_partials_.assign(16, BivariatePolynomial{});
  for (int a = 0; a <= kMaxOrder; ++a) {
    for (int b = 0; a + b <= kMaxOrder; ++b) {
      m.poly_partials_[partial_index(a, b)] = h.derivative(a, b);
    }
  }
  m.poly_ = std::move(h);
  return m;
}

HamiltonianModel HamiltonianModel::separable(
    double mass, const std::vector<double>& potential_coeffs) {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw Error(ErrorCode::invalid_argument, "mass must be positive");
  }
  std::vector<Monomial> terms{{2, 0, 0.5 / mass}};
  for (std::size_t k = 0; k < potential_coeffs.size(); ++k) {
    terms.push_back({0, static_cast<int>(k), potential_coeffs[k]});
  }
  HamiltonianModel m = polynomial(BivariatePolynomial(std::move(terms)));
  m.kind_ = ModelKind::separable;
  m.mass_ = mass;
  return m;
}

HamiltonianModel HamiltonianModel::separable(double mass, Potential potential,
                                             double fd_step) {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw Error(ErrorCode::invalid_argument, "mass must be positive");
  }
  if (!(fd_step > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "fd_step must be positive");
  }
  HamiltonianModel m;
  m.kind_ = ModelKind::separable;
  m.mode_ = DerivativeMode::finite_difference;
  m.mass_ = mass;
  m.potential_ = std::move(potential);
  m.fd_step_ = fd_step;
  return m;
}

HamiltonianModel HamiltonianModel::free_particle(double mass) {
  return separable(mass, std::vector<double>{});
}

HamiltonianModel HamiltonianModel::harmonic(double mass, double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw Error(ErrorCode::invalid_argument, "oscillator frequency must be > 0");
  }
  return separable(mass, {0.0, 0.0, 0.5 * mass * omega * omega});
}

HamiltonianModel HamiltonianModel::saddle_quadratic(double mass,
                                                    double stiffness) {
  if (!(stiffness > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "saddle stiffness must be > 0");
  }
  HamiltonianModel m = separable(mass, {0.0, 0.0, -0.5 * stiffness});
  m.kind_ = ModelKind::quadratic_saddle;
  return m;
}

HamiltonianModel HamiltonianModel::constant_force(double mass, double force) {
  return separable(mass, {0.0, -force});
}

HamiltonianModel HamiltonianModel::general(Evaluator h, double fd_step) {
  if (!(fd_step > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "fd_step must be positive");
  }
  HamiltonianModel m;
  m.kind_ = ModelKind::general;
  m.mode_ = DerivativeMode::finite_difference;
  m.evaluator_ = std::move(h);
  m.fd_step_ = fd_step;
  return m;
}

std::optional<double> HamiltonianModel::quadratic_stiffness() const {
  if (!mass_ || !poly_) return std::nullopt;
  double k = 0.0;
  for (const auto& t : poly_->terms()) {
    if (t.p_power == 2 && t.q_power == 0) continue;
    if (t.p_power == 0 && t.q_power == 2) {
      k = 2.0 * t.coeff;
      continue;
    }
    if (t.p_power == 0 && t.q_power == 0) continue;  // energy offset
    return std::nullopt;
  }
  return k;
}

HamiltonianModel HamiltonianModel::negated() const {
  if (poly_) return polynomial(-*poly_);
  HamiltonianModel inner = *this;
  return general([inner](double p, double q) { return -inner(p, q); },
                 fd_step_);
}

double HamiltonianModel::evaluate_raw(double p, double q) const {
  if (poly_) return (*poly_)(p, q);
  if (potential_) return 0.5 * p * p / *mass_ + potential_(q);
  return evaluator_(p, q);
}

double HamiltonianModel::operator()(double p, double q) const {
  return checked(evaluate_raw(p, q), p, q);
}

double HamiltonianModel::partial(PartialOrder order, double p, double q,
                                 Axis first) const {
  check_order(order);
  if (poly_) {
    return checked(poly_partials_[partial_index(order.p, order.q)](p, q), p, q);
  }
  if (potential_) {
    // Kinetic part is exact; only V needs differencing.
    if (order.p > 0 && order.q > 0) return 0.0;
    if (order.p == 1) return p / *mass_;
    if (order.p == 2) return 1.0 / *mass_;
    if (order.p == 3) return 0.0;
    if (order.q == 0) return (*this)(p, q);
    auto v = [this](double x) { return potential_(x); };
    return checked(stencil(v, q, order.q, order.q, fd_step_), p, q);
  }
  return checked(fd_partial(order, p, q, first), p, q);
}

double HamiltonianModel::fd_partial(PartialOrder order, double p, double q,
                                    Axis first) const {
  const int total = order.total();
  if (total == 0) return evaluate_raw(p, q);
  auto inner_q = [&](double pp) {
    auto g = [&](double qq) { return evaluate_raw(pp, qq); };
    return stencil(g, q, order.q, total, fd_step_);
  };
  auto inner_p = [&](double qq) {
    auto g = [&](double pp) { return evaluate_raw(pp, qq); };
    return stencil(g, p, order.p, total, fd_step_);
  };
  if (first == Axis::p) return stencil(inner_q, p, order.p, total, fd_step_);
  return stencil(inner_p, q, order.q, total, fd_step_);
}

// ---------------------------------------------------------------------------
// Convexity probes

void DomainBox::validate() const {
  if (!(p_min < p_max) || !(q_min < q_max)) {
    throw Error(ErrorCode::domain, "degenerate domain box");
  }
  if (p_count < 3 || q_count < 3) {
    throw Error(ErrorCode::domain, "domain box needs at least 3 grid points per axis");
  }
}

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

}  // namespace

Curvature convexity_probe(const HamiltonianModel& model, const DomainBox& box,
                          Axis axis, std::size_t samples) {
  box.validate();
  if (samples < 10) {
    throw Error(ErrorCode::invalid_argument, "convexity probe needs >= 10 samples");
  }
  const bool along_p = axis == Axis::p;
  const auto xs = along_p ? linspace(box.p_min, box.p_max, samples)
                          : linspace(box.q_min, box.q_max, samples);
  const auto frozen = along_p ? linspace(box.q_min, box.q_max, box.q_count)
                              : linspace(box.p_min, box.p_max, box.p_count);

  bool convex_ok = true;
  bool concave_ok = true;
  for (double y : frozen) {
    auto h = [&](double x) { return along_p ? model(x, y) : model(y, x); };
    std::vector<double> values(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) values[i] = h(xs[i]);

    for (std::size_t i = 0; i < xs.size() && (convex_ok || concave_ok); ++i) {
      for (std::size_t j = i + 1; j < xs.size(); ++j) {
        for (int k = 1; k <= 9; ++k) {
          const double lambda = 0.1 * k;
          const double arc = h(lambda * xs[i] + (1.0 - lambda) * xs[j]);
          const double chord = lambda * values[i] + (1.0 - lambda) * values[j];
          if (arc > chord + kConvexitySlack) convex_ok = false;
          if (arc < chord - kConvexitySlack) concave_ok = false;
        }
      }
    }
    if (!convex_ok && !concave_ok) break;
  }
  if (convex_ok && concave_ok) return Curvature::affine;
  if (convex_ok) return Curvature::convex;
  if (concave_ok) return Curvature::concave;
  return Curvature::neither;
}

SaddleVerdict saddle_probe(const HamiltonianModel& model, const DomainBox& box) {
  const auto p_samples = std::max<std::size_t>(10, box.p_count);
  const auto q_samples = std::max<std::size_t>(10, box.q_count);
  const Curvature along_p = convexity_probe(model, box, Axis::p, p_samples);
  if (along_p != Curvature::convex && along_p != Curvature::affine) {
    return SaddleVerdict::not_saddle;
  }
  const Curvature along_q = convexity_probe(model, box, Axis::q, q_samples);
  if (along_q != Curvature::concave && along_q != Curvature::affine) {
    return SaddleVerdict::not_saddle;
  }
  return SaddleVerdict::saddle;
}

}  // namespace dualaction
