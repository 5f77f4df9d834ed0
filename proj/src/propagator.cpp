#include "dualaction/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "dualaction/error.hpp"

namespace dualaction {

namespace {

constexpr double kCausticFloor = 1e-9;

void require_slices(double t, std::size_t slices) {
  if (slices < 1) throw Error(ErrorCode::invalid_argument, "need >= 1 slice");
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::invalid_argument, "sliced propagators need t > 0");
  }
}

// Stationary interior nodes: tridiag(-1, a, -1) x = (x_i, 0, ..., 0, x_f).
std::vector<double> thomas(double a, double x_i, double x_f, std::size_t interior) {
  std::vector<double> c(interior), d(interior), x(interior);
  for (std::size_t j = 0; j < interior; ++j) {
    double rhs = 0.0;
    if (j == 0) rhs += x_i;
    if (j + 1 == interior) rhs += x_f;
    const double denom = j == 0 ? a : a + c[j - 1];
    if (denom == 0.0) throw Error(ErrorCode::caustic, "singular chain");
    c[j] = -1.0 / denom;
    d[j] = (rhs + (j == 0 ? 0.0 : d[j - 1])) / denom;
  }
  for (std::size_t j = interior; j-- > 0;) {
    x[j] = d[j] - (j + 1 < interior ? c[j] * x[j + 1] : 0.0);
  }
  return x;
}

struct QuadraticForm {
  double mass;
  double stiffness;
};

QuadraticForm quadratic_form(const HamiltonianModel& model) {
  const auto m = model.mass();
  const auto k = model.quadratic_stiffness();
  if (!m || !k || model.kind() == ModelKind::general) {
    throw Error(ErrorCode::invalid_argument,
                "sliced propagators need p^2/(2m) + k q^2/2");
  }
  return {*m, *k};
}

}  // namespace

Complex GaussianKernel::operator()(double x_f, double x_i) const {
  return prefactor * std::polar(1.0, exponent(x_f, x_i));
}

std::vector<double> chain_classical_path(double inertia, double stiffness,
                                         double x_i, double x_f, double t,
                                         std::size_t slices) {
  require_slices(t, slices);
  const double eps = t / static_cast<double>(slices);
  const double a = 2.0 - stiffness / inertia * eps * eps;
  std::vector<double> x;
  x.reserve(slices + 1);
  x.push_back(x_i);
  if (slices > 1) {
    const auto inner = thomas(a, x_i, x_f, slices - 1);
    x.insert(x.end(), inner.begin(), inner.end());
  }
  x.push_back(x_f);
  return x;
}

double chain_action(double inertia, double stiffness, const std::vector<double>& x,
                    double t) {
  const double eps = t / static_cast<double>(x.size() - 1);
  double s = 0.0;
  for (std::size_t j = 1; j < x.size(); ++j) {
    const double dx = x[j] - x[j - 1];
    s += inertia * dx * dx / (2.0 * eps) -
         eps * stiffness * (x[j] * x[j] + x[j - 1] * x[j - 1]) / 4.0;
  }
  return s;
}

GaussianKernel gaussian_chain(double inertia, double stiffness, double t,
                              std::size_t slices) {
  require_slices(t, slices);
  if (!(inertia > 0.0)) throw Error(ErrorCode::invalid_argument, "inertia must be > 0");
  const double eps = t / static_cast<double>(slices);
  const double a = 2.0 - stiffness / inertia * eps * eps;
  double d_prev = 1.0;  // D_0
  double d = a;         // D_1
  if (slices == 1) {
    d = 1.0;
  } else {
    for (std::size_t k = 1; k + 1 < slices; ++k) {
      const double next = a * d - d_prev;
      d_prev = d;
      d = next;
      // A sign change means a zero of the determinant was crossed.
      if (d <= 0.0) break;
    }
  }
  if (eps * d <= kCausticFloor) {
    throw Error(ErrorCode::caustic, "chain determinant at or past a caustic");
  }
  GaussianKernel g;
  g.prefactor = std::polar(std::sqrt(inertia / (2.0 * std::numbers::pi * eps * d)),
                           -std::numbers::pi / 4.0);
  auto s = [&](double xf, double xi) {
    return chain_action(inertia, stiffness,
                        chain_classical_path(inertia, stiffness, xi, xf, t, slices), t);
  };
  g.c_ff = s(1.0, 0.0);
  g.c_ii = s(0.0, 1.0);
  g.c_if = s(1.0, 1.0) - g.c_ff - g.c_ii;
  return g;
}

GaussianKernel position_chain(const HamiltonianModel& model, double t,
                              std::size_t slices) {
  const auto f = quadratic_form(model);
  if (f.stiffness > 0.0 && std::sqrt(f.stiffness / f.mass) * t >= std::numbers::pi) {
    throw Error(ErrorCode::caustic, "omega t must stay below pi");
  }
  return gaussian_chain(f.mass, f.stiffness, t, slices);
}

GaussianKernel momentum_chain(const HamiltonianModel& model, double t,
                              std::size_t slices) {
  const auto f = quadratic_form(model);
  if (!(f.stiffness > 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "momentum chain needs a harmonic oscillator");
  }
  if (std::sqrt(f.stiffness / f.mass) * t >= std::numbers::pi) {
    throw Error(ErrorCode::caustic, "omega t must stay below pi");
  }
  return gaussian_chain(1.0 / f.stiffness, 1.0 / f.mass, t, slices);
}

PropagatorValue sliced_position_propagator(const HamiltonianModel& model,
                                           double q_i, double q_f, double t,
                                           const SliceScheme& scheme) {
  PropagatorValue v;
  v.amplitude = position_chain(model, t, scheme.slices)(q_f, q_i);
  return v;
}

PropagatorValue sliced_momentum_propagator(const HamiltonianModel& model,
                                           double p_i, double p_f, double t,
                                           const SliceScheme& scheme) {
  PropagatorValue v;
  v.amplitude = momentum_chain(model, t, scheme.slices)(p_f, p_i);
  return v;
}

PropagatorValue free_momentum_propagator(double mass, double p_i, double p_f,
                                         double t) {
  if (!(mass > 0.0)) throw Error(ErrorCode::invalid_argument, "mass must be > 0");
  PropagatorValue v;
  v.variant = PropagatorValue::Variant::delta;
  v.support_matched = p_i == p_f;
  v.causal = t > 0.0;
  v.phase = std::polar(1.0, -p_i * p_i * t / (2.0 * mass));
  return v;
}

void FourierGrid::validate() const {
  if (points < 8 || points % 2 != 0) {
    throw Error(ErrorCode::invalid_argument, "fourier grid needs an even point count >= 8");
  }
  if (spacing < 0.0 || !(taper_radius > flat_radius) || !(flat_radius > 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "fourier grid needs spacing >= 0 and 0 < flat < taper radius");
  }
}

double FourierGrid::source_spacing() const {
  return spacing > 0.0 ? spacing
                       : std::sqrt(2.0 * std::numbers::pi / static_cast<double>(points));
}

double FourierGrid::target_spacing() const {
  return 2.0 * std::numbers::pi / (static_cast<double>(points) * source_spacing());
}

namespace {

std::vector<double> centered_axis(std::size_t n, double dx) {
  std::vector<double> axis(n);
  for (std::size_t j = 0; j < n; ++j) {
    axis[j] = (static_cast<double>(j) - static_cast<double>(n / 2)) * dx;
  }
  return axis;
}

}  // namespace

std::vector<double> FourierGrid::source_axis() const {
  return centered_axis(points, source_spacing());
}

std::vector<double> FourierGrid::target_axis() const {
  return centered_axis(points, target_spacing());
}

double window(double x, double flat_radius, double taper_radius) {
  const double r = std::abs(x);
  if (r <= flat_radius) return 1.0;
  if (r >= taper_radius) return 0.0;
  auto bump = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  const double s = (taper_radius - r) / (taper_radius - flat_radius);
  return bump(s) / (bump(s) + bump(1.0 - s));
}

SampledKernel sample_kernel(const KernelFunction& source, Representation rep,
                            const FourierGrid& grid) {
  grid.validate();
  SampledKernel k;
  k.rep = rep;
  k.axis = grid.source_axis();
  const std::size_t n = k.axis.size();
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) {
    w[j] = window(k.axis[j], grid.flat_radius, grid.taper_radius);
  }
  k.values.assign(n * n, Complex{});
  for (std::size_t f = 0; f < n; ++f) {
    if (w[f] == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      if (w[i] == 0.0) continue;
      k.values[f * n + i] = w[f] * w[i] * source(k.axis[f], k.axis[i]);
    }
  }
  return k;
}

namespace {

// Dense complex matrix in split storage; std::complex products go through a
// slow NaN-aware path without -ffast-math.
struct Split {
  std::size_t n = 0;
  std::vector<double> re, im;
  explicit Split(std::size_t size) : n(size), re(size * size), im(size * size) {}
};

// out = a * b
Split multiply(const Split& a, const Split& b) {
  const std::size_t n = a.n;
  Split out(n);
  for (std::size_t r = 0; r < n; ++r) {
    double* ore = &out.re[r * n];
    double* oim = &out.im[r * n];
    for (std::size_t k = 0; k < n; ++k) {
      const double ar = a.re[r * n + k];
      const double ai = a.im[r * n + k];
      if (ar == 0.0 && ai == 0.0) continue;
      const double* bre = &b.re[k * n];
      const double* bim = &b.im[k * n];
      for (std::size_t c = 0; c < n; ++c) {
        ore[c] += ar * bre[c] - ai * bim[c];
        oim[c] += ar * bim[c] + ai * bre[c];
      }
    }
  }
  return out;
}

// F[l][j] = scale * exp(sign * i * k_l x_j)
Split dft_matrix(const std::vector<double>& k, const std::vector<double>& x,
                 double sign, double scale) {
  const std::size_t n = k.size();
  Split m(n);
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t j = 0; j < n; ++j) {
      const double arg = sign * k[l] * x[j];
      m.re[l * n + j] = scale * std::cos(arg);
      m.im[l * n + j] = scale * std::sin(arg);
    }
  }
  return m;
}

}  // namespace

SampledKernel fourier_transform(const SampledKernel& kernel, const FourierGrid& grid) {
  grid.validate();
  const std::size_t n = kernel.size();
  if (n != grid.points || kernel.values.size() != n * n) {
    throw Error(ErrorCode::invalid_argument, "kernel does not match the grid");
  }
  // The input axis is whichever of the two reciprocal axes it was sampled on.
  const double dx = kernel.axis.size() > 1 ? kernel.axis[1] - kernel.axis[0] : 1.0;
  const bool on_source = std::abs(dx - grid.source_spacing()) <= 1e-12 * dx;
  const double dk = on_source ? grid.target_spacing() : grid.source_spacing();
  const auto target = centered_axis(n, dk);
  const double sign = kernel.rep == Representation::position ? -1.0 : 1.0;
  const double scale = dx / std::sqrt(2.0 * std::numbers::pi);

  Split g(n);
  for (std::size_t r = 0; r < n * n; ++r) {
    g.re[r] = kernel.values[r].real();
    g.im[r] = kernel.values[r].imag();
  }
  // out = F_final * g * F_initial^T; F_initial^T[j][l] = scale exp(-sign i k_l x_j).
  const Split final_side = dft_matrix(target, kernel.axis, sign, scale);
  Split initial_t(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t l = 0; l < n; ++l) {
      const double arg = -sign * target[l] * kernel.axis[j];
      initial_t.re[j * n + l] = scale * std::cos(arg);
      initial_t.im[j * n + l] = scale * std::sin(arg);
    }
  }
  const Split out = multiply(multiply(final_side, g), initial_t);

  SampledKernel result;
  result.rep = kernel.rep == Representation::position ? Representation::momentum
                                                      : Representation::position;
  result.axis = target;
  result.values.resize(n * n);
  for (std::size_t r = 0; r < n * n; ++r) result.values[r] = {out.re[r], out.im[r]};
  return result;
}

SampledKernel fourier_endpoints(const KernelFunction& source,
                                Representation source_rep,
                                const FourierGrid& grid) {
  auto out = fourier_transform(sample_kernel(source, source_rep, grid), grid);
  const std::size_t n = out.size();
  const double edge = 0.4 * static_cast<double>(n);
  auto outer = [&](std::size_t j) {
    return std::abs(static_cast<double>(j) - static_cast<double>(n / 2)) > edge;
  };
  double total = 0.0;
  double outside = 0.0;
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t i = 0; i < n; ++i) {
      const double e = std::norm(out.at(f, i));
      total += e;
      if (outer(f) || outer(i)) outside += e;
    }
  }
  if (total > 0.0 && outside > 0.01 * total) {
    throw Error(ErrorCode::bandwidth, "transformed kernel is not band-limited on this grid");
  }
  return out;
}

std::vector<Complex> fourier_endpoints(const DeltaSource& source,
                                       const FourierGrid& grid,
                                       const std::vector<double>& dq) {
  grid.validate();
  if (!(source.mass > 0.0) || !(source.t > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "delta source needs mass > 0 and t > 0");
  }
  const double zone = 4.0 * std::sqrt(source.mass / source.t);
  for (double x : dq) {
    const double stationary = source.mass * x / source.t;
    if (std::abs(stationary) + zone > grid.flat_radius) {
      throw Error(ErrorCode::bandwidth,
                  "stationary momentum and Fresnel zone leave the flat window");
    }
  }
  const auto p = grid.source_axis();
  const double dp = grid.source_spacing();
  std::vector<double> amp_re(p.size()), amp_im(p.size());
  for (std::size_t l = 0; l < p.size(); ++l) {
    const double w = window(p[l], grid.flat_radius, grid.taper_radius);
    const double phase = -p[l] * p[l] * source.t / (2.0 * source.mass);
    amp_re[l] = w * source.prefactor * std::cos(phase);
    amp_im[l] = w * source.prefactor * std::sin(phase);
  }
  std::vector<Complex> out;
  out.reserve(dq.size());
  const double scale = dp / (2.0 * std::numbers::pi);
  for (double x : dq) {
    double re = 0.0, im = 0.0;
    for (std::size_t l = 0; l < p.size(); ++l) {
      if (amp_re[l] == 0.0 && amp_im[l] == 0.0) continue;
      const double c = std::cos(p[l] * x);
      const double s = std::sin(p[l] * x);
      re += amp_re[l] * c - amp_im[l] * s;
      im += amp_re[l] * s + amp_im[l] * c;
    }
    out.emplace_back(scale * re, scale * im);
  }
  return out;
}

double normalization_extraction(Complex sample, double mass, double t) {
  if (!(mass > 0.0) || !(t > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "normalization needs mass > 0 and t > 0");
  }
  return std::abs(sample) * std::sqrt(2.0 * std::numbers::pi * t / mass);
}

void write_csv(std::ostream& out, const SampledKernel& kernel) {
  out << "final,initial,re,im\n";
  const std::size_t n = kernel.size();
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t i = 0; i < n; ++i) {
      const Complex v = kernel.at(f, i);
      out << kernel.axis[f] << ',' << kernel.axis[i] << ',' << v.real() << ','
          << v.imag() << '\n';
    }
  }
}

const char* to_string(Representation rep) {
  return rep == Representation::position ? "position" : "momentum";
}

}  // namespace dualaction
