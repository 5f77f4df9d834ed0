#include "dualaction/extrema.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>

namespace dualaction {

std::array<double, 2> SecondVariationMatrix::eigenvalues() const {
  const double mean = 0.5 * (a11 + a22);
  const double radius = std::hypot(0.5 * (a11 - a22), a12);
  const double hi = mean + radius;
  // Recover the smaller root from the determinant when the sum cancels.
  double lo = mean - radius;
  if (hi != 0.0 && std::abs(lo) < 1e-8 * std::abs(hi)) lo = determinant() / hi;
  return {lo, hi};
}

namespace {

BivariatePolynomial times(const BivariatePolynomial& f, Axis axis) {
  std::vector<Monomial> terms = f.terms();
  for (auto& t : terms) (axis == Axis::p ? t.p_power : t.q_power) += 1;
  return BivariatePolynomial(std::move(terms));
}

// Entries as polynomials, so terms that cancel algebraically (the B(q) p
// contributions, for one) cancel exactly instead of to rounding.
struct SymbolicMatrix {
  BivariatePolynomial a11, a12, a22;
  WhichAction which;

  SecondVariationMatrix operator()(double p, double q) const {
    return {a11(p, q), a12(p, q), a22(p, q), which};
  }
};

SymbolicMatrix symbolic(const BivariatePolynomial& h, WhichAction which) {
  if (which == WhichAction::S) {
    return {h.derivative(2, 0) + times(h.derivative(3, 0), Axis::p),
            times(h.derivative(2, 1), Axis::p),
            times(h.derivative(1, 2), Axis::p) + -h.derivative(0, 2), which};
  }
  return {times(h.derivative(2, 1), Axis::q) + -h.derivative(2, 0),
          times(h.derivative(1, 2), Axis::q),
          times(h.derivative(0, 3), Axis::q) + h.derivative(0, 2), which};
}

}  // namespace

SecondVariationMatrix hessian_s(const HamiltonianModel& m, double p, double q) {
  if (const auto& poly = m.polynomial_form()) return symbolic(*poly, WhichAction::S)(p, q);
  const double hpp = m.partial({2, 0}, p, q);
  const double hppp = m.partial({3, 0}, p, q);
  const double hppq = m.partial({2, 1}, p, q);
  const double hpqq = m.partial({1, 2}, p, q);
  const double hqq = m.partial({0, 2}, p, q);
  return {hpp + p * hppp, p * hppq, p * hpqq - hqq, WhichAction::S};
}

SecondVariationMatrix hessian_r(const HamiltonianModel& m, double p, double q) {
  if (const auto& poly = m.polynomial_form()) return symbolic(*poly, WhichAction::R)(p, q);
  const double hpp = m.partial({2, 0}, p, q);
  const double hppq = m.partial({2, 1}, p, q);
  const double hqqp = m.partial({1, 2}, p, q, Axis::q);
  const double hqqq = m.partial({0, 3}, p, q);
  const double hqq = m.partial({0, 2}, p, q);
  return {q * hppq - hpp, q * hqqp, q * hqqq + hqq, WhichAction::R};
}

SecondVariationMatrix hessian(const HamiltonianModel& model, WhichAction which,
                              double p, double q) {
  return which == WhichAction::S ? hessian_s(model, p, q) : hessian_r(model, p, q);
}

ExtremumReport classify_extremum(const HamiltonianModel& model,
                                 const PhasePath& path, WhichAction which,
                                 double relative_tolerance) {
  ExtremumReport rep;
  rep.which = which;
  const auto& p = path.p();
  const auto& q = path.q();
  std::optional<SymbolicMatrix> form;
  if (model.polynomial_form()) form = symbolic(*model.polynomial_form(), which);
  double scale = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const auto m = form ? (*form)(p[j], q[j]) : hessian(model, which, p[j], q[j]);
    const auto ev = m.eigenvalues();
    rep.nodes.push_back({path.grid().time(j), ev[0], ev[1], m.determinant()});
    scale = std::max({scale, std::abs(m.a11), std::abs(m.a12), std::abs(m.a22)});
  }
  rep.zero_tolerance = relative_tolerance * scale;

  bool any_zero = false;
  double lo = rep.nodes.front().lambda1;
  double hi = rep.nodes.front().lambda2;
  for (const auto& n : rep.nodes) {
    any_zero = any_zero || std::abs(n.lambda1) <= rep.zero_tolerance ||
               std::abs(n.lambda2) <= rep.zero_tolerance;
    lo = std::min(lo, n.lambda1);
    hi = std::max(hi, n.lambda2);
  }
  if (any_zero) {
    rep.classification = Extremum::degenerate;
  } else if (lo > rep.zero_tolerance) {
    rep.classification = Extremum::minimum;
  } else if (hi < -rep.zero_tolerance) {
    rep.classification = Extremum::maximum;
  } else {
    rep.classification = Extremum::indefinite;
  }

  const double h = path.grid().step();
  for (std::size_t j = 1; j + 1 < p.size(); ++j) {
    const double qdot = (q[j + 1] - q[j - 1]) / (2.0 * h);
    const double pdot = (p[j + 1] - p[j - 1]) / (2.0 * h);
    rep.stationarity = std::max({rep.stationarity,
                                 std::abs(qdot - model.dp(p[j], q[j])),
                                 std::abs(pdot + model.dq(p[j], q[j]))});
  }
  return rep;
}

void write_csv(std::ostream& out, const ExtremumReport& report) {
  out << "t,lambda1,lambda2\n";
  for (const auto& n : report.nodes) {
    out << n.t << ',' << n.lambda1 << ',' << n.lambda2 << '\n';
  }
}

const char* to_string(Extremum e) {
  switch (e) {
    case Extremum::minimum: return "minimum";
    case Extremum::maximum: return "maximum";
    case Extremum::indefinite: return "indefinite";
    case Extremum::degenerate: return "degenerate";
  }
  return "unknown";
}

const char* to_string(WhichAction w) { return w == WhichAction::S ? "S" : "R"; }

}  // namespace dualaction
