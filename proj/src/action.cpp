#include "dualaction/action.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>

#include "dualaction/error.hpp"

namespace dualaction {

QuadratureRule default_rule(std::size_t intervals) {
  return intervals % 2 == 0 ? QuadratureRule::simpson : QuadratureRule::trapezoid;
}

const char* to_string(QuadratureRule rule) {
  return rule == QuadratureRule::simpson ? "simpson" : "trapezoid";
}

std::vector<double> sampled_derivative(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  if (n < 3) {
    throw Error(ErrorCode::invalid_argument, "derivative needs >= 3 samples");
  }
  std::vector<double> d(n);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  for (std::size_t j = 1; j + 1 < n; ++j) d[j] = (f[j + 1] - f[j - 1]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return d;
}

double integrate(const std::vector<double>& f, double h, QuadratureRule rule) {
  if (f.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "quadrature needs >= 2 samples");
  }
  const std::size_t n = f.size() - 1;
  if (rule == QuadratureRule::trapezoid) {
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t j = 1; j < n; ++j) s += f[j];
    return s * h;
  }
  if (n < 2 || n % 2 != 0) {
    throw Error(ErrorCode::rule, "simpson rule needs an even interval count >= 2");
  }
  double s = f.front() + f.back();
  for (std::size_t j = 1; j < n; ++j) s += (j % 2 == 1 ? 4.0 : 2.0) * f[j];
  return s * h / 3.0;
}

namespace {

void require_derivative_nodes(const PhasePath& path) {
  if (path.intervals() < 2) {
    throw Error(ErrorCode::rule, "path derivatives need N >= 2");
  }
}

}  // namespace

ActionValue action_s(const HamiltonianModel& model, const PhasePath& path,
                     QuadratureRule rule) {
  require_derivative_nodes(path);
  const double h = path.grid().step();
  const auto& p = path.p();
  const auto& q = path.q();
  const auto qdot = sampled_derivative(q, h);
  std::vector<double> lagrangian(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    lagrangian[j] = p[j] * qdot[j] - model(p[j], q[j]);
  }
  return ActionValue{integrate(lagrangian, h, rule), rule, path.intervals()};
}

ActionValue action_s(const HamiltonianModel& model, const PhasePath& path) {
  return action_s(model, path, default_rule(path.intervals()));
}

ActionValue action_r(const HamiltonianModel& model, const PhasePath& path,
                     QuadratureRule rule) {
  require_derivative_nodes(path);
  const double h = path.grid().step();
  const auto& p = path.p();
  const auto& q = path.q();
  const auto pdot = sampled_derivative(p, h);
  std::vector<double> k(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    k[j] = -(q[j] * pdot[j] + model(p[j], q[j]));
  }
  return ActionValue{integrate(k, h, rule), rule, path.intervals()};
}

ActionValue action_r(const HamiltonianModel& model, const PhasePath& path) {
  return action_r(model, path, default_rule(path.intervals()));
}

double legendre_residual(const HamiltonianModel& model, const PhasePath& path,
                         QuadratureRule rule) {
  const double s = action_s(model, path, rule).value;
  const double r = action_r(model, path, rule).value;
  const auto& p = path.p();
  const auto& q = path.q();
  const double boundary = p.back() * q.back() - p.front() * q.front();
  return s - r - boundary;
}

double legendre_residual(const HamiltonianModel& model, const PhasePath& path) {
  return legendre_residual(model, path, default_rule(path.intervals()));
}

PhasePath smooth_random_path(const TimeGrid& grid, std::uint64_t seed,
                             double amplitude, int modes) {
  grid.validate();
  if (modes < 0) throw Error(ErrorCode::invalid_argument, "modes must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const auto count = static_cast<std::size_t>(modes) + 1;
  std::vector<double> coeff[2], phase[2];
  for (int a = 0; a < 2; ++a) {
    coeff[a].resize(count);
    phase[a].resize(count);
    for (std::size_t k = 0; k < count; ++k) {
      coeff[a][k] = amplitude * unit(rng);
      phase[a][k] = std::numbers::pi * unit(rng);
    }
  }
  std::vector<double> v[2];
  for (int a = 0; a < 2; ++a) {
    v[a].resize(grid.nodes());
    for (std::size_t j = 0; j < grid.nodes(); ++j) {
      const double tau = static_cast<double>(j) / static_cast<double>(grid.intervals);
      double s = coeff[a][0];
      for (std::size_t k = 1; k < count; ++k) {
        const double kk = static_cast<double>(k);
        s += coeff[a][k] * std::sin(std::numbers::pi * kk * tau + phase[a][k]) / (kk * kk);
      }
      v[a][j] = s;
    }
  }
  return PhasePath(grid, std::move(v[0]), std::move(v[1]));
}

double k_total_derivative_residual(const HamiltonianModel& model,
                                   const PhasePath& path) {
  const std::size_t n = path.intervals();
  if (n < 4) {
    throw Error(ErrorCode::invalid_argument,
                "total-derivative residual needs N >= 4");
  }
  const double h = path.grid().step();
  const auto& p = path.p();
  const auto& q = path.q();
  const auto pdot = sampled_derivative(p, h);
  const auto qdot = sampled_derivative(q, h);
  std::vector<double> k(p.size());
  for (std::size_t j = 0; j <= n; ++j) k[j] = -q[j] * pdot[j] - model(p[j], q[j]);
  double worst = 0.0;
  for (std::size_t j = 2; j + 2 <= n; ++j) {
    const double kdot = (k[j + 1] - k[j - 1]) / (2.0 * h);
    const double pddot = (p[j + 1] - 2.0 * p[j] + p[j - 1]) / (h * h);
    worst = std::max(worst, std::abs(kdot + q[j] * pddot + qdot[j] * pdot[j]));
  }
  return worst;
}

void SurfaceGrid::validate() const {
  if (endpoint_count < 1 || t_count < 1) {
    throw Error(ErrorCode::invalid_argument, "surface grid needs >= 1 node per axis");
  }
  if (endpoint_max < endpoint_min || t_max < t_min) {
    throw Error(ErrorCode::invalid_argument, "surface grid bounds out of order");
  }
  if (!(delta > 0.0) || !(t_min - delta > 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "surface grid needs delta > 0 and t_min > delta");
  }
  if (intervals < 2) {
    throw Error(ErrorCode::invalid_argument, "surface grid needs >= 2 intervals");
  }
}

double SurfaceGrid::endpoint(std::size_t i) const {
  if (endpoint_count == 1) return endpoint_min;
  return endpoint_min + (endpoint_max - endpoint_min) * static_cast<double>(i) /
                            static_cast<double>(endpoint_count - 1);
}

double SurfaceGrid::time(std::size_t j) const {
  if (t_count == 1) return t_min;
  return t_min +
         (t_max - t_min) * static_cast<double>(j) / static_cast<double>(t_count - 1);
}

double HjField::max_abs_residual() const {
  double m = 0.0;
  for (const auto& n : nodes) {
    if (!n.flagged) m = std::max(m, std::abs(n.residual));
  }
  return m;
}

double HjField::max_abs_companion() const {
  double m = 0.0;
  for (const auto& n : nodes) {
    if (!n.flagged && n.companion_available) m = std::max(m, std::abs(n.companion));
  }
  return m;
}

std::size_t HjField::flagged_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const HjNode& n) { return n.flagged; }));
}

namespace {

struct SurfaceSample {
  double value = 0.0;
  double far_p = 0.0;
  double far_q = 0.0;
};

TimeGrid node_grid(double t, std::size_t intervals) {
  return TimeGrid{0.0, t, intervals};
}

std::optional<SurfaceSample> sample_s(const HamiltonianModel& model, double q_i,
                                      double q_f, double t, std::size_t n,
                                      Degeneracy* flag) {
  const auto rep = solve_position_bvp(
      model, {BoundaryKind::position, q_i, q_f}, node_grid(t, n));
  if (flag) *flag = rep.flag;
  if (rep.flag != Degeneracy::unique) return std::nullopt;
  return SurfaceSample{action_s(model, rep.path).value, rep.path.p().back(),
                       rep.path.q().back()};
}

std::optional<SurfaceSample> sample_r(const HamiltonianModel& model, double p_i,
                                      double p_f, double t, std::size_t n,
                                      Degeneracy* flag) {
  const auto rep = solve_momentum_bvp(
      model, {BoundaryKind::momentum, p_i, p_f}, node_grid(t, n));
  if (flag) *flag = rep.flag;
  if (!rep.solved()) return std::nullopt;
  return SurfaceSample{action_r(model, rep.path).value, rep.path.p().back(),
                       rep.path.q().back()};
}

}  // namespace

HjField hj_residual_s(const HamiltonianModel& model, double q_i,
                      const SurfaceGrid& grid) {
  grid.validate();
  HjField field;
  const double d = grid.delta;
  const std::size_t n = grid.intervals;
  for (std::size_t j = 0; j < grid.t_count; ++j) {
    for (std::size_t i = 0; i < grid.endpoint_count; ++i) {
      HjNode node;
      node.endpoint = grid.endpoint(i);
      node.t = grid.time(j);
      const double qf = node.endpoint;
      const double t = node.t;
      const auto c = sample_s(model, q_i, qf, t, n, &node.flag);
      Degeneracy side = Degeneracy::unique;
      const auto qp = sample_s(model, q_i, qf + d, t, n, &side);
      const auto qm = sample_s(model, q_i, qf - d, t, n, &side);
      const auto tp = sample_s(model, q_i, qf, t + d, n, &side);
      const auto tm = sample_s(model, q_i, qf, t - d, n, &side);
      if (!c || !qp || !qm || !tp || !tm) {
        node.flagged = true;
        if (node.flag == Degeneracy::unique) node.flag = side;
        field.nodes.push_back(node);
        continue;
      }
      const double dsdq = (qp->value - qm->value) / (2.0 * d);
      const double dsdt = (tp->value - tm->value) / (2.0 * d);
      node.residual = model(dsdq, qf) + dsdt;
      node.companion = dsdq - c->far_p;
      field.nodes.push_back(node);
    }
  }
  return field;
}

HjField hj_residual_r(const HamiltonianModel& model, double p_i,
                      const SurfaceGrid& grid) {
  grid.validate();
  HjField field;
  const double d = grid.delta;
  const std::size_t n = grid.intervals;
  for (std::size_t j = 0; j < grid.t_count; ++j) {
    for (std::size_t i = 0; i < grid.endpoint_count; ++i) {
      HjNode node;
      node.endpoint = grid.endpoint(i);
      node.t = grid.time(j);
      const double pf = node.endpoint;
      const double t = node.t;
      const auto c = sample_r(model, p_i, pf, t, n, &node.flag);
      Degeneracy side = Degeneracy::unique;
      const auto tp = sample_r(model, p_i, pf, t + d, n, &side);
      const auto tm = sample_r(model, p_i, pf, t - d, n, &side);
      if (!c || !tp || !tm) {
        node.flagged = true;
        if (node.flag == Degeneracy::unique) node.flag = side;
        field.nodes.push_back(node);
        continue;
      }
      const double drdt = (tp->value - tm->value) / (2.0 * d);
      const auto pp = sample_r(model, p_i, pf + d, t, n, nullptr);
      const auto pm = sample_r(model, p_i, pf - d, t, n, nullptr);
      double position = c->far_q;
      if (pp && pm) {
        const double drdp = (pp->value - pm->value) / (2.0 * d);
        position = -drdp;
        node.companion = drdp + c->far_q;
      } else {
        node.companion_available = false;
      }
      node.residual = model(pf, position) + drdt;
      field.nodes.push_back(node);
    }
  }
  return field;
}

void write_csv(std::ostream& out, const HjField& field,
               const std::string& endpoint_name) {
  out << endpoint_name << ",t,residual,companion,flag\n";
  for (const auto& n : field.nodes) {
    out << n.endpoint << ',' << n.t << ',';
    if (n.flagged) {
      out << ",,";
    } else {
      out << n.residual << ',';
      if (n.companion_available) out << n.companion;
      out << ',';
    }
    out << to_string(n.flag) << '\n';
  }
}

}  // namespace dualaction
