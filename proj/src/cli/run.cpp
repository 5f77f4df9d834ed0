#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "dualaction/action.hpp"
#include "dualaction/bounds.hpp"
#include "dualaction/cli.hpp"
#include "dualaction/error.hpp"
#include "dualaction/extrema.hpp"
#include "dualaction/propagator.hpp"
#include "dualaction/spin.hpp"

namespace dualaction::cli {

using nlohmann::json;

namespace {

std::shared_ptr<spdlog::logger> logger() {
  static const auto log = [] {
    auto l = spdlog::get("dualaction");
    if (!l) l = spdlog::stderr_logger_st("dualaction");
    const char* level = std::getenv("DUALACTION_LOG");
    l->set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
    return l;
  }();
  return log;
}

struct ModelOptions {
  std::string hamiltonian = "free";
  double mass = 1.0;
  double omega = 1.0;
  double stiffness = 1.0;
  double force = 1.0;
  std::vector<double> potential_coeffs;
};

struct TimeOptions {
  double t0 = 0.0;
  double t1 = 1.0;
  std::size_t n = 1000;
};

struct Endpoints {
  double q_start = 0.0;
  double q_end = 1.0;
  double p_start = 1.0;
  std::optional<double> p_end;
};

struct Common {
  ModelOptions model;
  TimeOptions time;
  Endpoints ends;
  std::string format = "json";
  std::string out_path;
  std::uint64_t seed = 1;
};

void add_model_options(CLI::App* c, ModelOptions& m) {
  c->add_option("--hamiltonian", m.hamiltonian, "Model")
      ->check(CLI::IsMember({"free", "sho", "saddle-quadratic", "constant-force", "separable"}))
      ->capture_default_str();
  c->add_option("--mass", m.mass, "Mass")->capture_default_str();
  c->add_option("--omega", m.omega, "SHO angular frequency")->capture_default_str();
  c->add_option("--stiffness", m.stiffness, "Saddle stiffness k in -k q^2/2")
      ->capture_default_str();
  c->add_option("--force", m.force, "Constant force F in V = -F q")->capture_default_str();
  c->add_option("--potential-coeffs", m.potential_coeffs,
                "Separable potential coefficients c0,c1,... of sum c_k q^k")
      ->delimiter(',');
}

void add_time_options(CLI::App* c, TimeOptions& t, std::size_t default_n) {
  c->add_option("--t0", t.t0, "Initial time")->capture_default_str();
  c->add_option("--t1", t.t1, "Final time")->capture_default_str();
  c->add_option("--N", t.n, "Intervals (default " + std::to_string(default_n) + ")")
      ->check(CLI::PositiveNumber);
}

void add_output_options(CLI::App* c, Common& o) {
  c->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  c->add_option("--out", o.out_path, "Output path (default stdout)");
}

void add_endpoint_options(CLI::App* c, Endpoints& e) {
  c->add_option("--q-start", e.q_start, "Initial position")->capture_default_str();
  c->add_option("--q-end", e.q_end, "Final position")->capture_default_str();
  c->add_option("--p-start", e.p_start, "Initial momentum")->capture_default_str();
  c->add_option("--p-end", e.p_end, "Final momentum");
}

HamiltonianModel build_model(const ModelOptions& m) {
  if (m.hamiltonian == "free") return HamiltonianModel::free_particle(m.mass);
  if (m.hamiltonian == "sho") return HamiltonianModel::harmonic(m.mass, m.omega);
  if (m.hamiltonian == "saddle-quadratic") {
    return HamiltonianModel::saddle_quadratic(m.mass, m.stiffness);
  }
  if (m.hamiltonian == "constant-force") return HamiltonianModel::constant_force(m.mass, m.force);
  if (m.potential_coeffs.empty()) {
    throw Error(ErrorCode::invalid_argument, "separable model needs --potential-coeffs");
  }
  return HamiltonianModel::separable(m.mass, m.potential_coeffs);
}

json model_parameters(const ModelOptions& m) {
  json j{{"hamiltonian", m.hamiltonian}, {"mass", m.mass}};
  if (m.hamiltonian == "sho") j["omega"] = m.omega;
  if (m.hamiltonian == "saddle-quadratic") j["stiffness"] = m.stiffness;
  if (m.hamiltonian == "constant-force") j["force"] = m.force;
  if (m.hamiltonian == "separable") j["potential_coeffs"] = m.potential_coeffs;
  return j;
}

TimeGrid time_grid(const TimeOptions& t) { return TimeGrid{t.t0, t.t1, t.n}; }

json time_parameters(const TimeOptions& t) {
  return {{"t0", t.t0}, {"t1", t.t1}, {"N", t.n}};
}

json shooting_json(const ShootingReport& r) {
  return {{"free_parameter", r.free_parameter},
          {"residual", r.residual},
          {"flag", to_string(r.flag)},
          {"sensitivity", r.sensitivity},
          {"iterations", r.iterations}};
}

void shooting_tolerances(json& tol) {
  const ShootingOptions o;
  tol["shooting_tolerance"] = o.tolerance;
  tol["shooting_max_iterations"] = o.max_iterations;
  tol["sensitivity_floor"] = o.sensitivity_floor;
  tol["search_range"] = o.search_range;
}

ShootingReport require_solved(ShootingReport r, const char* what) {
  if (r.flag == Degeneracy::infeasible) {
    throw Error(ErrorCode::unsolvable, std::string(what) + " boundary problem is infeasible");
  }
  return r;
}

// Result of a command: JSON report body plus an optional CSV series.
struct Output {
  json report;
  std::string csv;
};

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

// ---------------------------------------------------------------- classify

struct ClassifyOptions {
  std::string which = "both";
};

Output run_classify(const Common& c, const ClassifyOptions& o) {
  const auto model = build_model(c.model);
  const auto shot = require_solved(
      solve_position_bvp(model, {BoundaryKind::position, c.ends.q_start, c.ends.q_end},
                         time_grid(c.time)),
      "position");
  Output out{make_report("classify"), "t,which,lambda1,lambda2\n"};
  auto& r = out.report;
  r["parameters"] = {{"model", model_parameters(c.model)},
                     {"time", time_parameters(c.time)},
                     {"q_start", c.ends.q_start},
                     {"q_end", c.ends.q_end},
                     {"which", o.which}};
  r["results"]["shooting"] = shooting_json(shot);
  std::vector<WhichAction> list;
  if (o.which != "R") list.push_back(WhichAction::S);
  if (o.which != "S") list.push_back(WhichAction::R);
  for (WhichAction w : list) {
    const auto rep = classify_extremum(model, shot.path, w);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& n : rep.nodes) {
      lo = std::min(lo, n.lambda1);
      hi = std::max(hi, n.lambda2);
      out.csv += fmt(n.t) + ',' + to_string(w) + ',' + fmt(n.lambda1) + ',' +
                 fmt(n.lambda2) + '\n';
    }
    r["summary"][to_string(w)] = to_string(rep.classification);
    r["results"][to_string(w)] = {{"classification", to_string(rep.classification)},
                                  {"zero_tolerance", rep.zero_tolerance},
                                  {"min_eigenvalue", lo},
                                  {"max_eigenvalue", hi},
                                  {"stationarity", rep.stationarity}};
  }
  r["tolerances"]["relative_zero_tolerance"] = kRelativeZeroTolerance;
  shooting_tolerances(r["tolerances"]);
  return out;
}

// ------------------------------------------------------------------ action

struct ActionOptions {
  std::string boundary = "position";
};

Output run_action(const Common& c, const ActionOptions& o) {
  const auto model = build_model(c.model);
  const auto grid = time_grid(c.time);
  const bool position = o.boundary == "position";
  ShootingReport shot =
      position
          ? solve_position_bvp(model, {BoundaryKind::position, c.ends.q_start, c.ends.q_end}, grid)
          : solve_momentum_bvp(model,
                               {BoundaryKind::momentum, c.ends.p_start,
                                c.ends.p_end.value_or(c.ends.p_start)},
                               grid);
  shot = require_solved(std::move(shot), position ? "position" : "momentum");
  const auto s = action_s(model, shot.path);
  const auto rv = action_r(model, shot.path);
  Output out{make_report("action"), "t,p,q\n"};
  auto& r = out.report;
  json params{{"model", model_parameters(c.model)},
              {"time", time_parameters(c.time)},
              {"boundary", o.boundary}};
  if (position) {
    params["q_start"] = c.ends.q_start;
    params["q_end"] = c.ends.q_end;
  } else {
    params["p_start"] = c.ends.p_start;
    params["p_end"] = c.ends.p_end.value_or(c.ends.p_start);
  }
  r["parameters"] = params;
  r["summary"] = {{"S", s.value}, {"R", rv.value}, {"flag", to_string(shot.flag)}};
  r["results"] = {{"shooting", shooting_json(shot)},
                  {"S", s.value},
                  {"R", rv.value},
                  {"quadrature", to_string(s.rule)},
                  {"legendre_residual", legendre_residual(model, shot.path)}};
  if (shot.path.intervals() >= 4) {
    r["results"]["k_total_derivative_residual"] = k_total_derivative_residual(model, shot.path);
  }
  for (std::size_t j = 0; j < shot.path.p().size(); ++j) {
    out.csv += fmt(grid.time(j)) + ',' + fmt(shot.path.p()[j]) + ',' + fmt(shot.path.q()[j]) + '\n';
  }
  shooting_tolerances(r["tolerances"]);
  return out;
}

// ------------------------------------------------------------------ bounds

struct BoundsOptions {
  std::string chain = "both";
  std::size_t samples = 1000;
  double epsilon = 0.2;
  int modes = 8;
};

json certificate_json(const BoundCertificate& c) {
  return {{"chain", to_string(c.chain)},
          {"samples", c.samples},
          {"violations", c.violations},
          {"worst_margin", c.worst_margin},
          {"critical", c.critical},
          {"N", c.intervals}};
}

Output run_bounds(const Common& c, const BoundsOptions& o) {
  const auto model = build_model(c.model);
  const auto grid = time_grid(c.time);
  Output out{make_report("bounds"), "chain,id,lower,critical,upper,slack,violated\n"};
  auto& r = out.report;
  json params{{"model", model_parameters(c.model)},
              {"time", time_parameters(c.time)},
              {"chain", o.chain},
              {"samples", o.samples},
              {"seed", c.seed},
              {"epsilon", o.epsilon},
              {"modes", o.modes},
              {"q_start", c.ends.q_start},
              {"q_end", c.ends.q_end}};
  const auto shot_s = require_solved(
      solve_position_bvp(model, {BoundaryKind::position, c.ends.q_start, c.ends.q_end}, grid),
      "position");
  std::vector<std::pair<BoundChain, ShootingReport>> jobs;
  if (o.chain != "R") jobs.emplace_back(BoundChain::S, shot_s);
  if (o.chain != "S") {
    // Without explicit momenta the R chain reuses the S-critical trajectory.
    const double ps = c.ends.p_end ? c.ends.p_start : shot_s.path.p().front();
    const double pe = c.ends.p_end ? *c.ends.p_end : shot_s.path.p().back();
    params["p_start"] = ps;
    params["p_end"] = pe;
    jobs.emplace_back(BoundChain::R,
                      require_solved(solve_momentum_bvp(
                                         model, {BoundaryKind::momentum, ps, pe}, grid),
                                     "momentum"));
  }
  r["parameters"] = params;
  std::size_t violations = 0;
  for (const auto& [chain, shot] : jobs) {
    PerturbationSpec spec;
    spec.amplitude = o.epsilon;
    spec.modes = o.modes;
    spec.seed = c.seed;
    spec.pinned = chain == BoundChain::S ? PinnedVariable::q : PinnedVariable::p;
    logger()->info("certifying {} chain on {} samples", to_string(chain), o.samples);
    const auto cert = certify_bounds(model, chain, shot, spec, o.samples);
    violations += cert.violations;
    r["results"][std::string(to_string(chain)) + "_chain"] = certificate_json(cert);
    for (const auto& s : cert.records) {
      out.csv += std::string(to_string(chain)) + ',' + std::to_string(s.id) + ',' +
                 fmt(s.lower) + ',' + fmt(s.critical) + ',' + fmt(s.upper) + ',' +
                 fmt(s.slack) + ',' + (s.violated ? "1" : "0") + '\n';
    }
  }
  r["summary"] = {{"violations", violations}, {"certified", violations == 0}};
  r["tolerances"]["bound_slack"] = kBoundSlack;
  shooting_tolerances(r["tolerances"]);
  return out;
}

// --------------------------------------------------------------- propagate

struct PropagateOptions {
  std::string rep = "position";
  std::size_t slices = 512;
  std::size_t sweep_count = 0;
  double sweep_min = -1.0;
  double sweep_max = 1.0;
};

json complex_json(Complex z) {
  return {{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}};
}

Output run_propagate(const Common& c, const PropagateOptions& o) {
  const auto model = build_model(c.model);
  const double t = c.time.t1 - c.time.t0;
  const bool position = o.rep == "position";
  const double start = position ? c.ends.q_start : c.ends.p_start;
  const double end = position ? c.ends.q_end : c.ends.p_end.value_or(c.ends.p_start);
  Output out{make_report("propagate"), "rep,initial,final,re,im\n"};
  auto& r = out.report;
  r["parameters"] = {{"model", model_parameters(c.model)},
                     {"t", t},
                     {"rep", o.rep},
                     {"slices", o.slices},
                     {"initial", start},
                     {"final", end},
                     {"sweep_count", o.sweep_count},
                     {"sweep_min", o.sweep_min},
                     {"sweep_max", o.sweep_max}};
  const bool delta = !position && c.model.hamiltonian == "free";
  const SliceScheme scheme{o.slices, position ? Representation::position
                                              : Representation::momentum};
  auto evaluate = [&](double final_value) {
    if (delta) return free_momentum_propagator(c.model.mass, start, final_value, t);
    return position ? sliced_position_propagator(model, start, final_value, t, scheme)
                    : sliced_momentum_propagator(model, start, final_value, t, scheme);
  };
  auto value_json = [&](const PropagatorValue& v) {
    if (v.variant == PropagatorValue::Variant::delta) {
      return json{{"variant", "delta"},
                  {"support_matched", v.support_matched},
                  {"causal", v.causal},
                  {"phase", complex_json(v.phase)}};
    }
    return json{{"variant", "regular"}, {"amplitude", complex_json(v.amplitude)}};
  };
  auto csv_row = [&](double final_value, const PropagatorValue& v) {
    const Complex z = v.variant == PropagatorValue::Variant::delta ? v.phase : v.amplitude;
    out.csv += o.rep + ',' + fmt(start) + ',' + fmt(final_value) + ',' + fmt(z.real()) + ',' +
               fmt(z.imag()) + '\n';
  };
  const auto v = evaluate(end);
  r["results"]["value"] = value_json(v);
  r["summary"] = value_json(v);
  if (o.sweep_count == 0) csv_row(end, v);
  if (o.sweep_count > 0) {
    json series = json::array();
    for (std::size_t k = 0; k < o.sweep_count; ++k) {
      const double x = o.sweep_count == 1
                           ? o.sweep_min
                           : o.sweep_min + (o.sweep_max - o.sweep_min) * static_cast<double>(k) /
                                               static_cast<double>(o.sweep_count - 1);
      const auto s = evaluate(x);
      json row = value_json(s);
      row["final"] = x;
      series.push_back(row);
      csv_row(x, s);
    }
    r["results"]["series"] = series;
  }
  r["tolerances"]["caustic_floor"] = 1e-9;
  return out;
}

// -------------------------------------------------------------------- spin

struct SpinOptions {
  std::string kind = "half";
  std::string policy = "unconstrained";
  double inertia = 1.0;
  double l = 1.0;
  double l0 = 0.5;
  int sign_i = 1;
  int sign_f = 1;
  double l_i = 0.0;
  double l_f = 0.0;
  bool closed_form = false;
};

Output run_spin(const Common& c, const SpinOptions& o) {
  const double t = c.time.t1 - c.time.t0;
  const auto policy = o.policy == "unconstrained" ? EndpointPolicy::unconstrained
                                                        : EndpointPolicy::endpoint_filtered;
  const auto amp =
      o.kind == "half"
          ? spin_half_propagator(o.inertia, o.l, o.sign_i, o.sign_f, t, c.time.n, policy,
                                 o.closed_form)
          : composite_spin_propagator(o.inertia, o.l0, o.l_i, o.l_f, t, c.time.n, policy,
                                      o.closed_form);
  Output out{make_report("spin"), "N,policy,re,im,path_count\n"};
  auto& r = out.report;
  json params{{"kind", o.kind}, {"policy", o.policy}, {"inertia", o.inertia},
              {"t", t},         {"N", c.time.n}};
  if (o.kind == "half") {
    params["l"] = o.l;
    params["sign_i"] = o.sign_i;
    params["sign_f"] = o.sign_f;
  } else {
    params["l0"] = o.l0;
    params["l_i"] = o.l_i;
    params["l_f"] = o.l_f;
  }
  r["parameters"] = params;
  r["summary"] = {{"abs", std::abs(amp.amplitude)},
                  {"method", amp.method == SpinMethod::enumeration ? "enumeration" : "closed-form"}};
  r["results"] = {{"amplitude", complex_json(amp.amplitude)},
                  {"admitted", amp.admitted},
                  {"path_count", amp.path_count}};
  out.csv += std::to_string(c.time.n) + ',' + o.policy + ',' + fmt(amp.amplitude.real()) + ',' +
             fmt(amp.amplitude.imag()) + ',' + fmt(amp.path_count) + '\n';
  r["tolerances"]["enumeration_cap"] = kEnumerationCap;
  return out;
}

// ---------------------------------------------------------------- hj-check

struct HjOptions {
  std::string action = "S";
  SurfaceGrid grid{0.5, 1.5, 11, 0.5, 1.5, 11, 200, 1e-3};
};

Output run_hj(const Common& c, const HjOptions& o) {
  const auto model = build_model(c.model);
  const bool s = o.action == "S";
  const double anchor = s ? c.ends.q_start : c.ends.p_start;
  const auto field = s ? hj_residual_s(model, anchor, o.grid) : hj_residual_r(model, anchor, o.grid);
  Output out{make_report("hj-check"), {}};
  std::ostringstream csv;
  csv << std::setprecision(17);
  write_csv(csv, field, s ? "q_f" : "p_f");
  out.csv = csv.str();
  auto& r = out.report;
  const auto& g = o.grid;
  r["parameters"] = {{"model", model_parameters(c.model)},
                     {"action", o.action},
                     {s ? "q_start" : "p_start", anchor},
                     {"endpoint_min", g.endpoint_min},
                     {"endpoint_max", g.endpoint_max},
                     {"endpoint_count", g.endpoint_count},
                     {"t_min", g.t_min},
                     {"t_max", g.t_max},
                     {"t_count", g.t_count},
                     {"N", g.intervals},
                     {"delta", g.delta}};
  r["summary"] = {{"max_abs_residual", field.max_abs_residual()},
                  {"max_abs_companion", field.max_abs_companion()},
                  {"flagged", field.flagged_count()},
                  {"nodes", field.nodes.size()}};
  json nodes = json::array();
  for (const auto& n : field.nodes) {
    json row{{"endpoint", n.endpoint}, {"t", n.t}, {"flag", to_string(n.flag)},
             {"flagged", n.flagged}};
    if (!n.flagged) {
      row["residual"] = n.residual;
      if (n.companion_available) row["companion"] = n.companion;
    }
    nodes.push_back(row);
  }
  r["results"]["nodes"] = nodes;
  r["tolerances"]["surface_delta"] = g.delta;
  shooting_tolerances(r["tolerances"]);
  return out;
}

// ---------------------------------------------------------- legendre-check

struct LegendreOptions {
  std::size_t paths = 100;
  double amplitude = 0.5;
  int modes = 4;
};

Output run_legendre(const Common& c, const LegendreOptions& o) {
  const auto model = build_model(c.model);
  const auto grid = time_grid(c.time);
  const TimeGrid fine{grid.t_start, grid.t_end, 2 * grid.intervals};
  Output out{make_report("legendre-check"), "seed,residual_N,residual_2N,ratio\n"};
  auto& r = out.report;
  r["parameters"] = {{"model", model_parameters(c.model)},
                     {"time", time_parameters(c.time)},
                     {"paths", o.paths},
                     {"seed", c.seed},
                     {"amplitude", o.amplitude},
                     {"modes", o.modes}};
  double worst = 0.0;
  double min_ratio = std::numeric_limits<double>::infinity();
  json rows = json::array();
  for (std::size_t k = 0; k < o.paths; ++k) {
    const std::uint64_t seed = c.seed + k;
    const double a = legendre_residual(model, smooth_random_path(grid, seed, o.amplitude, o.modes));
    const double b = legendre_residual(model, smooth_random_path(fine, seed, o.amplitude, o.modes));
    const double ratio = b != 0.0 ? std::abs(a / b) : std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::abs(a));
    min_ratio = std::min(min_ratio, ratio);
    rows.push_back({{"seed", seed}, {"residual_N", a}, {"residual_2N", b}, {"ratio", ratio}});
    out.csv += std::to_string(seed) + ',' + fmt(a) + ',' + fmt(b) + ',' + fmt(ratio) + '\n';
  }
  r["summary"] = {{"max_abs_residual", worst}, {"min_ratio", min_ratio}};
  r["results"]["paths"] = rows;
  return out;
}

int exit_code_for(ErrorCode code) { return is_precondition(code) ? 2 : 1; }

json error_report(const std::string& command, const std::string& code,
                  const std::string& message, std::optional<std::size_t> node, int exit_code) {
  json r = make_report(command);
  r["status"] = "error";
  r["exit_code"] = exit_code;
  r["error"] = {{"code", code}, {"message", message}};
  if (node) r["error"]["node"] = *node;
  return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Position and momentum action toolkit"};
  app.set_config("--config", "", "INI/TOML config; one [section] per command");
  app.require_subcommand(1);

  Common common;
  ClassifyOptions classify;
  ActionOptions action;
  BoundsOptions bounds;
  PropagateOptions propagate;
  SpinOptions spin;
  HjOptions hj;
  LegendreOptions legendre;

  std::map<std::string, std::function<Output()>> dispatch;
  // Subcommands share one option block, so per-command N defaults land after parsing.
  std::map<std::string, std::size_t> default_intervals;
  auto sub = [&](const std::string& name, const std::string& help, std::size_t default_n) {
    CLI::App* c = app.add_subcommand(name, help);
    c->configurable();
    add_model_options(c, common.model);
    add_time_options(c, common.time, default_n);
    default_intervals[name] = default_n;
    add_output_options(c, common);
    add_endpoint_options(c, common.ends);
    c->add_option("--seed", common.seed, "Random seed")->capture_default_str();
    return c;
  };

  auto* c_classify = sub("classify", "Classify the extremum along a critical path", 1000);
  c_classify->add_option("--which", classify.which)
      ->check(CLI::IsMember({"S", "R", "both"}))
      ->capture_default_str();
  dispatch["classify"] = [&] { return run_classify(common, classify); };

  auto* c_action = sub("action", "Solve a boundary problem and evaluate S and R", 1000);
  c_action->add_option("--boundary", action.boundary)
      ->check(CLI::IsMember({"position", "momentum"}))
      ->capture_default_str();
  dispatch["action"] = [&] { return run_action(common, action); };

  auto* c_bounds = sub("bounds", "Certify the bound chains on a saddle Hamiltonian", 2000);
  c_bounds->add_option("--chain", bounds.chain)
      ->check(CLI::IsMember({"S", "R", "both"}))
      ->capture_default_str();
  c_bounds->add_option("--samples", bounds.samples)->capture_default_str();
  c_bounds->add_option("--epsilon", bounds.epsilon, "Perturbation sup-norm")
      ->capture_default_str();
  c_bounds->add_option("--modes", bounds.modes)->check(CLI::Range(1, 8))->capture_default_str();
  dispatch["bounds"] = [&] { return run_bounds(common, bounds); };

  auto* c_prop = sub("propagate", "Time-sliced propagator for quadratic models", 512);
  c_prop->add_option("--rep", propagate.rep)
      ->check(CLI::IsMember({"position", "momentum"}))
      ->capture_default_str();
  c_prop->add_option("--slices", propagate.slices)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_prop->add_option("--sweep-count", propagate.sweep_count, "Final endpoints to sample")
      ->capture_default_str();
  c_prop->add_option("--sweep-min", propagate.sweep_min)->capture_default_str();
  c_prop->add_option("--sweep-max", propagate.sweep_max)->capture_default_str();
  dispatch["propagate"] = [&] { return run_propagate(common, propagate); };

  auto* c_spin = sub("spin", "Spin propagators by path enumeration", 4);
  c_spin->add_option("--kind", spin.kind)
      ->check(CLI::IsMember({"half", "composite"}))
      ->capture_default_str();
  c_spin->add_option("--policy", spin.policy)
      ->check(CLI::IsMember({"unconstrained", "endpoint-filtered"}))
      ->capture_default_str();
  c_spin->add_option("--inertia", spin.inertia)->capture_default_str();
  c_spin->add_option("--l", spin.l)->capture_default_str();
  c_spin->add_option("--l0", spin.l0)->capture_default_str();
  c_spin->add_option("--sign-i", spin.sign_i)->check(CLI::IsMember({-1, 1}))->capture_default_str();
  c_spin->add_option("--sign-f", spin.sign_f)->check(CLI::IsMember({-1, 1}))->capture_default_str();
  c_spin->add_option("--l-i", spin.l_i)->capture_default_str();
  c_spin->add_option("--l-f", spin.l_f)->capture_default_str();
  c_spin->add_flag("--closed-form", spin.closed_form, "Use the product form beyond the cap");
  dispatch["spin"] = [&] { return run_spin(common, spin); };

  auto* c_hj = sub("hj-check", "Hamilton-Jacobi residuals on an action surface", 200);
  c_hj->add_option("--action", hj.action)->check(CLI::IsMember({"S", "R"}))->capture_default_str();
  c_hj->add_option("--endpoint-min", hj.grid.endpoint_min)->capture_default_str();
  c_hj->add_option("--endpoint-max", hj.grid.endpoint_max)->capture_default_str();
  c_hj->add_option("--endpoint-count", hj.grid.endpoint_count)->capture_default_str();
  c_hj->add_option("--t-min", hj.grid.t_min)->capture_default_str();
  c_hj->add_option("--t-max", hj.grid.t_max)->capture_default_str();
  c_hj->add_option("--t-count", hj.grid.t_count)->capture_default_str();
  c_hj->add_option("--delta", hj.grid.delta, "Surface stencil half-width")->capture_default_str();
  dispatch["hj-check"] = [&] { return run_hj(common, hj); };

  auto* c_leg = sub("legendre-check", "Legendre residual on seeded smooth paths", 2000);
  c_leg->add_option("--paths", legendre.paths)->capture_default_str();
  c_leg->add_option("--amplitude", legendre.amplitude)->capture_default_str();
  c_leg->add_option("--modes", legendre.modes)->check(CLI::NonNegativeNumber)->capture_default_str();
  dispatch["legendre-check"] = [&] { return run_legendre(common, legendre); };

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    err << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    err << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  std::string command;
  for (const auto* s : app.get_subcommands()) {
    command = s->get_name();
    if (s->count("--N") == 0) common.time.n = default_intervals.at(command);
  }
  if (command == "hj-check") hj.grid.intervals = common.time.n;

  auto emit = [&](const std::string& text) {
    if (common.out_path.empty()) {
      out << text;
      return true;
    }
    std::ofstream file(common.out_path, std::ios::binary);
    file << text;
    if (!file) {
      err << "cannot write " << common.out_path << '\n';
      return false;
    }
    return true;
  };

  json report;
  std::string csv;
  int status = 0;
  try {
    logger()->debug("running {}", command);
    Output o = dispatch.at(command)();
    report = std::move(o.report);
    csv = std::move(o.csv);
  } catch (const Error& e) {
    status = exit_code_for(e.code());
    report = error_report(command, std::string(to_string(e.code())), e.what(), e.node(), status);
  } catch (const std::exception& e) {
    status = 1;
    report = error_report(command, "internal", e.what(), std::nullopt, status);
  }
  if (status != 0) logger()->error("{}: {}", command, report["error"]["message"].get<std::string>());

  if (common.format == "csv") {
    if (status != 0) {
      err << report["error"]["code"].get<std::string>() << ": "
          << report["error"]["message"].get<std::string>() << '\n';
      return status;
    }
    return emit(csv) ? 0 : 1;
  }
  if (!emit(report.dump(2) + "\n")) return 1;
  return status;
}

}  // namespace dualaction::cli
