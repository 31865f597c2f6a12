#include "cli/commands.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <optional>
#include <vector>

#include "CLI11.hpp"
#include "cli/ensemble.hpp"
#include "cli/json_output.hpp"
#include "spinsemi/errors.hpp"
#include "spinsemi/exact.hpp"
#include "spinsemi/field.hpp"
#include "spinsemi/semiclassical.hpp"

namespace spinsemi::cli {

namespace {

struct Tolerances {
  std::optional<double> rtol;
  std::optional<double> atol;

  IntegratorConfig config() const {
    IntegratorConfig cfg = default_config();
    if (rtol) cfg.rel_tol = *rtol;
    if (atol) cfg.abs_tol = *atol;
    cfg.validate();
    return cfg;
  }
};

struct PointOptions {
  std::string field;
  double t = 0.0;
  std::string from;
  std::string to;
  Tolerances tol;
};

void add_point_options(CLI::App* cmd, PointOptions& o) {
  cmd->add_option("--field", o.field, "const:bx,by,bz | lz:omega,gamma[,t_offset] | table:<csv> | fourier:<csv>")
      ->required();
  cmd->add_option("--t", o.t, "Horizon")->required();
  cmd->add_option("--from", o.from, "Initial point theta,phi")->required();
  cmd->add_option("--to", o.to, "Final point theta,phi")->required();
  cmd->add_option("--rtol", o.tol.rtol, "Relative tolerance");
  cmd->add_option("--atol", o.tol.atol, "Absolute tolerance");
}

Json angles_json(const SphereAngles& p) { return Json{{"theta", p.theta()}, {"phi", p.phi()}}; }

Json complex_json(cplx z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Json counters_json(const StepCounters& c) {
  return Json{{"accepted_steps", c.accepted}, {"rejected_steps", c.rejected}, {"rhs_evals", c.rhs_evals}};
}

Json point_inputs(const PointOptions& o, const SphereAngles& from, const SphereAngles& to) {
  return Json{{"field", o.field}, {"t", o.t}, {"from", angles_json(from)}, {"to", angles_json(to)}};
}

void check_horizon(double t) {
  if (!std::isfinite(t) || t < 0.0) throw ParameterError("--t must be finite and nonnegative");
}

int cmd_exact(const PointOptions& o, std::ostream& out) {
  const FieldSpec field = parse_field_spec(o.field);
  const SphereAngles from = parse_angles(o.from), to = parse_angles(o.to);
  check_horizon(o.t);
  const IntegratorConfig cfg = o.tol.config();
  const ExactResult r = integrate_ab_detailed(field, o.t, cfg);
  const cplx k = matrix_element(r.u, to, from);

  Json diag = counters_json(r.counters);
  diag["unitarity_defect"] = r.u.unitarity_defect();
  diag["rel_tol"] = cfg.rel_tol;
  diag["abs_tol"] = cfg.abs_tol;
  Json j{{"command", "exact"},
         {"inputs", point_inputs(o, from, to)},
         {"result", complex_json(k)},
         {"prob", std::norm(k)},
         {"diagnostics", diag}};
  out << render_json(j);
  return kExitOk;
}

int cmd_semiclassical(const PointOptions& o, const std::string& route, std::ostream& out) {
  const FieldSpec field = parse_field_spec(o.field);
  const SphereAngles from = parse_angles(o.from), to = parse_angles(o.to);
  check_horizon(o.t);
  const IntegratorConfig cfg = o.tol.config();
  const SemiclassicalResult r = route == "action" ? propagator_action_route_detailed(field, from, to, o.t, cfg)
                                                  : propagator_endpoint_route_detailed(field, from, to, o.t, cfg);

  Json inputs = point_inputs(o, from, to);
  inputs["route"] = route;
  Json diag = counters_json(r.counters);
  diag["branch_grid_points"] = r.branch_grid_points;
  diag["rotated"] = r.rotated;
  diag["rel_tol"] = cfg.rel_tol;
  diag["abs_tol"] = cfg.abs_tol;
  Json j{{"command", "semiclassical"},
         {"inputs", inputs},
         {"result", complex_json(r.value)},
         {"prob", std::norm(r.value)},
         {"diagnostics", diag}};
  out << render_json(j);
  return kExitOk;
}

struct VerifyOptions {
  int n = 100;
  std::uint64_t seed = 0;
  std::string family = "const";
  double tol = 1e-8;
  int threads = 0;
  Tolerances integ;
};

int cmd_verify(const VerifyOptions& o, std::ostream& out) {
  const Family family = parse_family(o.family);
  if (o.n < 1) throw ParameterError("--n must be at least 1");
  if (!(o.tol >= 0.0)) throw ParameterError("--tol must be nonnegative");
  const IntegratorConfig cfg = o.integ.config();
  const int threads = o.threads > 0 ? o.threads : static_cast<int>(std::thread::hardware_concurrency());

  const std::vector<EnsembleCase> cases = make_ensemble(family, o.n, o.seed);
  std::vector<CaseOutcome> results(cases.size());
  parallel_for(o.n, threads, [&](int i) { results[i] = evaluate_case(cases[i], cfg); });

  double max_err = 0.0, sum_err = 0.0, max_defect = 0.0;
  cplx worst;
  int passed = 0, case_errors = 0, evaluated = 0;
  long steps = 0;
  Json failures = Json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const CaseOutcome& r = results[i];
    if (r.failed) {
      ++case_errors;
      failures.push_back(Json{{"case", i}, {"message", r.failure}});
      continue;
    }
    ++evaluated;
    sum_err += r.error;
    steps += r.steps;
    max_defect = std::max(max_defect, r.unitarity_defect);
    if (r.error >= max_err) {
      max_err = r.error;
      worst = r.semiclassical - r.exact;
    }
    if (r.error <= o.tol) ++passed;
  }
  const bool pass = case_errors == 0 && passed == o.n;

  Json diag{{"max_error", max_err},
            {"mean_error", evaluated > 0 ? sum_err / evaluated : 0.0},
            {"pass", pass},
            {"tolerance", o.tol},
            {"cases", o.n},
            {"case_errors", case_errors},
            {"max_unitarity_defect", max_defect},
            {"accepted_steps", steps},
            {"rel_tol", cfg.rel_tol},
            {"abs_tol", cfg.abs_tol},
            {"failures", failures}};
  Json j{{"command", "verify"},
         {"inputs", Json{{"n", o.n}, {"seed", o.seed}, {"family", family_name(family)}, {"tol", o.tol}}},
         {"result", complex_json(worst)},
         {"prob", static_cast<double>(passed) / o.n},
         {"diagnostics", diag}};
  out << render_json(j);
  return pass ? kExitOk : kExitVerifyFailed;
}

struct SweepOptions {
  std::string family = "lz";
  std::string param = "omega";
  double start = 0.0, stop = 1.0;
  int steps = 11;
  std::string observable = "prob_up_down";
  double omega = 1.0, gamma = 1.0, window = 30.0;
  double bx = 0.0, by = 0.0, bz = 1.0, t = 1.0;
  std::string from = "0,0", to = "0,0";
  int threads = 0;
  Tolerances integ;
};

double observable_value(const std::string& obs, const FieldSpec& field, double horizon, const SphereAngles& from,
                        const SphereAngles& to, const IntegratorConfig& cfg) {
  const Su2Propagator u = integrate_ab(field, horizon, cfg);
  if (obs == "prob_up_up" || obs == "prob_up_down") {
    const Spinor psi = apply(u, Spinor{1.0, 0.0});
    return std::norm(obs == "prob_up_up" ? psi.up : psi.down);
  }
  if (obs == "element_re") return matrix_element(u, to, from).real();
  if (obs == "element_im") return matrix_element(u, to, from).imag();
  return nonadiabatic_probability(field, u, 0.0, horizon);
}

int cmd_sweep(const SweepOptions& o, std::ostream& out) {
  const bool lz = o.family == "lz";
  if (!lz && o.family != "const") throw ParseError("sweep family must be lz or const");
  const std::vector<std::string> lz_params{"omega", "gamma", "window"};
  const std::vector<std::string> const_params{"bx", "by", "bz", "t"};
  const auto& allowed = lz ? lz_params : const_params;
  if (std::find(allowed.begin(), allowed.end(), o.param) == allowed.end())
    throw ParseError("parameter '" + o.param + "' cannot be swept for family " + o.family);
  const std::vector<std::string> observables{"prob_up_up", "prob_up_down", "element_re", "element_im",
                                             "prob_nonadiabatic"};
  if (std::find(observables.begin(), observables.end(), o.observable) == observables.end())
    throw ParseError("unknown observable '" + o.observable + "'");
  if (o.steps < 1) throw ParameterError("--steps must be at least 1");
  if (!std::isfinite(o.start) || !std::isfinite(o.stop)) throw ParameterError("sweep range must be finite");
  const SphereAngles from = parse_angles(o.from), to = parse_angles(o.to);
  const IntegratorConfig cfg = o.integ.config();
  const int threads = o.threads > 0 ? o.threads : static_cast<int>(std::thread::hardware_concurrency());

  std::vector<double> params(o.steps), values(o.steps);
  std::vector<std::exception_ptr> errors(o.steps);
  for (int k = 0; k < o.steps; ++k)
    params[k] = o.steps == 1 ? o.start : o.start + k * (o.stop - o.start) / (o.steps - 1);

  parallel_for(o.steps, threads, [&](int k) {
    try {
      SweepOptions p = o;
      if (o.param == "omega") p.omega = params[k];
      if (o.param == "gamma") p.gamma = params[k];
      if (o.param == "window") p.window = params[k];
      if (o.param == "bx") p.bx = params[k];
      if (o.param == "by") p.by = params[k];
      if (o.param == "bz") p.bz = params[k];
      if (o.param == "t") p.t = params[k];
      double horizon = p.t;
      FieldSpec field;
      if (lz) {
        if (!(p.window >= 0.0)) throw ParameterError("window half-width must be nonnegative");
        field = LandauZenerField{p.omega, p.gamma, -p.window};
        horizon = 2.0 * p.window;
      } else {
        field = ConstantField{p.bx, p.by, p.bz};
      }
      check_horizon(horizon);
      values[k] = observable_value(o.observable, field, horizon, from, to, cfg);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  out << "param,value\n";
  for (int k = 0; k < o.steps; ++k) out << format_real(params[k]) << ',' << format_real(values[k]) << '\n';
  return kExitOk;
}

int cmd_traj(const PointOptions& o, int samples, std::ostream& out) {
  const FieldSpec field = parse_field_spec(o.field);
  const SphereAngles from = parse_angles(o.from), to = parse_angles(o.to);
  check_horizon(o.t);
  if (samples < 1) throw ParameterError("--samples must be at least 1");
  const ClassicalTrajectory traj = solve_trajectory(field, from, to, o.t, o.tol.config());

  out << "s,re_zeta,im_zeta,re_eta,im_eta\n";
  for (int k = 0; k < samples; ++k) {
    const double s = samples == 1 ? 0.0 : (k == samples - 1 ? o.t : o.t * k / (samples - 1));
    const StereoPair p = traj.at(s);
    out << format_real(s) << ',' << format_real(p.zeta.real()) << ',' << format_real(p.zeta.imag()) << ','
        << format_real(p.eta.real()) << ',' << format_real(p.eta.imag()) << '\n';
  }
  return kExitOk;
}

}  // namespace

SphereAngles parse_angles(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos)
    throw ParseError("angles must be given as theta,phi: '" + text + "'");
  return SphereAngles(parse_real(std::string_view(text).substr(0, comma)),
                      parse_real(std::string_view(text).substr(comma + 1)));
}

IntegratorConfig default_config() {
  IntegratorConfig cfg;
  if (const char* env = std::getenv("SPINSEMI_TOL"); env != nullptr && *env != '\0') {
    cfg.rel_tol = parse_real(env);
    cfg.validate();
  }
  return cfg;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spin-1/2 propagators: exact, semiclassical and closed-form"};
  app.require_subcommand(1);

  PointOptions exact_opt;
  auto* exact = app.add_subcommand("exact", "Matrix element <to|U(t)|from> by SU(2) integration");
  add_point_options(exact, exact_opt);

  PointOptions semi_opt;
  std::string route = "endpoint";
  auto* semi = app.add_subcommand("semiclassical", "Semiclassical coherent-state propagator");
  add_point_options(semi, semi_opt);
  semi->add_option("--route", route, "endpoint | action")->check(CLI::IsMember({"endpoint", "action"}));

  VerifyOptions ver_opt;
  auto* verify = app.add_subcommand("verify", "Random semiclassical-vs-exact comparisons");
  verify->add_option("--n", ver_opt.n, "Ensemble size");
  verify->add_option("--seed", ver_opt.seed, "64-bit seed");
  verify->add_option("--family", ver_opt.family, "const | fourier | table-random | lz");
  verify->add_option("--tol", ver_opt.tol, "Pass threshold on |K_semiclassical - K_exact|");
  verify->add_option("--threads", ver_opt.threads, "Worker threads (0: hardware)");
  verify->add_option("--rtol", ver_opt.integ.rtol, "Relative tolerance");
  verify->add_option("--atol", ver_opt.integ.atol, "Absolute tolerance");

  SweepOptions sw;
  auto* sweep = app.add_subcommand("sweep", "Observable against one field parameter, as CSV");
  sweep->add_option("--family", sw.family, "lz | const");
  sweep->add_option("--param", sw.param, "lz: omega | gamma | window; const: bx | by | bz | t")->required();
  sweep->add_option("--start", sw.start)->required();
  sweep->add_option("--stop", sw.stop)->required();
  sweep->add_option("--steps", sw.steps);
  sweep->add_option("--observable", sw.observable,
                    "prob_up_up | prob_up_down | element_re | element_im | prob_nonadiabatic");
  sweep->add_option("--omega", sw.omega);
  sweep->add_option("--gamma", sw.gamma);
  sweep->add_option("--window", sw.window, "Half-width T of the window [-T, T]");
  sweep->add_option("--bx", sw.bx);
  sweep->add_option("--by", sw.by);
  sweep->add_option("--bz", sw.bz);
  sweep->add_option("--t", sw.t);
  sweep->add_option("--from", sw.from, "theta,phi for element_*");
  sweep->add_option("--to", sw.to, "theta,phi for element_*");
  sweep->add_option("--threads", sw.threads, "Worker threads (0: hardware)");
  sweep->add_option("--rtol", sw.integ.rtol, "Relative tolerance");
  sweep->add_option("--atol", sw.integ.atol, "Absolute tolerance");

  PointOptions traj_opt;
  int samples = 101;
  auto* traj = app.add_subcommand("traj", "Classical (zeta, eta) trajectory as CSV");
  add_point_options(traj, traj_opt);
  traj->add_option("--samples", samples, "Equally spaced rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*exact) return cmd_exact(exact_opt, out);
    if (*semi) return cmd_semiclassical(semi_opt, route, out);
    if (*verify) return cmd_verify(ver_opt, out);
    if (*sweep) return cmd_sweep(sw, out);
    if (*traj) return cmd_traj(traj_opt, samples, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitInput;
}

}  // namespace spinsemi::cli
