#include "thermoplate/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "thermoplate/attractor.hpp"
#include "thermoplate/dynamics.hpp"
#include "thermoplate/energy.hpp"
#include "thermoplate/error.hpp"
#include "thermoplate/io.hpp"
#include "thermoplate/lyapunov_checks.hpp"
#include "thermoplate/operators.hpp"

namespace thermoplate {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

class Report {
 public:
  Report(std::string command, const ExperimentConfig& config) : start_(Clock::now()) {
    doc_["schema_version"] = kReportSchemaVersion;
    doc_["command"] = std::move(command);
    doc_["config"] = serialize_config(config);
    doc_["checks"] = json::array();
  }

  void check(const std::string& name, bool pass, json detail = json::object()) {
    detail["name"] = name;
    detail["pass"] = pass;
    doc_["checks"].push_back(std::move(detail));
    if (!pass) all_pass_ = false;
  }

  json& operator[](const std::string& key) { return doc_[key]; }
  bool all_pass() const noexcept { return all_pass_; }

  std::string finish() {
    doc_["all_pass"] = all_pass_;
    doc_["timing_seconds"] = std::chrono::duration<double>(Clock::now() - start_).count();
    return doc_.dump(2) + "\n";
  }

 private:
  json doc_;
  bool all_pass_ = true;
  Clock::time_point start_;
};

std::string prepare(ExperimentConfig& config, const RunOptions& options) {
  if (options.seed) {
    config.initial.seed = *options.seed;
    config.attractor.seed = *options.seed;
  }
  if (!options.format.empty()) {
    if (options.format != "csv" && options.format != "json") {
      throw Error(ErrorKind::config, "--format: expected csv or json");
    }
    config.output.format = options.format;
  }
  const std::string dir = options.output_dir.empty() ? config.output.dir : options.output_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create output directory '" + dir + "': " + ec.message());
  return dir;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

State initial_state(const ExperimentConfig& c, const BoxDomain& domain) {
  if (c.initial.kind == ExperimentConfig::Initial::Kind::zero) return State(domain, c.integrator.tau);
  State s = sample_ball(domain, c.initial.radius, 1, c.initial.seed).members.front();
  s.time = c.integrator.tau;
  return s;
}

json constants_json(const LyapunovConfig& c) {
  return json{{"delta1", c.delta1},   {"delta2", c.delta2}, {"M", c.M},         {"M1", c.M1},
              {"M2", c.M2},           {"nu", c.nu},         {"mu1", c.mu1},     {"c0", c.c0},
              {"C_eta", c.c_eta},     {"C_kappa", c.c_kappa}, {"C_tilde0", c.c_tilde0},
              {"C_bar1", c.c_bar1},   {"C_bar2", c.c_bar2}, {"C_nu", c.c_nu},   {"epsilon", c.epsilon},
              {"C1", c.C1},           {"C_eps", c.c_eps},   {"C1_prime", c.c_eps_prime},
              {"beta1", c.beta1},     {"beta2", c.beta2},   {"beta3", c.beta3}, {"beta4", c.beta4},
              {"omega_bar", c.omega_bar}, {"sigma1", c.sigma1}, {"sigma2", c.sigma2},
              {"radius", c.radius},   {"s_max", c.s_max}};
}

std::optional<LyapunovConfig> try_constants(const ExperimentConfig& c, const BoxDomain& domain,
                                            std::string& why) {
  try {
    return choose_constants(c.physics, c.nonlinearity.f, domain, c.nonlinearity.radius,
                            c.lyapunov.delta2);
  } catch (const Error& e) {
    why = e.what();
    return std::nullopt;
  }
}

std::vector<double> unique_mu(const BoxDomain& domain) {
  std::set<double> s(domain.mu().begin(), domain.mu().end());
  return {s.begin(), s.end()};
}

double slowest_rate(const PhysicalParams& p, double a, const std::vector<double>& mus) {
  double rate = std::numeric_limits<double>::infinity();
  for (double mu : mus) {
    const Eigen::EigenSolver<Mat3> es(build_matrix(OperatorKind::generator_G, p.eta, p.kappa, a, mu));
    rate = std::min(rate, -es.eigenvalues().real().maxCoeff());
  }
  return rate;
}

void operator_checks(Report& rep, const ExperimentConfig& c, const BoxDomain& domain) {
  const PhysicalParams& p = c.physics;
  bool declared_ok = true;
  try {
    check_params(p);
  } catch (const Error& e) {
    rep.check("operators.params", false, {{"detail", e.what()}});
    declared_ok = false;
  }
  if (!declared_ok) return;

  const auto mus = unique_mu(domain);
  const double t0 = c.integrator.tau;
  const std::vector<double> times{t0, t0 + 0.5, t0 + 1.0, t0 + 2.0, t0 + 5.0, t0 + 10.0};
  double inv = 0, det_rel = 0, max_re = -std::numeric_limits<double>::infinity(), trace_err = 0;
  for (double t : times) {
    for (double mu : mus) {
      inv = std::max(inv, check_inverse(p, t, mu));
      const double det = determinant(build(OperatorKind::paper_A, p, t, mu));
      const double expect = p.eta * p.kappa * mu * mu * mu;
      det_rel = std::max(det_rel, std::abs(det - expect) / expect);
      const Mat3 g = build(OperatorKind::generator_G, p, t, mu).entries;
      const Eigen::EigenSolver<Mat3> es(g);
      max_re = std::max(max_re, es.eigenvalues().real().maxCoeff());
      trace_err = std::max(trace_err, std::abs(g.trace() + p.kappa * mu));
    }
  }
  rep.check("operators.inverse", inv <= 1e-12, {{"max_residual", inv}});
  rep.check("operators.determinant", det_rel <= 1e-12, {{"max_relative_error", det_rel}});
  rep.check("operators.generator_stable", max_re < 0, {{"max_real_eigenvalue", max_re}});
  rep.check("operators.generator_trace", trace_err == 0, {{"max_error", trace_err}});

  json sups = json::array();
  bool singular = false, finite = true;
  for (double t : {t0, t0 + 1.0, t0 + 10.0}) {
    const ResolventReport r = standard_resolvent_bound(p, t, domain.lambda1());
    singular = singular || !r.singular.empty();
    finite = finite && std::isfinite(r.sup);
    sups.push_back({{"t", t}, {"sup", r.sup}, {"argmax_mu", r.argmax_mu}});
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (const auto& s : sups) {
    lo = std::min(lo, s["sup"].get<double>());
    hi = std::max(hi, s["sup"].get<double>());
  }
  rep.check("operators.resolvent_bound", finite && !singular,
            {{"samples", sups}, {"constant", hi}, {"relative_variation", (hi - lo) / hi}});

  std::string hoelder_fail;
  double worst_gap_ratio = 0;
  for (int i = 0; i <= 20 && hoelder_fail.empty(); ++i) {
    for (int j = i + 1; j <= 20; ++j) {
      const double t = t0 + 0.5 * i, s = t0 + 0.5 * j;
      try {
        const double gap = hoelder_gap(p, t, s);
        const double bound = p.a.hoelder_c * std::pow(s - t, p.a.hoelder_beta);
        if (bound > 0) worst_gap_ratio = std::max(worst_gap_ratio, gap / bound);
      } catch (const Error& e) {
        hoelder_fail = e.what();
        break;
      }
    }
  }
  json hd{{"max_gap_over_bound", worst_gap_ratio}};
  if (!hoelder_fail.empty()) hd["detail"] = hoelder_fail;
  rep.check("operators.hoelder_gap", hoelder_fail.empty(), hd);
}

}  // namespace

CommandResult cmd_simulate(ExperimentConfig config, const RunOptions& options) {
  const std::string dir = prepare(config, options);
  check_admissibility(config);
  Report rep("simulate", config);
  const BoxDomain domain = config.make_domain();

  std::string why;
  std::optional<LyapunovConfig> constants;
  if (config.physics.eta <= 2) constants = try_constants(config, domain, why);
  else why = "eta > 2: no Lyapunov constants";
  if (constants) rep["lyapunov_constants"] = constants_json(*constants);
  else rep["lyapunov_constants_unavailable"] = why;

  EvolutionConfig ec;
  ec.dt = config.integrator.dt;
  ec.record_stride = config.integrator.record_stride;
  ec.keep_snapshots = config.output.snapshots;
  const State w0 = initial_state(config, domain);
  const TrajectoryRecord tr = evolve(w0, config.physics, config.nonlinearity.f, config.integrator.tau,
                                     config.integrator.t_final, ec, constants ? &*constants : nullptr);

  if (config.output.format == "json") {
    write_file(join(dir, "trajectory.json"), trajectory_json(tr));
  } else {
    std::ostringstream csv;
    write_trajectory_csv(csv, tr);
    write_file(join(dir, "trajectory.csv"), csv.str());
  }
  if (config.output.svg) {
    std::vector<double> E;
    for (const auto& e : tr.energies) E.push_back(e.E);
    write_file(join(dir, "energy.svg"), svg_line_chart("Energy", "t", "E", tr.times, E));
  }
  if (config.output.snapshots) {
    const State& last = tr.snapshots.back();
    write_file(join(dir, "final.tplt"), encode_snapshot({last}, last.time));
  }
  rep["samples"] = tr.times.size();
  rep["final_y_norm"] = tr.y_norms.back();
  CommandResult out;
  out.output_dir = dir;
  out.report = rep.finish();
  write_file(join(dir, "report.json"), out.report);
  return out;
}

CommandResult cmd_verify(ExperimentConfig config, const RunOptions& options) {
  const std::string dir = prepare(config, options);
  Report rep("verify", config);
  const BoxDomain domain = config.make_domain();
  const PhysicalParams& p = config.physics;
  const NonlinearitySpec& f = config.nonlinearity.f;

  {
    const auto& a = p.a;
    double span = std::max(config.integrator.t_final - config.integrator.tau, 10.0);
    if (a.shape.kind == Modulation::Kind::sinusoidal && a.shape.frequency != 0) {
      span = std::max(span, 2 * std::numbers::pi / std::abs(a.shape.frequency));
    }
    const double step = std::max(0.01, span / 3000.0);
    const CoefficientReport r = validate_a(a, config.integrator.tau, config.integrator.tau + span, step);
    json w = json::array();
    for (const auto& v : r.violations) w.push_back({{"t", v.t}, {"s", v.s}, {"value", v.value}, {"what", v.what}});
    rep.check("coefficients.validate_a", r.pass,
              {{"a0_emp", r.a0_emp}, {"a1_emp", r.a1_emp}, {"C_emp", r.c_emp}, {"violations", w}});
  }
  try {
    const double margin = dissipativity_margin(f, domain.lambda1());
    rep.check("nonlinearity.dissipativity", true, {{"margin", margin}});
  } catch (const Error& e) {
    rep.check("nonlinearity.dissipativity", false, {{"detail", e.what()}});
  }
  {
    double worst = 0;
    for (double t : {0.0, 0.7, 2.0}) {
      for (int i = 0; i <= 400; ++i) {
        const double s = -10.0 + 0.05 * i, h = 1e-5;
        const double d = (f.antiderivative(t, s + h) - f.antiderivative(t, s - h)) / (2 * h);
        worst = std::max(worst, std::abs(d - f.f(t, s)));
      }
    }
    rep.check("nonlinearity.antiderivative", worst <= 1e-6, {{"max_error", worst}});
  }
  if (f.kind() == NonlinearitySpec::Kind::soft_cubic && config.domain.dimension != 2) {
    rep.check("nonlinearity.dimension", false, {{"detail", "soft_cubic is admitted only for dimension 2"}});
  }

  operator_checks(rep, config, domain);

  std::optional<LyapunovConfig> constants;
  try {
    constants = choose_constants(p, f, domain, config.nonlinearity.radius, config.lyapunov.delta2);
    json inv = json::array();
    for (const auto& c : check_invariants(*constants)) {
      inv.push_back({{"name", c.name}, {"value", c.value}, {"pass", c.pass}});
    }
    rep.check("lyapunov.constants", true, {{"invariants", inv}});
    rep["lyapunov_constants"] = constants_json(*constants);
  } catch (const Error& e) {
    rep.check("lyapunov.constants", false, {{"kind", to_string(e.kind())}, {"detail", e.what()}});
  }

  if (rep.all_pass()) {
    EvolutionConfig ec;
    ec.dt = config.integrator.dt;
    ec.record_stride = 1;
    const State w0 = initial_state(config, domain);
    const TrajectoryRecord tr = evolve(w0, p, f, config.integrator.tau, config.integrator.t_final, ec,
                                       &*constants);
    if (f.is_zero()) {
      double worst = 0;
      const double slack = 1e-12 * std::abs(tr.energies.front().E);
      for (std::size_t i = 1; i < tr.energies.size(); ++i) {
        worst = std::max(worst, tr.energies[i].E - tr.energies[i - 1].E);
      }
      rep.check("energy.monotone", worst <= slack, {{"max_increase", worst}, {"slack", slack}});
    }
    const DecayInequalityReport d = verify_decay_inequality(tr, *constants);
    json dd{{"violations", d.violations}, {"worst_margin", finite_or_null(d.worst_margin)},
            {"max_violation", d.max_violation}, {"c_fd", d.c_fd}, {"tolerance", d.tolerance},
            {"max_plate_norm", d.max_plate_norm}};
    if (!d.applicable) dd["inapplicable"] = d.reason;
    rep.check("lyapunov.decay_inequality", d.applicable && d.violations == 0, dd);

    const EquivalenceReport eq = verify_equivalence(tr, *constants);
    rep.check("lyapunov.equivalence_trajectory", eq.violations == 0,
              {{"worst_lower", eq.worst_lower}, {"worst_upper", eq.worst_upper}, {"checked", eq.checked}});

    const EnsembleSet states = sample_ball(domain, config.nonlinearity.radius, 1000, config.initial.seed + 1);
    const EquivalenceReport eqs = verify_equivalence(states.members, p, f, *constants);
    rep.check("lyapunov.equivalence_states", eqs.violations == 0,
              {{"worst_lower", eqs.worst_lower}, {"worst_upper", eqs.worst_upper}, {"checked", eqs.checked}});

    double worst_lb = std::numeric_limits<double>::infinity();
    for (const auto& s : states.members) {
      worst_lb = std::min(worst_lb, energy_lower_bound_slack(s, p, f, *constants));
    }
    rep.check("energy.lower_bound", worst_lb >= -1e-12, {{"worst_slack", worst_lb}});

    const EnvelopeReport env = decay_envelope_check(tr, *constants);
    rep.check("lyapunov.envelope", env.violations == 0,
              {{"gamma1", env.gamma1}, {"gamma2", env.gamma2}, {"omega_bar", env.omega_bar},
               {"worst_ratio", env.worst_ratio}});
  }

  CommandResult out;
  out.output_dir = dir;
  out.code = rep.all_pass() ? ExitCode::ok : ExitCode::verification;
  out.report = rep.finish();
  write_file(join(dir, "report.json"), out.report);
  return out;
}

CommandResult cmd_attractor(ExperimentConfig config, const RunOptions& options) {
  const std::string dir = prepare(config, options);
  check_admissibility(config);
  Report rep("attractor", config);
  const BoxDomain domain = config.make_domain();

  PullbackRun run;
  run.target_time = config.attractor.target_time;
  run.schedule = config.attractor.schedule;
  run.radius = config.attractor.radius;
  run.members = config.attractor.members;
  run.seed = config.attractor.seed;
  run.tol = config.attractor.tol;
  run.dt = config.attractor.dt;
  const PullbackResult res = pullback_iterate(run, domain, config.physics, config.nonlinearity.f,
                                              std::max(1u, options.threads));

  std::ostringstream table;
  json rows = json::array();
  table << "n,horizon,tau,d_n,radius,tail_fraction\n";
  std::vector<double> hs, ds;
  for (std::size_t n = 0; n < res.levels.size(); ++n) {
    const auto& l = res.levels[n];
    table << n << ',' << csv_number(l.horizon) << ',' << csv_number(l.tau) << ',' << csv_number(l.d)
          << ',' << csv_number(l.radius) << ',' << csv_number(l.tail) << '\n';
    rows.push_back({n, l.horizon, l.tau, finite_or_null(l.d), l.radius, l.tail});
    if (std::isfinite(l.d)) {
      hs.push_back(l.horizon);
      ds.push_back(l.d);
    }
  }
  if (config.output.format == "json") {
    write_file(join(dir, "pullback.json"),
               json{{"columns", {"n", "horizon", "tau", "d_n", "radius", "tail_fraction"}}, {"rows", rows}}
                       .dump(1) + "\n");
  } else {
    write_file(join(dir, "pullback.csv"), table.str());
  }
  const auto& final_cloud = res.levels.back().cloud;
  write_file(join(dir, "attractor.tplt"), encode_snapshot(final_cloud.members, run.target_time));
  if (config.output.snapshots) {
    for (std::size_t n = 0; n < res.levels.size(); ++n) {
      write_file(join(dir, "cloud_" + std::to_string(n) + ".tplt"),
                 encode_snapshot(res.levels[n].cloud.members, run.target_time));
    }
  }
  if (config.output.svg) {
    write_file(join(dir, "pullback.svg"), svg_line_chart("Pullback convergence", "T_n", "d_n", hs, ds, true));
  }

  std::string why;
  const auto constants = config.physics.eta <= 2 ? try_constants(config, domain, why) : std::nullopt;
  if (constants) {
    const double radius = absorbing_radius(*constants);
    std::size_t outside = 0;
    for (const auto& s : final_cloud.members) {
      if (y_norm(s) > radius) ++outside;
    }
    rep["absorbing_radius"] = radius;
    rep["members_outside_absorbing_ball"] = outside;
    rep["lyapunov_constants"] = constants_json(*constants);
  } else {
    rep["absorbing_radius_unavailable"] = why.empty() ? "eta > 2" : why;
  }
  rep["converged"] = res.converged;
  rep["levels"] = res.levels.size();
  rep["final_d"] = finite_or_null(res.levels.back().d);
  rep["final_radius"] = res.levels.back().radius;
  rep["final_tail_fraction"] = res.levels.back().tail;

  CommandResult out;
  out.output_dir = dir;
  out.report = rep.finish();
  write_file(join(dir, "report.json"), out.report);
  return out;
}

CommandResult cmd_decay_fit(ExperimentConfig config, const RunOptions& options) {
  const std::string dir = prepare(config, options);
  check_admissibility(config);
  Report rep("decay-fit", config);
  const BoxDomain domain = config.make_domain();
  const double tau = config.integrator.tau;

  const EnsembleSet ball = sample_ball(domain, config.initial.radius > 0 ? config.initial.radius : 1.0,
                                       config.attractor.members, config.initial.seed);
  EvolutionConfig ec;
  ec.dt = config.integrator.dt;
  ec.record_stride = config.integrator.record_stride;
  std::vector<TrajectoryRecord> runs;
  for (const auto& m : ball.members) {
    runs.push_back(evolve(m, config.physics, NonlinearitySpec::zero(), tau, config.integrator.t_final, ec));
  }
  const DecayFit fit = decay_fit(runs, tau, 0.0, config.integrator.t_final - tau);

  const auto mus = unique_mu(domain);
  const double r0 = slowest_rate(config.physics, config.physics.a.a0, mus);
  const double r1 = slowest_rate(config.physics, config.physics.a.a1, mus);
  rep.check("decay_fit.alpha_positive", fit.alpha > 0, {{"alpha", fit.alpha}});
  rep["K"] = fit.K;
  rep["alpha"] = fit.alpha;
  rep["K_ls"] = fit.K_ls;
  rep["samples"] = fit.samples;
  rep["slowest_mode_rate"] = {{"at_a0", r0}, {"at_a1", r1}};

  std::ostringstream csv;
  csv << "K,alpha,K_ls,samples,slowest_rate_a0,slowest_rate_a1\n"
      << csv_number(fit.K) << ',' << csv_number(fit.alpha) << ',' << csv_number(fit.K_ls) << ','
      << fit.samples << ',' << csv_number(r0) << ',' << csv_number(r1) << '\n';
  if (config.output.format == "json") {
    write_file(join(dir, "decay_fit.json"),
               json{{"K", fit.K}, {"alpha", fit.alpha}, {"K_ls", fit.K_ls}, {"samples", fit.samples},
                    {"slowest_rate_a0", r0}, {"slowest_rate_a1", r1}}.dump(1) + "\n");
  } else {
    write_file(join(dir, "decay_fit.csv"), csv.str());
  }

  CommandResult out;
  out.output_dir = dir;
  out.code = rep.all_pass() ? ExitCode::ok : ExitCode::verification;
  out.report = rep.finish();
  write_file(join(dir, "report.json"), out.report);
  return out;
}

CommandResult cmd_operator_check(ExperimentConfig config, const RunOptions& options) {
  const std::string dir = prepare(config, options);
  Report rep("operator-check", config);
  operator_checks(rep, config, config.make_domain());
  CommandResult out;
  out.output_dir = dir;
  out.code = rep.all_pass() ? ExitCode::ok : ExitCode::verification;
  out.report = rep.finish();
  write_file(join(dir, "report.json"), out.report);
  return out;
}

}  // namespace thermoplate
