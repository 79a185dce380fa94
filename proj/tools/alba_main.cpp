// Command-line front end: fluid integration, stochastic simulation,
// fixed-point solving, bundled scenarios and the eta feasibility search.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "alba/config.hpp"
#include "alba/csv.hpp"
#include "alba/version.hpp"

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace alba;

/// Distinguishes a scenario whose checks failed (exit 3) from other errors.
struct ScenarioFailure : Error {
  using Error::Error;
};

json state_json(const FluidState& s) {
  json j;
  j["x00"] = s.x00();
  j["x01"] = s.x01();
  json warm = json::array();
  for (int i = 0; i <= s.top(); ++i) warm.push_back(s.warm(i));
  j["x2"] = warm;
  return j;
}

json fixed_point_json(const FixedPoint& fp) {
  json j = state_json(fp.state);
  j["x02"] = fp.state.warm(0);
  j["saturated"] = fp.saturated;
  j["residual"] = fp.residual;
  if (fp.family_parameter) j["family_parameter"] = *fp.family_parameter;
  return j;
}

struct Check {
  std::string name;
  double value;
  std::string target;
  bool pass;
};

json checks_json(const std::vector<Check>& checks) {
  json arr = json::array();
  for (const Check& c : checks) {
    json j;
    j["name"] = c.name;
    j["value"] = c.value;
    j["target"] = c.target;
    j["pass"] = c.pass;
    arr.push_back(j);
  }
  return arr;
}

void write_summary(const fs::path& dir, const std::string& name,
                   const json& config, const std::vector<Check>& checks) {
  bool pass = true;
  for (const Check& c : checks) pass = pass && c.pass;
  json j;
  j["scenario"] = name;
  j["version"] = kVersion;
  j["config"] = config;
  j["checks"] = checks_json(checks);
  j["pass"] = pass;
  std::ofstream out(dir / "summary.json");
  out << j.dump(2) << "\n";
  if (!pass)
    throw ScenarioFailure("scenario '" + name + "' failed its acceptance checks");
}

json scenario_config_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["description"] = s.description;
  j["params"] = {{"lambda", s.params.lambda}, {"alpha", s.params.alpha},
                 {"beta", s.params.beta},     {"gamma", s.params.gamma},
                 {"d", s.params.d},           {"dispatch", to_string(s.params.dispatch)}};
  if (s.params.infinite_buffer())
    j["params"]["buffer"] = "inf";
  else
    j["params"]["buffer"] = s.params.buffer;
  j["rule"] = s.rule.name();
  j["fluid"] = {{"step", s.fluid_cfg.step},
                {"horizon", s.fluid_cfg.horizon},
                {"record_dt", s.fluid_cfg.record_dt}};
  j["sim"] = {{"N", s.sim_cfg.N},
              {"horizon", s.sim_cfg.horizon},
              {"seed", s.sim_cfg.seed},
              {"sample_dt", s.sim_cfg.sample_dt},
              {"replications", s.sim_cfg.replications}};
  return j;
}

int run_fluid(const std::string& config_path, const std::string& out_path) {
  const RunConfig cfg = load_config(config_path);
  const Trajectory traj =
      integrate(cfg.initial_fluid(), cfg.params, cfg.make_rule(), cfg.fluid);
  write_trajectory_csv(traj, out_path);
  return 0;
}

int run_simulate(const std::string& config_path, const std::string& out_path) {
  const RunConfig cfg = load_config(config_path);
  const ReplicatedTrajectory rep =
      replicate(cfg.params, cfg.make_rule(), cfg.sim, cfg.initial_counts());
  write_replicated_csv(rep, out_path);
  return 0;
}

int run_fixpoint(const std::string& config_path) {
  const RunConfig cfg = load_config(config_path);
  const FixedPointSolve solve = solve_fixed_point(cfg.make_rule(), cfg.params);
  json j;
  j["version"] = kVersion;
  j["unique"] = solve.unique;
  j["fixed_point"] = fixed_point_json(solve.primary());
  if (!solve.unique) {
    json extras = json::array();
    for (std::size_t i = 1; i < solve.points.size(); ++i)
      extras.push_back(fixed_point_json(solve.points[i]));
    j["additional_roots"] = extras;
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_optimize(const std::string& config_path, double q, double eta_lo,
                 double eta_hi) {
  const RunConfig cfg = load_config(config_path);
  const EtaSearchResult res =
      find_min_eta(cfg.params, q, cfg.initial_fluid(), eta_lo, eta_hi, cfg.fluid);
  json j;
  j["version"] = kVersion;
  j["q"] = q;
  j["feasible"] = res.feasible;
  j["monotone"] = res.monotone;
  if (res.feasible) j["eta"] = res.eta;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_scenario_fig1(const fs::path& dir) {
  const Scenario s = scenario_fig1();
  const Trajectory fluid = integrate(s.x0, s.params, s.rule, s.fluid_cfg);
  write_trajectory_csv(fluid, (dir / "fluid.csv").string());
  const ReplicatedTrajectory rep =
      replicate(s.params, s.rule, s.sim_cfg, s.counts0);
  write_replicated_csv(rep, (dir / "stochastic.csv").string());

  const BlindPod1 closed = blind_pod1_closed_form(0.06, s.params);
  const FixedPointSolve solve = solve_fixed_point(s.rule, s.params);
  const double x02_T = fluid.final_state().warm(0);

  // Convergence of the replication mean to the fluid path on the
  // common sample grid.
  double sup_dw = 0.0;
  for (std::size_t k = 0; k < rep.mean.size(); ++k) {
    const auto t = rep.mean.times[k];
    const std::size_t fk = static_cast<std::size_t>(
        t / s.fluid_cfg.record_dt + 0.5);
    if (fk >= fluid.size()) break;
    sup_dw = std::max(sup_dw,
                      weighted_distance(rep.mean.states[k], fluid.states[fk]));
  }

  std::vector<Check> checks{
      {"fluid_x02_final", x02_T, "0.12 +- 1e-3",
       std::fabs(x02_T - closed.x02) <= 1e-3},
      {"solver_x02", solve.primary().state.warm(0), "0.12 +- 1e-10",
       std::fabs(solve.primary().state.warm(0) - closed.x02) <= 1e-10},
      {"solver_q_warm", per_warm_queue(solve.primary().state),
       "35/6 +- 1e-9",
       std::fabs(per_warm_queue(solve.primary().state) - closed.q_warm) <= 1e-9},
      {"solver_residual", solve.primary().residual, "<= 1e-8",
       solve.primary().residual <= 1e-8},
      {"sup_dw", sup_dw, "<= 0.05", sup_dw <= 0.05},
  };
  json cfg = scenario_config_json(s);
  cfg["events_total"] = rep.mean.events.total();
  write_summary(dir, "fig1", cfg, checks);
  return 0;
}

int run_scenario_fig2(const fs::path& dir, double eta) {
  const Scenario s = scenario_fig2(eta);
  const Trajectory fluid = integrate(s.x0, s.params, s.rule, s.fluid_cfg);
  write_trajectory_csv(fluid, (dir / "fluid.csv").string());
  const ReplicatedTrajectory rep =
      replicate(s.params, s.rule, s.sim_cfg, s.counts0);
  write_replicated_csv(rep, (dir / "stochastic.csv").string());

  const double mq = max_queue(fluid);
  const double q_final = per_busy_queue(fluid.final_state());
  // The scale-up process must shut off permanently once capacity
  // overtakes demand.
  std::size_t first_off = fluid.size();
  for (std::size_t k = 0; k < fluid.size(); ++k) {
    if (fluid.g_values[k] <= 1e-12) {
      first_off = k;
      break;
    }
  }
  bool off_stays = first_off < fluid.size();
  for (std::size_t k = first_off; k < fluid.size(); ++k)
    off_stays = off_stays && fluid.g_values[k] <= 1e-12;

  std::vector<Check> checks{
      {"max_q_busy", mq, "<= 2", mq <= 2.0},
      {"q_busy_final", q_final, "1 +- 0.02", std::fabs(q_final - 1.0) <= 0.02},
      {"g_shuts_off", static_cast<double>(first_off), "< horizon samples",
       off_stays},
  };
  json cfg = scenario_config_json(s);
  cfg["eta"] = eta;
  write_summary(dir, "fig2", cfg, checks);
  return 0;
}

int run_scenario_prop4(const fs::path& dir) {
  const Prop4Scenario ps = scenario_prop4();
  const Scenario& s = ps.scenario;
  const Trajectory trap = integrate(s.x0, s.params, s.rule, s.fluid_cfg);
  write_trajectory_csv(trap, (dir / "fluid_trap.csv").string());
  const Trajectory escape =
      integrate(s.x0, s.params, rate_idle(s.params), s.fluid_cfg);
  write_trajectory_csv(escape, (dir / "fluid_rate_idle.csv").string());
  const ReplicatedTrajectory rep =
      replicate(s.params, s.rule, s.sim_cfg, s.counts0);
  write_replicated_csv(rep, (dir / "stochastic.csv").string());

  const double qbar_T = total_jobs(trap.final_state());
  bool y0_monotone = true;
  double y0_prev = -1.0;
  for (const FluidState& st : trap.states) {
    y0_monotone = y0_monotone && st.y0() >= y0_prev - 1e-12;
    y0_prev = st.y0();
  }
  const double y0_T = trap.final_state().y0();
  bool g_positive = true;
  for (double g : trap.g_values) g_positive = g_positive && g > 0.0;
  const double qbar_escape = total_jobs(escape.final_state());

  std::vector<Check> checks{
      {"qbar_final", qbar_T, "7.8 +- 1%",
       std::fabs(qbar_T - ps.qbar_limit) <= 0.01 * ps.qbar_limit},
      {"y0_monotone", y0_monotone ? 1.0 : 0.0, "monotone increasing",
       y0_monotone},
      {"y0_final", y0_T, "[lambda-1e-3, lambda]",
       y0_T >= s.params.lambda - 1e-3 && y0_T <= s.params.lambda + 1e-9},
      {"g_positive_everywhere", g_positive ? 1.0 : 0.0, "> 0", g_positive},
      {"rate_idle_qbar_final", qbar_escape, "lambda +- 1%",
       std::fabs(qbar_escape - s.params.lambda) <= 0.01 * s.params.lambda},
  };
  json cfg = scenario_config_json(s);
  cfg["qbar_limit"] = ps.qbar_limit;
  write_summary(dir, "prop4", cfg, checks);
  return 0;
}

int run_scenario_th3(const fs::path& dir) {
  const auto starts = default_th3_starts();
  const Th3Report report = scenario_th3_convergence(starts);
  const Params& p = report.params;

  // Fluid CSVs per start under rate_idle, plus one stochastic twin.
  const IntegratorConfig cfg{1e-3, report.horizon, IntegrationMethod::Euler,
                             1.0};
  for (const auto& [name, x0] : starts) {
    const Trajectory traj = integrate(x0, p, rate_idle(p), cfg);
    write_trajectory_csv(traj, (dir / ("fluid_" + name + ".csv")).string());
  }
  const SimConfig sim{1000, 500.0, 99, 1.0, 5, 0};
  const ReplicatedTrajectory rep = replicate(
      p, rate_idle(p), sim, CountState::from_fractions(starts[0].second, sim.N));
  write_replicated_csv(rep, (dir / "stochastic_all_cold.csv").string());

  std::vector<Check> checks;
  const double cost_target = 1.0 * 1.0 * p.lambda + 1.0;  // kappa1*c12*lambda + kappa2
  for (const Th3Entry& e : report.entries) {
    checks.push_back({"dw_" + e.start + "_" + e.rule, e.distance, "<= 1e-3",
                      e.distance <= 1e-3});
    checks.push_back({"cost_" + e.start + "_" + e.rule, e.tail_cost,
                      "lambda+1 +- 2%",
                      std::fabs(e.tail_cost - cost_target) <= 0.02 * cost_target});
  }
  json cfg_json;
  cfg_json["params"] = {{"lambda", p.lambda}, {"alpha", p.alpha},
                        {"beta", p.beta},     {"gamma", p.gamma},
                        {"d", p.d},           {"dispatch", to_string(p.dispatch)},
                        {"buffer", "inf"}};
  cfg_json["horizon"] = report.horizon;
  write_summary(dir, "th3", cfg_json, checks);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field load balancing and auto-scaling toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path, outdir, scenario_name;
  double q = 2.0, eta = 1.0, eta_lo = 1e-3, eta_hi = 1e3;

  CLI::App* fluid_cmd = app.add_subcommand("fluid", "Integrate the fluid model");
  fluid_cmd->add_option("--config", config_path, "Run config (JSON)")->required();
  fluid_cmd->add_option("--out", out_path, "Output CSV path")->required();

  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "Run replicated stochastic simulations");
  sim_cmd->add_option("--config", config_path, "Run config (JSON)")->required();
  sim_cmd->add_option("--out", out_path, "Output CSV path (mean +- sd)")->required();

  CLI::App* fix_cmd =
      app.add_subcommand("fixpoint", "Solve the fluid fixed point");
  fix_cmd->add_option("--config", config_path, "Run config (JSON)")->required();

  CLI::App* scen_cmd = app.add_subcommand("scenario", "Run a bundled scenario");
  scen_cmd->add_option("name", scenario_name, "fig1|fig2|prop4|th3")->required();
  scen_cmd->add_option("--eta", eta, "Rule aggressiveness (fig2 only)");
  scen_cmd->add_option("--outdir", outdir, "Output directory")->required();

  CLI::App* opt_cmd =
      app.add_subcommand("optimize", "Smallest eta meeting a queue bound");
  opt_cmd->add_option("--config", config_path, "Run config (JSON)")->required();
  opt_cmd->add_option("--q", q, "Per-busy queue bound")->required();
  opt_cmd->add_option("--eta-lo", eta_lo, "Search bracket lower end");
  opt_cmd->add_option("--eta-hi", eta_hi, "Search bracket upper end");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (fluid_cmd->parsed()) return run_fluid(config_path, out_path);
    if (sim_cmd->parsed()) return run_simulate(config_path, out_path);
    if (fix_cmd->parsed()) return run_fixpoint(config_path);
    if (opt_cmd->parsed()) return run_optimize(config_path, q, eta_lo, eta_hi);
    if (scen_cmd->parsed()) {
      fs::path dir(outdir);
      fs::create_directories(dir);
      if (scenario_name == "fig1") return run_scenario_fig1(dir);
      if (scenario_name == "fig2") return run_scenario_fig2(dir, eta);
      if (scenario_name == "prop4") return run_scenario_prop4(dir);
      if (scenario_name == "th3") return run_scenario_th3(dir);
      std::cerr << "unknown scenario '" << scenario_name
                << "' (expected fig1|fig2|prop4|th3)\n";
      return 1;
    }
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const ScenarioFailure& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 1;
}
