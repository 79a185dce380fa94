#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "alba/config.hpp"
#include "alba/csv.hpp"
#include "alba/ctmc.hpp"
#include "alba/experiments.hpp"
#include "alba/fixed_point.hpp"
#include "alba/fluid.hpp"
#include "alba/version.hpp"

namespace py = pybind11;
using namespace alba;

namespace {

std::vector<double> warm_list(const FluidState& s) { return s.warm(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Mean-field load balancing and auto-scaling toolkit: exact CTMC "
      "simulation, fluid ODE integration, fixed-point analysis.";
  m.attr("__version__") = kVersion;
  m.attr("INFINITE_BUFFER") = kInfiniteBuffer;

  py::register_exception<ValidationError>(m, "ValidationError",
                                          PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_ArithmeticError);

  py::enum_<Dispatch>(m, "Dispatch")
      .value("POWER_OF_D", Dispatch::PowerOfD)
      .value("JBT", Dispatch::JBT);

  py::class_<Params>(m, "Params")
      .def(py::init<double, double, double, double, int, int, Dispatch>(),
           py::arg("lambda_"), py::arg("alpha"), py::arg("beta"),
           py::arg("gamma"), py::arg("d"), py::arg("buffer"),
           py::arg("dispatch"))
      .def_readonly("lambda_", &Params::lambda)
      .def_readonly("alpha", &Params::alpha)
      .def_readonly("beta", &Params::beta)
      .def_readonly("gamma", &Params::gamma)
      .def_readonly("d", &Params::d)
      .def_readonly("buffer", &Params::buffer)
      .def_readonly("dispatch", &Params::dispatch)
      .def("infinite_buffer", &Params::infinite_buffer);

  py::class_<FluidState>(m, "FluidState")
      .def(py::init<double, double, std::vector<double>>(), py::arg("x00"),
           py::arg("x01"), py::arg("warm"))
      .def_static("all_cold", &FluidState::all_cold, py::arg("top"))
      .def_static("minimal_dimensioning", &FluidState::minimal_dimensioning,
                  py::arg("lambda_"), py::arg("top"))
      .def_static("optimal", &FluidState::optimal, py::arg("lambda_"),
                  py::arg("top"))
      .def_property_readonly("x00", &FluidState::x00)
      .def_property_readonly("x01", &FluidState::x01)
      .def("warm", py::overload_cast<int>(&FluidState::warm, py::const_),
           py::arg("i"))
      .def_property_readonly("warm_vector", &warm_list)
      .def_property_readonly("top", &FluidState::top)
      .def("y", &FluidState::y, py::arg("i"))
      .def_property_readonly("y0", &FluidState::y0)
      .def_property_readonly("y1", &FluidState::y1)
      .def("__eq__", [](const FluidState& a, const FluidState& b) { return a == b; });

  py::class_<CountState>(m, "CountState")
      .def(py::init<std::int64_t, std::int64_t, std::vector<std::int64_t>,
                    std::int64_t>(),
           py::arg("n00"), py::arg("n01"), py::arg("warm"), py::arg("N"))
      .def_static("from_fractions", &CountState::from_fractions, py::arg("x"),
                  py::arg("N"))
      .def_property_readonly("n00", &CountState::n00)
      .def_property_readonly("n01", &CountState::n01)
      .def_property_readonly("warm_vector",
                             [](const CountState& n) { return n.warm(); })
      .def_property_readonly("N", &CountState::N)
      .def("to_fluid", &CountState::to_fluid);

  py::class_<PowerCoeffs>(m, "PowerCoeffs")
      .def(py::init([](double c01, double c02, double c12, double kappa1,
                       double kappa2) {
             PowerCoeffs c{c01, c02, c12, kappa1, kappa2};
             c.validate();
             return c;
           }),
           py::arg("c01") = 1.0, py::arg("c02") = 1.0, py::arg("c12") = 1.0,
           py::arg("kappa1") = 1.0, py::arg("kappa2") = 1.0)
      .def_readonly("c01", &PowerCoeffs::c01)
      .def_readonly("c02", &PowerCoeffs::c02)
      .def_readonly("c12", &PowerCoeffs::c12)
      .def_readonly("kappa1", &PowerCoeffs::kappa1)
      .def_readonly("kappa2", &PowerCoeffs::kappa2);

  m.def("weighted_distance", &weighted_distance);
  m.def("per_warm_queue", &per_warm_queue);
  m.def("per_busy_queue", &per_busy_queue);
  m.def("total_jobs", &total_jobs);
  m.def("power", &power);

  m.def("pod_probs", &pod_probs, py::arg("x"), py::arg("d"));
  m.def("jbt_probs", &jbt_probs, py::arg("x"), py::arg("d"));
  m.def("fluid_rates_pod", &fluid_rates_pod);
  m.def("fluid_rates_jbt", &fluid_rates_jbt);
  m.def("fluid_rates", &fluid_rates);

  py::class_<ScalingRule>(m, "ScalingRule")
      .def("__call__", &ScalingRule::operator())
      .def_property_readonly("name", &ScalingRule::name)
      .def_property_readonly("declared_inputs", &ScalingRule::declared_inputs);

  m.def("blind", &blind, py::arg("theta"));
  m.def("rate_idle", &rate_idle);
  m.def("eta_rule", &eta_rule, py::arg("eta"), py::arg("params"));
  m.def("prop4_rule", &prop4_rule);
  m.def("cold_surplus_rule", &cold_surplus_rule);
  m.def("expr_rule", &expr_rule, py::arg("expression"), py::arg("params"));

  py::class_<OptimalityReport>(m, "OptimalityReport")
      .def_readonly("pass_", &OptimalityReport::pass)
      .def_readonly("checked", &OptimalityReport::checked)
      .def_readonly("counterexample", &OptimalityReport::counterexample)
      .def_readonly("detail", &OptimalityReport::detail);
  m.def("satisfies_optimality_condition", &satisfies_optimality_condition,
        py::arg("rule"), py::arg("params"), py::arg("samples"));
  m.def("lipschitz_estimate", &lipschitz_estimate, py::arg("rule"),
        py::arg("samples"), py::arg("seed") = 0x5eed);

  py::enum_<Regime>(m, "Regime")
      .value("INTERIOR", Regime::Interior)
      .value("COLD_BOUNDARY_RECIRCULATING", Regime::ColdBoundaryRecirculating)
      .value("COLD_BOUNDARY_REFILLING", Regime::ColdBoundaryRefilling)
      .value("BELOW_THRESHOLD_EXHAUSTED", Regime::BelowThresholdExhausted)
      .value("NO_WARM_SERVERS", Regime::NoWarmServers);

  py::class_<EventCounts>(m, "EventCounts")
      .def_readonly("arrivals", &EventCounts::arrivals)
      .def_readonly("lost", &EventCounts::lost)
      .def_readonly("rejected", &EventCounts::rejected)
      .def_readonly("departures", &EventCounts::departures)
      .def_readonly("scale_success", &EventCounts::scale_success)
      .def_readonly("scale_noop", &EventCounts::scale_noop)
      .def_readonly("init_complete", &EventCounts::init_complete)
      .def_readonly("expirations", &EventCounts::expirations)
      .def("total", &EventCounts::total);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("times", &Trajectory::times)
      .def_readonly("states", &Trajectory::states)
      .def_readonly("g_values", &Trajectory::g_values)
      .def_readonly("regimes", &Trajectory::regimes)
      .def_readonly("events", &Trajectory::events)
      .def_readonly("regime_chatter_intervals",
                    &Trajectory::regime_chatter_intervals)
      .def("final_state", &Trajectory::final_state)
      .def("__len__", &Trajectory::size);

  py::class_<ReplicatedTrajectory>(m, "ReplicatedTrajectory")
      .def_readonly("mean", &ReplicatedTrajectory::mean)
      .def_readonly("sd_x00", &ReplicatedTrajectory::sd_x00)
      .def_readonly("sd_x01", &ReplicatedTrajectory::sd_x01)
      .def_readonly("sd_x02", &ReplicatedTrajectory::sd_x02)
      .def_readonly("sd_y1", &ReplicatedTrajectory::sd_y1)
      .def_readonly("per_replication", &ReplicatedTrajectory::per_replication);

  py::enum_<IntegrationMethod>(m, "IntegrationMethod")
      .value("EULER", IntegrationMethod::Euler)
      .value("RK4_FROZEN_REGIME", IntegrationMethod::Rk4FrozenRegime);

  py::class_<IntegratorConfig>(m, "IntegratorConfig")
      .def(py::init([](double step, double horizon, IntegrationMethod method,
                       double record_dt) {
             IntegratorConfig c{step, horizon, method, record_dt};
             c.validate();
             return c;
           }),
           py::arg("step") = 1e-3, py::arg("horizon") = 100.0,
           py::arg("method") = IntegrationMethod::Euler,
           py::arg("record_dt") = 1.0)
      .def_readonly("step", &IntegratorConfig::step)
      .def_readonly("horizon", &IntegratorConfig::horizon)
      .def_readonly("record_dt", &IntegratorConfig::record_dt);

  m.def("drift", &drift, py::arg("x"), py::arg("params"), py::arg("rule"));
  m.def("regime", &regime);
  m.def(
      "integrate",
      [](const FluidState& x0, const Params& p, const ScalingRule& rule,
         const IntegratorConfig& cfg) { return integrate(x0, p, rule, cfg); },
      py::arg("x0"), py::arg("params"), py::arg("rule"), py::arg("config"));

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init([](std::int64_t N, double horizon, std::uint64_t seed,
                       double sample_dt, int replications,
                       std::uint64_t max_events) {
             SimConfig c{N, horizon, seed, sample_dt, replications, max_events};
             c.validate();
             return c;
           }),
           py::arg("N"), py::arg("horizon"), py::arg("seed") = 0,
           py::arg("sample_dt") = 1.0, py::arg("replications") = 1,
           py::arg("max_events") = 0)
      .def_readonly("N", &SimConfig::N)
      .def_readonly("horizon", &SimConfig::horizon)
      .def_readonly("seed", &SimConfig::seed)
      .def_readonly("replications", &SimConfig::replications);

  m.def(
      "run",
      [](const Params& p, const ScalingRule& rule, const SimConfig& cfg,
         const CountState& x0) { return run(p, rule, cfg, x0); },
      py::arg("params"), py::arg("rule"), py::arg("config"), py::arg("x0"));
  m.def("replicate", &replicate, py::arg("params"), py::arg("rule"),
        py::arg("config"), py::arg("x0"));

  py::class_<FixedPoint>(m, "FixedPoint")
      .def_readonly("state", &FixedPoint::state)
      .def_readonly("saturated", &FixedPoint::saturated)
      .def_readonly("residual", &FixedPoint::residual)
      .def_readonly("family_parameter", &FixedPoint::family_parameter);

  py::class_<FixedPointSolve>(m, "FixedPointSolve")
      .def_readonly("points", &FixedPointSolve::points)
      .def_readonly("unique", &FixedPointSolve::unique)
      .def("primary", &FixedPointSolve::primary,
           py::return_value_policy::reference_internal);

  m.def("reference_point", &reference_point);
  m.def("is_saturated", &is_saturated);
  m.def("solve_zd", &solve_zd, py::arg("x02"), py::arg("params"));
  m.def("pod_tail", &pod_tail, py::arg("x02"), py::arg("params"));
  m.def("jbt_tail", &jbt_tail, py::arg("x02"), py::arg("params"));
  m.def("jbt_family", &jbt_family, py::arg("x_d1"), py::arg("params"));
  m.def("solve_fixed_point", &solve_fixed_point, py::arg("rule"),
        py::arg("params"));

  py::class_<BlindPod1>(m, "BlindPod1")
      .def_readonly("x02", &BlindPod1::x02)
      .def_readonly("q_warm", &BlindPod1::q_warm);
  m.def("blind_pod1_closed_form", &blind_pod1_closed_form, py::arg("theta"),
        py::arg("params"));

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("name", &Scenario::name)
      .def_readonly("description", &Scenario::description)
      .def_readonly("params", &Scenario::params)
      .def_readonly("rule", &Scenario::rule)
      .def_readonly("x0", &Scenario::x0)
      .def_readonly("counts0", &Scenario::counts0)
      .def_readonly("fluid_cfg", &Scenario::fluid_cfg)
      .def_readonly("sim_cfg", &Scenario::sim_cfg);

  py::class_<Prop4Scenario>(m, "Prop4Scenario")
      .def_readonly("scenario", &Prop4Scenario::scenario)
      .def_readonly("qbar_limit", &Prop4Scenario::qbar_limit);

  py::class_<Th3Entry>(m, "Th3Entry")
      .def_readonly("start", &Th3Entry::start)
      .def_readonly("rule", &Th3Entry::rule)
      .def_readonly("distance", &Th3Entry::distance)
      .def_readonly("tail_cost", &Th3Entry::tail_cost);
  py::class_<Th3Report>(m, "Th3Report")
      .def_readonly("entries", &Th3Report::entries)
      .def_readonly("horizon", &Th3Report::horizon);

  m.def("cost_J", &cost_J, py::arg("traj"), py::arg("coeffs"), py::arg("t0"),
        py::arg("t1"));
  m.def("max_queue", &max_queue);

  py::class_<EtaSearchResult>(m, "EtaSearchResult")
      .def_readonly("feasible", &EtaSearchResult::feasible)
      .def_readonly("eta", &EtaSearchResult::eta)
      .def_readonly("monotone", &EtaSearchResult::monotone);
  m.def("find_min_eta", &find_min_eta, py::arg("params"), py::arg("q"),
        py::arg("x0"), py::arg("eta_lo"), py::arg("eta_hi"), py::arg("config"));

  m.def("scenario_fig1", &scenario_fig1);
  m.def("scenario_fig2", &scenario_fig2, py::arg("eta"));
  m.def("scenario_prop4", &scenario_prop4);
  m.def("scenario_th3_convergence", &scenario_th3_convergence);
  m.def("default_th3_starts", &default_th3_starts);

  m.def("parse_config", &parse_config);
  m.def("write_trajectory_csv", &write_trajectory_csv, py::arg("traj"),
        py::arg("path"));
}
