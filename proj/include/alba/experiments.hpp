#pragma once

#include <optional>
#include <string>
#include <vector>

#include "alba/ctmc.hpp"
#include "alba/fixed_point.hpp"
#include "alba/fluid.hpp"

namespace alba {

/// A runnable experiment: parameters, rule, paired fluid/stochastic
/// initial conditions and the run configurations.
struct Scenario {
  std::string name;
  std::string description;
  Params params;
  ScalingRule rule;
  FluidState x0;
  CountState counts0;
  IntegratorConfig fluid_cfg;
  SimConfig sim_cfg;
};

/// Time average of kappa1*P(x(t)) + kappa2*Q_busy(x(t)) over [t0, t1]
/// (trapezoid on the recorded grid). Throws UndefinedMetricError when no
/// busy servers exist somewhere in the window.
double cost_J(const Trajectory& traj, const PowerCoeffs& c, double t0,
              double t1);

/// Max over recorded times of the per-busy-server queue length.
double max_queue(const Trajectory& traj);

struct EtaSearchResult {
  bool feasible = false;
  double eta = 0.0;
  /// False when max_queue was not monotone in eta on the coarse grid; the
  /// result is then the smallest feasible grid point.
  bool monotone = true;
};

/// Smallest eta in [eta_lo, eta_hi] whose fluid trajectory from x0 under
/// JIQ + eta_rule keeps the per-busy queue below q at all recorded times.
/// Bisection (1e-3 relative) when the coarse grid shows max_queue
/// monotone nonincreasing in eta; grid fallback otherwise.
EtaSearchResult find_min_eta(const Params& p, double q, const FluidState& x0,
                             double eta_lo, double eta_hi,
                             const IntegratorConfig& cfg);

/// Blind scaling + Power-of-1 convergence scenario: lambda=0.7,
/// alpha=0.05, beta=0.1, gamma=0.025, theta=0.06, N=1000, B=100, minimal
/// dimensioning at t=0.
Scenario scenario_fig1();

/// Workload-surge scenario: the system is dimensioned for lambda=0.25
/// (plus a 0.05 idle reserve) and at t=0 the arrival rate jumps to
/// lambda=0.5; JIQ + eta_rule(eta), alpha=0.35, beta=0.1, gamma=0.025.
Scenario scenario_fig2(double eta);

struct Prop4Scenario {
  Scenario scenario;
  /// Analytic limit of total_jobs: Qbar(0) + (alpha+beta)/(alpha*beta) *
  /// (x00(0)-1+lambda) + x01(0)/beta.
  double qbar_limit;
};

/// Underload-trap scenario: JIQ with the cold-surplus rule from
/// x00=0.5, x01=0.1, x_{2,2}=0.4 (lambda=0.7, alpha=0.05, beta=0.1,
/// unbounded buffers). The scaling probability stays positive forever yet
/// total_jobs converges to a limit above lambda that depends on the
/// initial condition.
Prop4Scenario scenario_prop4();

struct Th3Entry {
  std::string start;
  std::string rule;
  double distance;   // d_w(x(T), x_star)
  double tail_cost;  // cost_J over the final 20% of the horizon
};

struct Th3Report {
  Params params;
  double horizon;
  std::vector<Th3Entry> entries;
};

/// Integrates every start under JIQ with rate_idle and with eta_rule(1)
/// to T=2000 and reports the weighted distance to the optimal point plus
/// the tail-window cost (kappa = (1,1), c = (1,1,1)).
Th3Report scenario_th3_convergence(
    const std::vector<std::pair<std::string, FluidState>>& starts);

/// The default start set: all-cold, minimal dimensioning, a JBT
/// zero-idle family member (d=0, x_{1,2} = lambda/2), and the
/// underload-trap initial condition.
std::vector<std::pair<std::string, FluidState>> default_th3_starts();

/// Parameters shared by the prop4/th3 scenarios (JIQ at the fig1 rates).
Params th3_params();

}  // namespace alba
