#include "alba/experiments.hpp"

#include <algorithm>
#include <cmath>

namespace alba {

double cost_J(const Trajectory& traj, const PowerCoeffs& c, double t0,
              double t1) {
  c.validate();
  if (!(t1 > t0)) throw ValidationError("cost_J: window must satisfy t1 > t0");
  long double integral = 0.0L;
  double first_t = 0.0, prev_t = 0.0, prev_v = 0.0;
  bool have_prev = false;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.times[k];
    if (t < t0 - 1e-12 || t > t1 + 1e-12) continue;
    const double v = c.kappa1 * power(traj.states[k], c) +
                     c.kappa2 * per_busy_queue(traj.states[k]);
    if (have_prev) {
      integral += 0.5L * (prev_v + v) * (t - prev_t);
    } else {
      first_t = t;
    }
    prev_t = t;
    prev_v = v;
    have_prev = true;
  }
  if (!have_prev || !(prev_t > first_t))
    throw ValidationError("cost_J: window holds fewer than two samples");
  return static_cast<double>(integral) / (prev_t - first_t);
}

double max_queue(const Trajectory& traj) {
  double worst = 0.0;
  for (const FluidState& s : traj.states)
    worst = std::max(worst, per_busy_queue(s));
  return worst;
}

EtaSearchResult find_min_eta(const Params& p, double q, const FluidState& x0,
                             double eta_lo, double eta_hi,
                             const IntegratorConfig& cfg) {
  if (!(eta_lo > 0.0 && eta_lo < eta_hi))
    throw ValidationError("find_min_eta: need 0 < eta_lo < eta_hi");
  auto max_q_at = [&](double eta) {
    return max_queue(integrate(x0, p, eta_rule(eta, p), cfg));
  };

  constexpr int kGridPoints = 9;
  const double lr = std::log(eta_lo), ur = std::log(eta_hi);
  std::vector<double> etas(kGridPoints), maxima(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) {
    etas[i] = std::exp(lr + (ur - lr) * i / (kGridPoints - 1));
    maxima[i] = max_q_at(etas[i]);
  }
  bool monotone = true;
  for (int i = 1; i < kGridPoints; ++i)
    if (maxima[i] > maxima[i - 1] + 1e-9) monotone = false;

  int first_feasible = -1;
  for (int i = 0; i < kGridPoints; ++i) {
    if (maxima[i] <= q) {
      first_feasible = i;
      break;
    }
  }
  if (first_feasible < 0) return {false, 0.0, monotone};
  if (!monotone) return {true, etas[first_feasible], false};
  if (first_feasible == 0) return {true, eta_lo, true};

  double lo = etas[first_feasible - 1], hi = etas[first_feasible];
  while ((hi - lo) / hi > 1e-3) {
    const double mid = std::sqrt(lo * hi);
    (max_q_at(mid) <= q ? hi : lo) = mid;
  }
  return {true, hi, true};
}

Scenario scenario_fig1() {
  const double lambda = 0.7, alpha = 0.05, beta = 0.1, gamma = 0.025;
  const Params p(lambda, alpha, beta, gamma, 1, 100, Dispatch::PowerOfD);
  // Half the saturation-threshold probability: a strictly positive
  // fraction of cold servers survives in equilibrium.
  const double theta =
      0.5 / alpha * (1.0 - lambda) / (1.0 / beta + 1.0 / gamma);
  const FluidState x0 = FluidState::minimal_dimensioning(lambda, p.buffer);
  Scenario s{
      "fig1",
      "Blind scaling with random dispatch converging to its fixed point",
      p,
      blind(theta),
      x0,
      CountState::from_fractions(x0, 1000),
      IntegratorConfig{1e-3, 5000.0, IntegrationMethod::Euler, 1.0},
      SimConfig{1000, 1000.0, 1337, 1.0, 10, 0}};
  return s;
}

Scenario scenario_fig2(double eta) {
  const double lambda = 0.5, alpha = 0.35, beta = 0.1, gamma = 0.025;
  const Params p(lambda, alpha, beta, gamma, 0, 100, Dispatch::JBT);
  std::vector<double> warm(p.buffer + 1, 0.0);
  warm[0] = 0.05;
  warm[1] = 0.25;  // dimensioned for the pre-surge rate 0.25
  const FluidState x0(0.70, 0.0, std::move(warm));
  Scenario s{"fig2",
             "Workload surge under JIQ with the exponential-family rule",
             p,
             eta_rule(eta, p),
             x0,
             CountState::from_fractions(x0, 1000),
             IntegratorConfig{1e-3, 500.0, IntegrationMethod::Euler, 0.5},
             SimConfig{1000, 500.0, 4242, 0.5, 10, 0}};
  return s;
}

Params th3_params() {
  return Params(0.7, 0.05, 0.1, 0.025, 0, kInfiniteBuffer, Dispatch::JBT);
}

Prop4Scenario scenario_prop4() {
  const Params p = th3_params();
  std::vector<double> warm(65, 0.0);
  warm[2] = 0.4;
  const FluidState x0(0.5, 0.1, std::move(warm));
  const double qbar0 = total_jobs(x0);  // 0.8
  const double limit = qbar0 +
                       (p.alpha + p.beta) / (p.alpha * p.beta) *
                           (x0.x00() - 1.0 + p.lambda) +
                       x0.x01() / p.beta;
  Scenario s{"prop4",
             "Underload trap: positive scaling probability, capacity "
             "converging to demand from below",
             p,
             cold_surplus_rule(p),
             x0,
             CountState::from_fractions(x0, 1000),
             IntegratorConfig{1e-3, 2000.0, IntegrationMethod::Euler, 1.0},
             SimConfig{1000, 2000.0, 777, 1.0, 10, 0}};
  return Prop4Scenario{std::move(s), limit};
}

std::vector<std::pair<std::string, FluidState>> default_th3_starts() {
  const Params p = th3_params();
  std::vector<std::pair<std::string, FluidState>> starts;
  starts.emplace_back("all_cold", FluidState::all_cold(64));
  starts.emplace_back("minimal_dimensioning",
                      FluidState::minimal_dimensioning(p.lambda, 64));
  starts.emplace_back("jbt_family_half", jbt_family(p.lambda / 2.0, p));
  std::vector<double> warm(65, 0.0);
  warm[2] = 0.4;
  starts.emplace_back("underload_trap_start", FluidState(0.5, 0.1, std::move(warm)));
  return starts;
}

Th3Report scenario_th3_convergence(
    const std::vector<std::pair<std::string, FluidState>>& starts) {
  const Params p = th3_params();
  const double horizon = 2000.0;
  const IntegratorConfig cfg{1e-3, horizon, IntegrationMethod::Euler, 1.0};
  const FluidState star = FluidState::optimal(p.lambda, 64);
  const PowerCoeffs coeffs{1.0, 1.0, 1.0, 1.0, 1.0};

  Th3Report report{p, horizon, {}};
  const std::vector<std::pair<std::string, ScalingRule>> rules{
      {"rate_idle", rate_idle(p)}, {"eta_1", eta_rule(1.0, p)}};
  for (const auto& [start_name, x0] : starts) {
    for (const auto& [rule_name, rule] : rules) {
      const Trajectory traj = integrate(x0, p, rule, cfg);
      report.entries.push_back(
          Th3Entry{start_name, rule_name,
                   weighted_distance(traj.final_state(), star),
                   cost_J(traj, coeffs, 0.8 * horizon, horizon)});
    }
  }
  return report;
}

}  // namespace alba
