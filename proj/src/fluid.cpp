#include "alba/fluid.hpp"

#include <algorithm>
#include <cmath>

#include "alba/dispatch.hpp"

namespace alba {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Interior: return "interior";
    case Regime::ColdBoundaryRecirculating: return "cold-boundary-recirculating";
    case Regime::ColdBoundaryRefilling: return "cold-boundary-refilling";
    case Regime::BelowThresholdExhausted: return "below-threshold-exhausted";
    case Regime::NoWarmServers: return "no-warm-servers";
  }
  return "?";
}

void IntegratorConfig::validate() const {
  if (!(step > 0.0)) throw ValidationError("fluid.step: must be > 0");
  if (!(horizon > 0.0)) throw ValidationError("fluid.horizon: must be > 0");
  if (!(record_dt >= step))
    throw ValidationError("fluid.record_dt: must be >= step");
  if (!(record_dt <= horizon))
    throw ValidationError("fluid.record_dt: must be <= horizon");
}

namespace {

struct RegimeFlags {
  bool cold_pos;   // x00 > eps
  bool recirc;     // x00 = 0 and gamma*x02 <= alpha*g
  bool warm_pos;   // y0 > eps
  bool below_pos;  // JBT: sum_{k<=d} x_{k,2} > eps
};

RegimeFlags compute_flags(double x00, const std::vector<double>& warm,
                          const Params& p, double g) {
  RegimeFlags f{};
  f.cold_pos = x00 > kRegimeEps;
  long double y0 = 0.0L;
  for (double v : warm) y0 += v;
  f.warm_pos = static_cast<double>(y0) > kRegimeEps;
  f.recirc = !f.cold_pos && p.gamma * warm[0] <= p.alpha * g;
  if (p.dispatch == Dispatch::JBT) {
    long double below = 0.0L;
    for (int k = 0; k <= std::min<int>(p.d, static_cast<int>(warm.size()) - 1); ++k)
      below += warm[k];
    f.below_pos = static_cast<double>(below) > kRegimeEps;
  } else {
    f.below_pos = true;
  }
  return f;
}

Regime label_of(const RegimeFlags& f, const Params& p) {
  if (!f.warm_pos) return Regime::NoWarmServers;
  if (p.dispatch == Dispatch::JBT && !f.below_pos)
    return Regime::BelowThresholdExhausted;
  if (!f.cold_pos)
    return f.recirc ? Regime::ColdBoundaryRecirculating
                    : Regime::ColdBoundaryRefilling;
  return Regime::Interior;
}

/// Assignment rates h_0..h_{top-1} with the branch selection pinned by
/// `flags` (so RK4 stages stay on the step's drift branch) but rates
/// evaluated at the given coordinates.
void rates_with_flags(const std::vector<double>& warm, double x01,
                      const Params& p, const RegimeFlags& flags,
                      std::vector<double>& h) {
  const int top = static_cast<int>(warm.size()) - 1;
  h.assign(top, 0.0);
  if (!flags.warm_pos) {
    std::fill(h.begin(), h.end(), std::min(p.beta * x01, p.lambda));
    return;
  }
  long double y0_acc = 0.0L;
  for (double v : warm) y0_acc += v;
  const double y0 = std::max(static_cast<double>(y0_acc), 1e-300);
  if (p.dispatch == Dispatch::PowerOfD) {
    // h_i = lambda * ((y_i/y0)^d - (y_{i+1}/y0)^d), i < top.
    static thread_local std::vector<double> suffix;
    suffix.assign(top + 2, 0.0);
    long double s = 0.0L;
    for (int i = top; i >= 0; --i) {
      s += warm[i];
      suffix[i] = static_cast<double>(s) / y0;
    }
    for (int i = 0; i < top; ++i) {
      const double a = std::pow(suffix[i], p.d);
      const double b = std::pow(suffix[i + 1], p.d);
      h[i] = p.lambda * std::max(a - b, 0.0);
    }
    return;
  }
  // JBT
  const int d = p.d;
  if (flags.below_pos) {
    long double below_acc = 0.0L;
    for (int k = 0; k <= std::min(d, top); ++k) below_acc += warm[k];
    const double below = std::max(static_cast<double>(below_acc), 1e-300);
    for (int i = 0; i <= std::min(d, top - 1); ++i)
      h[i] = p.lambda * warm[i] / below;
    return;
  }
  const double xd1 = d + 1 <= top ? warm[d + 1] : 0.0;
  const double influx = xd1 + (d + 1) * p.beta * x01;
  const double gate = influx <= p.lambda ? 1.0 : 0.0;
  for (int i = 0; i <= std::min(d, top - 1); ++i)
    h[i] = (p.beta * x01 + (i == d ? xd1 : 0.0)) * gate;
  const double surplus = std::max(p.lambda - influx, 0.0);
  for (int i = d + 1; i < top; ++i) h[i] = warm[i] / y0 * surplus;
}

void drift_with_flags(double x00, double x01, const std::vector<double>& warm,
                      const Params& p, double g, const RegimeFlags& flags,
                      std::vector<double>& h, std::vector<double>& out) {
  const int top = static_cast<int>(warm.size()) - 1;
  rates_with_flags(warm, x01, p, flags, h);
  out.assign(2 + top + 1, 0.0);
  const double recirc_flow = flags.recirc ? p.gamma * warm[0] : 0.0;
  const double activation = flags.cold_pos ? p.alpha * g : 0.0;
  out[0] = p.gamma * warm[0] - activation - recirc_flow;
  out[1] = activation - p.beta * x01 + recirc_flow;
  // Warm classes; the stored truncation acts as the buffer bound.
  out[2] = (top >= 1 ? warm[1] : 0.0) - (top >= 1 ? h[0] : 0.0) +
           p.beta * x01 - p.gamma * warm[0];
  for (int i = 1; i <= top; ++i) {
    double v = -warm[i] + h[i - 1];
    if (i < top) v += warm[i + 1] - h[i];
    out[2 + i] = v;
  }
  (void)x00;
}

}  // namespace

std::vector<double> drift(const FluidState& x, const Params& p,
                          const ScalingRule& rule) {
  const double g = rule(x);
  const RegimeFlags flags = compute_flags(x.x00(), x.warm(), p, g);
  std::vector<double> h, out;
  drift_with_flags(x.x00(), x.x01(), x.warm(), p, g, flags, h, out);
  return out;
}

Regime regime_for_g(const FluidState& x, const Params& p, double g) {
  return label_of(compute_flags(x.x00(), x.warm(), p, g), p);
}

Regime regime(const FluidState& x, const Params& p, const ScalingRule& rule) {
  return regime_for_g(x, p, rule(x));
}

namespace {

/// Clip negatives, then absorb the mass residual into x00. Compensated
/// summation keeps the residual at rounding level so slowly-decaying
/// coordinates near a boundary are not washed out.
void project(double& x00, double& x01, std::vector<double>& warm) {
  if (x00 < 0.0) x00 = 0.0;
  if (x01 < 0.0) x01 = 0.0;
  long double mass = static_cast<long double>(x00) + x01;
  for (double& v : warm) {
    if (v < 0.0) v = 0.0;
    mass += v;
  }
  x00 += static_cast<double>(1.0L - mass);
  if (x00 < 0.0) {
    // Residual exceeded the cold mass (rounding-scale event): push the
    // remainder into the next nonnegative coordinate.
    x01 += x00;
    x00 = 0.0;
    if (x01 < 0.0) {
      warm[0] += x01;
      x01 = 0.0;
      if (warm[0] < 0.0) warm[0] = 0.0;
    }
  }
}

}  // namespace

Trajectory integrate(const FluidState& x0, const Params& p,
                     const ScalingRule& rule, const IntegratorConfig& cfg,
                     const StepObserver& observer) {
  cfg.validate();

  int cap;  // largest tracked queue-length class
  if (p.infinite_buffer()) {
    cap = std::max({64, p.d + 32, x0.top()});
  } else {
    cap = p.buffer;
    for (int i = cap + 1; i <= x0.top(); ++i)
      if (x0.warm(i) != 0.0)
        throw ValidationError(
            "initial state has warm mass beyond the finite buffer");
  }

  double x00 = x0.x00();
  double x01 = x0.x01();
  std::vector<double> warm(cap + 1, 0.0);
  for (int i = 0; i <= std::min(x0.top(), cap); ++i) warm[i] = x0.warm(i);

  const double h = cfg.step;
  const long long total_steps = std::llround(cfg.horizon / h);
  const long long record_every = std::max<long long>(1, std::llround(cfg.record_dt / h));

  Trajectory traj;
  traj.times.reserve(static_cast<std::size_t>(total_steps / record_every) + 2);

  std::vector<double> rates, deriv;
  std::vector<double> k1, k2, k3, k4, stage;

  Regime prev_regime{};
  long long interval_steps = 0, interval_flips = 0;

  for (long long i = 0; i <= total_steps; ++i) {
    const double t = static_cast<double>(i) * h;
    FluidState cur = FluidState::unchecked(x00, x01, warm);
    const double g = rule(cur);
    const RegimeFlags flags = compute_flags(x00, warm, p, g);
    const Regime reg = label_of(flags, p);

    if (i > 0) {
      ++interval_steps;
      if (reg != prev_regime) ++interval_flips;
    }
    prev_regime = reg;

    if (i % record_every == 0 || i == total_steps) {
      double mass = x00 + x01;
      for (double v : warm) mass += v;
      if (std::fabs(mass - 1.0) > 1e-6)
        throw NumericalError("fluid integration lost mass conservation");
      if (!traj.times.empty() && t <= traj.times.back()) {
        // horizon not a multiple of record_dt: final point already hit
      } else {
        traj.times.push_back(t);
        traj.states.push_back(cur);
        traj.g_values.push_back(g);
        traj.regimes.push_back(reg);
      }
      if (interval_steps > 0 && interval_flips == interval_steps)
        ++traj.regime_chatter_intervals;
      interval_steps = interval_flips = 0;
    }
    if (i == total_steps) break;

    if (cfg.method == IntegrationMethod::Euler) {
      drift_with_flags(x00, x01, warm, p, g, flags, rates, deriv);
      x00 += h * deriv[0];
      x01 += h * deriv[1];
      for (int j = 0; j <= cap; ++j) warm[j] += h * deriv[2 + j];
    } else {
      // RK4 with the drift branch frozen at the step start.
      auto eval = [&](double a00, double a01, const std::vector<double>& aw,
                      std::vector<double>& out) {
        const double gs = rule(FluidState::unchecked(a00, a01, aw));
        drift_with_flags(a00, a01, aw, p, gs, flags, rates, out);
      };
      eval(x00, x01, warm, k1);
      stage = warm;
      auto advance = [&](const std::vector<double>& k, double w) {
        for (int j = 0; j <= cap; ++j) stage[j] = warm[j] + w * k[2 + j];
      };
      advance(k1, h / 2);
      eval(x00 + h / 2 * k1[0], x01 + h / 2 * k1[1], stage, k2);
      advance(k2, h / 2);
      eval(x00 + h / 2 * k2[0], x01 + h / 2 * k2[1], stage, k3);
      advance(k3, h);
      eval(x00 + h * k3[0], x01 + h * k3[1], stage, k4);
      x00 += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
      x01 += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
      for (int j = 0; j <= cap; ++j)
        warm[j] +=
            h / 6 * (k1[2 + j] + 2 * k2[2 + j] + 2 * k3[2 + j] + k4[2 + j]);
    }

    project(x00, x01, warm);

    if (p.infinite_buffer() && warm[cap] > 1e-9) {
      if (cap >= 4096)
        throw TruncationOverflowError(
            "warm-queue tail exceeded the 4096-class truncation");
      cap = std::min(cap * 2, 4096);
      warm.resize(cap + 1, 0.0);
    }

    if (observer)
      observer(t, cur, FluidState::unchecked(x00, x01, warm), h);
  }
  return traj;
}

}  // namespace alba
