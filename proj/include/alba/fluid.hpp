#pragma once

#include <functional>

#include "alba/scaling.hpp"
#include "alba/state.hpp"
#include "alba/trajectory.hpp"

namespace alba {

enum class IntegrationMethod { Euler, Rk4FrozenRegime };

struct IntegratorConfig {
  double step = 1e-3;
  double horizon = 0.0;
  IntegrationMethod method = IntegrationMethod::Euler;
  double record_dt = 1.0;

  void validate() const;
  bool operator==(const IntegratorConfig&) const = default;
};

/// Drift F(x) of the fluid model, as [dx00, dx01, dwarm_0..dwarm_top].
/// The state's stored truncation acts as the buffer bound; unbounded
/// runs grow the truncation in the integrator. Coordinates sum to zero.
std::vector<double> drift(const FluidState& x, const Params& p,
                          const ScalingRule& rule);

/// Label of the drift branch active at x.
Regime regime(const FluidState& x, const Params& p, const ScalingRule& rule);
Regime regime_for_g(const FluidState& x, const Params& p, double g);

/// Called after every accepted step with the step endpoints. Used by
/// test oracles; adds one state copy per step when set.
using StepObserver = std::function<void(
    double t, const FluidState& before, const FluidState& after, double h)>;

/// Integrates the fluid model from x0, recording states on the
/// record_dt grid. Explicit Euler (or RK4 with the drift branches frozen
/// at the step start) followed by a simplex projection: negatives are
/// clipped and the mass residual is absorbed into x00. For unbounded
/// buffers the warm truncation starts at max(64, d+32) and doubles
/// whenever the top class accumulates more than 1e-9 mass, up to 4096;
/// beyond that a TruncationOverflowError is thrown.
Trajectory integrate(const FluidState& x0, const Params& p,
                     const ScalingRule& rule, const IntegratorConfig& cfg,
                     const StepObserver& observer = nullptr);

}  // namespace alba
