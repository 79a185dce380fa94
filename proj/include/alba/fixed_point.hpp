#pragma once

#include <optional>
#include <vector>

#include "alba/scaling.hpp"
#include "alba/state.hpp"

namespace alba {

/// An equilibrium of the fluid model (unbounded buffers). saturated
/// means no cold mass remains (x00 = 0). family_parameter is set for
/// members of the JBT zero-idle multiplicity family (the free x_{d+1,2}
/// value).
struct FixedPoint {
  FluidState state;
  bool saturated = false;
  double residual = 0.0;  // ||F(state)||_inf
  std::optional<double> family_parameter;
};

/// The boundary reference point: x00 = 0,
/// x01 = gamma(1-lambda)/(beta+gamma), x02 = beta(1-lambda)/(beta+gamma),
/// warm tail filled per the dispatch discipline.
FluidState reference_point(const Params& p);

/// True when the equilibrium has no cold servers:
/// alpha*g(reference_point) >= (1-lambda) / (1/beta + 1/gamma).
bool is_saturated(const ScalingRule& rule, const Params& p);

/// Unique root z in [0,1] of z + x02 = x02 * sum_{k=0}^{d}
/// (lambda/(z+x02))^k; the equilibrium fraction of busy servers with at
/// most d jobs under JBT-d. Returns 0 when d = 0.
double solve_zd(double x02, const Params& p);

/// Equilibrium warm tail (x_{1,2}, x_{2,2}, ...) for Power-of-d given the
/// idle fraction x02 > 0; terms below 1e-15 are truncated.
std::vector<double> pod_tail(double x02, const Params& p);

/// Equilibrium warm tail for JBT-d given x02 > 0; support is exactly
/// {1, ..., d+1}.
std::vector<double> jbt_tail(double x02, const Params& p);

/// A member of the JBT zero-idle fixed-point family: x00 = 1-lambda,
/// x_{i,2} = 0 for i <= d, and a geometric tail seeded by
/// x_{d+1,2} = x_d1 in (0, lambda].
FluidState jbt_family(double x_d1, const Params& p);

struct FixedPointSolve {
  std::vector<FixedPoint> points;  // primary first
  bool unique = true;

  const FixedPoint& primary() const { return points.front(); }
};

/// Solves the equilibrium conditions by reducing to a one-dimensional
/// root problem in x02 on (0, beta(1-lambda)/(beta+gamma)]: find
/// gamma*x02 = alpha*g(x(x02)) with the full state assembled through the
/// discipline's tail. When no interior root exists and the saturation
/// condition holds, returns the reference point as the unique saturated
/// fixed point. Multiple interior roots are all returned, flagged
/// non-unique.
FixedPointSolve solve_fixed_point(const ScalingRule& rule, const Params& p);

struct BlindPod1 {
  double x02;
  double q_warm;  // jobs per warm server
};

/// Closed form for Blind-theta with Power-of-1:
/// x02* = min{alpha*theta/gamma, beta(1-lambda)/(beta+gamma)},
/// Q = lambda/x02*.
BlindPod1 blind_pod1_closed_form(double theta, const Params& p);

}  // namespace alba
