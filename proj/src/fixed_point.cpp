#include "alba/fixed_point.hpp"

#include <algorithm>
#include <cmath>

#include "alba/fluid.hpp"

namespace alba {

namespace {

constexpr double kTailCutoff = 1e-15;
constexpr std::size_t kTailCap = 100000;

double x02_circ(const Params& p) {
  return p.beta * (1.0 - p.lambda) / (p.beta + p.gamma);
}

/// Assembles the full state for a candidate idle fraction on the
/// unsaturated branch: x01 = (gamma/beta)*x02,
/// x00 = 1 - lambda - (gamma/beta + 1)*x02, tail per discipline.
FluidState assemble(double x02, const Params& p) {
  const double x01 = p.gamma / p.beta * x02;
  const double x00 =
      std::max(1.0 - p.lambda - (p.gamma / p.beta + 1.0) * x02, 0.0);
  std::vector<double> tail = p.dispatch == Dispatch::PowerOfD
                                 ? pod_tail(x02, p)
                                 : jbt_tail(x02, p);
  std::vector<double> warm(tail.size() + 1);
  warm[0] = x02;
  std::copy(tail.begin(), tail.end(), warm.begin() + 1);
  return FluidState::unchecked(x00, x01, std::move(warm));
}

double drift_residual(const FluidState& x, const Params& p,
                      const ScalingRule& rule) {
  // Fixed points are unbounded-buffer objects; evaluate the drift on the
  // state's own truncation.
  Params pe = p;
  pe.buffer = kInfiniteBuffer;
  double worst = 0.0;
  for (double v : drift(x, pe, rule)) worst = std::max(worst, std::fabs(v));
  return worst;
}

}  // namespace

double solve_zd(double x02, const Params& p) {
  if (p.d == 0) return 0.0;
  if (!(x02 > 0.0 && x02 <= 1.0 - p.lambda + 1e-12))
    throw ValidationError("solve_zd: x02 must lie in (0, 1-lambda]");
  auto residual = [&](double z) {
    const double rho = p.lambda / (z + x02);
    double geom = 1.0, rk = 1.0;
    for (int k = 1; k <= p.d; ++k) {
      rk *= rho;
      geom += rk;
    }
    return z + x02 - x02 * geom;
  };
  double lo = 0.0, hi = 1.0;
  double flo = residual(lo), fhi = residual(hi);
  if (flo > 0.0 || fhi < 0.0)
    throw NumericalError("solve_zd: root not bracketed in [0,1]");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = residual(mid);
    if (std::fabs(fmid) <= 1e-12) return mid;
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  const double z = 0.5 * (lo + hi);
  if (std::fabs(residual(z)) > 1e-12)
    throw NumericalError("solve_zd: bisection failed to converge");
  return z;
}

std::vector<double> pod_tail(double x02, const Params& p) {
  if (!(x02 > 0.0))
    throw ValidationError("pod_tail: degenerate x02 = 0 (no Power-of-d "
                          "fixed point has an empty idle class)");
  if (x02 > 1.0 - p.lambda + 1e-12)
    throw ValidationError("pod_tail: x02 must lie in (0, 1-lambda]");
  const double base = p.lambda + x02;
  const double log_rho = std::log(p.lambda) - std::log(base);
  // Exponents e_i = (d^i - 1)/(d - 1), with the removable d = 1 limit e_i = i.
  auto exponent = [&](int i) {
    if (p.d == 1) return static_cast<double>(i);
    return (std::pow(static_cast<double>(p.d), i) - 1.0) /
           (static_cast<double>(p.d) - 1.0);
  };
  std::vector<double> tail;
  for (int i = 1;; ++i) {
    const double term = base * (std::exp(exponent(i) * log_rho) -
                                std::exp(exponent(i + 1) * log_rho));
    if (term < kTailCutoff && i > 1) break;
    tail.push_back(term);
    if (tail.size() > kTailCap)
      throw NumericalError("pod_tail: tail failed to decay");
  }
  return tail;
}

std::vector<double> jbt_tail(double x02, const Params& p) {
  if (!(x02 > 0.0))
    throw ValidationError("jbt_tail: x02 must be > 0 (use jbt_family for "
                          "the zero-idle branch)");
  const double zd = solve_zd(x02, p);
  const double r = p.lambda / (zd + x02);
  std::vector<double> tail(p.d + 1, 0.0);
  double ri = 1.0;
  for (int i = 1; i <= p.d + 1; ++i) {
    ri *= r;
    tail[i - 1] = ri * x02;
  }
  return tail;
}

FluidState jbt_family(double x_d1, const Params& p) {
  if (p.dispatch != Dispatch::JBT)
    throw ValidationError("jbt_family: requires JBT dispatch");
  if (!(x_d1 > 0.0 && x_d1 <= p.lambda))
    throw ValidationError("jbt_family: x_{d+1,2} must lie in (0, lambda]");
  const double ratio = 1.0 - x_d1 / p.lambda;
  std::vector<double> warm(p.d + 2, 0.0);
  warm[p.d + 1] = x_d1;
  double term = x_d1 * ratio;
  while (term >= kTailCutoff && warm.size() < kTailCap) {
    warm.push_back(term);
    term *= ratio;
  }
  return FluidState::unchecked(1.0 - p.lambda, 0.0, std::move(warm));
}

FluidState reference_point(const Params& p) {
  const double x02 = x02_circ(p);
  return assemble(x02, p);
}

bool is_saturated(const ScalingRule& rule, const Params& p) {
  const double threshold =
      (1.0 - p.lambda) / (1.0 / p.beta + 1.0 / p.gamma);
  return p.alpha * rule(reference_point(p)) >= threshold;
}

FixedPointSolve solve_fixed_point(const ScalingRule& rule, const Params& p) {
  const double hi = x02_circ(p);
  const double lo = 1e-12;
  auto phi = [&](double x02) {
    return p.gamma * x02 - p.alpha * rule(assemble(x02, p));
  };

  // Scan for sign changes; g is Lipschitz but not necessarily monotone.
  constexpr int kGrid = 1000;
  std::vector<double> roots;
  double prev_x = lo, prev_f = phi(lo);
  for (int k = 1; k <= kGrid; ++k) {
    const double x = lo + (hi - lo) * static_cast<double>(k) / kGrid;
    const double f = phi(x);
    if (prev_f == 0.0) roots.push_back(prev_x);
    if ((prev_f < 0.0 && f > 0.0) || (prev_f > 0.0 && f < 0.0)) {
      double a = prev_x, b = x, fa = prev_f;
      for (int it = 0; it < 100; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = phi(m);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_x = x;
    prev_f = f;
  }
  if (prev_f == 0.0 && (roots.empty() || roots.back() != prev_x))
    roots.push_back(prev_x);
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return b - a < 1e-9; }),
              roots.end());

  const bool saturated = is_saturated(rule, p);
  FixedPointSolve solve;
  // The boundary root x02 = x02_circ coincides with the saturated point;
  // report it once.
  std::erase_if(roots, [&](double r) { return saturated && hi - r < 1e-9; });
  for (double r : roots) {
    FluidState s = assemble(r, p);
    solve.points.push_back(
        FixedPoint{s, s.x00() <= 1e-12, drift_residual(s, p, rule), {}});
  }
  if (saturated) {
    FluidState s = reference_point(p);
    solve.points.insert(solve.points.begin(),
                        FixedPoint{s, true, drift_residual(s, p, rule), {}});
  }
  if (solve.points.empty())
    throw NumericalError(
        "solve_fixed_point: no interior root and the saturation condition "
        "does not hold");
  solve.unique = solve.points.size() == 1;
  return solve;
}

BlindPod1 blind_pod1_closed_form(double theta, const Params& p) {
  if (!(theta > 0.0 && theta <= 1.0))
    throw ValidationError("blind_pod1_closed_form: theta must lie in (0,1]");
  const double x02 = std::min(p.alpha * theta / p.gamma, x02_circ(p));
  return BlindPod1{x02, p.lambda / x02};
}

}  // namespace alba
