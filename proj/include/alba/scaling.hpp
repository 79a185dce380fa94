#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "alba/state.hpp"

namespace alba {

/// A state-dependent scaling probability g: S -> [0,1]. Rules are
/// Lipschitz continuous with g > 0 at the all-cold state; every factory
/// enforces the boundary condition at construction. Immutable and
/// shareable across threads.
class ScalingRule {
 public:
  ScalingRule(std::string name, std::vector<std::string> declared_inputs,
              std::function<double(const FluidState&)> fn);

  double operator()(const FluidState& x) const { return fn_(x); }
  const std::string& name() const { return name_; }
  /// State coordinates the rule reads; the communication overhead a
  /// deployment would pay to evaluate it.
  const std::vector<std::string>& declared_inputs() const { return inputs_; }

 private:
  std::string name_;
  std::vector<std::string> inputs_;
  std::function<double(const FluidState&)> fn_;
};

/// Constant rule g = theta, theta in (0,1].
ScalingRule blind(double theta);

/// g = (lambda - beta*x01 - x12)^+ / lambda: scale in proportion to the
/// excess of mean demand over the rate at which servers become idle-on.
ScalingRule rate_idle(const Params& p);

/// g = (1 - exp(-(eta/lambda)*deficit^+)) / (1 - exp(-eta)) with
/// deficit = lambda - x12 - beta*x01. Tends to rate_idle as eta -> 0 and
/// to the indicator {deficit >= 0} as eta -> inf.
ScalingRule eta_rule(double eta, const Params& p);

/// g = (x00 - 1 + lambda)^+ / lambda: positive exactly when the cold
/// fraction exceeds the minimal-dimensioning level.
ScalingRule prop4_rule(const Params& p);

/// g = (x00 - 1 + lambda)^+, the unnormalized variant of prop4_rule.
ScalingRule cold_surplus_rule(const Params& p);

/// Compiles a rule from a declarative expression over
/// {x00, x01, x02, x12, y0, y1, lambda, beta} with operators
/// {+, -, *, /, exp, pos, min, max} and numeric constants. The result is
/// clamped to [0,1]. Throws ValidationError on parse errors or when the
/// compiled rule vanishes at the all-cold state.
ScalingRule expr_rule(const std::string& expression, const Params& p);

struct OptimalityReport {
  bool pass = true;
  int checked = 0;
  /// First violating state, when any: the rule is zero on positive
  /// deficit, or positive on nonpositive deficit.
  std::optional<FluidState> counterexample;
  std::string detail;
};

/// Checks both directions of "g(x) = 0 iff x12 + beta*x01 >= lambda" on a
/// stratified sample over the simplex including the boundary strata
/// x02 = 0 and x00 = 0 (tolerance: g <= 1e-12 counts as zero).
OptimalityReport satisfies_optimality_condition(const ScalingRule& rule,
                                                const Params& p, int samples);

/// Empirical Lipschitz constant of the rule under the weighted distance:
/// max over sampled pairs (independent and nearby perturbed pairs) of
/// |g(x)-g(x')| / d_w(x,x'). Diverges with sample count for
/// discontinuous rules.
double lipschitz_estimate(const ScalingRule& rule, int samples,
                          std::uint64_t seed = 0x5eed);

}  // namespace alba
