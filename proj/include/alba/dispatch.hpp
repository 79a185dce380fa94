#pragma once

#include <random>
#include <vector>

#include "alba/state.hpp"

namespace alba {

/// Caller-supplied per-run generator; never shared across threads.
using Rng = std::mt19937_64;

struct DispatchKernel {
  Dispatch discipline;
  int d;
  int buffer;  // kInfiniteBuffer for unbounded queues

  static DispatchKernel from(const Params& p) {
    return DispatchKernel{p.dispatch, p.d, p.buffer};
  }
};

/// Selection probabilities over queue-length classes 0..top for Power-of-d:
/// f_i = (y_i^d - y_{i+1}^d) / y0^d. The top entry is the probability of
/// selecting a server whose queue is at the stored truncation; with a
/// finite buffer that selection is a rejection. Returns an empty vector
/// when y0 = 0 (no warm server: the arrival is lost).
std::vector<double> pod_probs(const FluidState& x, int d);

/// Selection probabilities for Join-Below-Threshold-d: uniform over the
/// below-threshold mass when it exists, else uniform over all warm
/// servers. Empty vector when y0 = 0.
std::vector<double> jbt_probs(const FluidState& x, int d);

/// Fluid assignment rates h_0..h_{top-1} for Power-of-d:
/// h_i = lambda*(y_i^d - y_{i+1}^d)/y0^d when y0 > 0, min{beta*x01, lambda}
/// on every index otherwise.
std::vector<double> fluid_rates_pod(const FluidState& x, const Params& p);

/// Fluid assignment rates for JBT-d, with all four branches keyed on
/// y0 > 0 and sum_{k<=d} x_{k,2} > 0, including the surplus term
/// (lambda - x_{d+1,2} - (d+1)*beta*x01)^+ spread over classes above d.
std::vector<double> fluid_rates_jbt(const FluidState& x, const Params& p);

/// Dispatches to fluid_rates_pod / fluid_rates_jbt on p.dispatch.
std::vector<double> fluid_rates(const FluidState& x, const Params& p);

struct DispatchResult {
  enum class Kind { Assigned, Lost, Rejected };
  Kind kind;
  /// Queue-length class of the selected server when Assigned.
  int target = -1;
};

/// Samples the dispatch decision for one arrival on integer counts.
/// Power-of-d picks d warm servers uniformly with replacement and keeps
/// the shortest; JBT-d picks below-threshold proportionally to counts,
/// else a uniform warm server. Returns Lost when no warm server exists,
/// Rejected when the selected server's queue is at a finite buffer.
DispatchResult sample_dispatch(const CountState& n, const DispatchKernel& k,
                               Rng& rng);

}  // namespace alba
