#pragma once

#include <cstdint>
#include <functional>

#include "alba/dispatch.hpp"
#include "alba/scaling.hpp"
#include "alba/state.hpp"
#include "alba/trajectory.hpp"

namespace alba {

struct SimConfig {
  std::int64_t N = 1;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  double sample_dt = 1.0;
  int replications = 1;
  /// Optional event budget; 0 means horizon-only stopping. Whichever
  /// bound binds first is recorded in Trajectory::stop.
  std::uint64_t max_events = 0;

  void validate() const;
  bool operator==(const SimConfig&) const = default;
};

enum class SimEvent {
  Arrival,
  Departure,
  ScaleSuccess,
  ScaleNoop,
  InitComplete,
  Expiration
};

/// Invoked after every event with the holding interval that just ended
/// in `before`. Used by exactness oracles (time-in-state accounting).
using EventObserver = std::function<void(
    double t_prev, double t_now, const CountState& before, SimEvent ev)>;

/// Statistically exact sample path of the server-count Markov chain:
/// competing exponential clocks with total rate
/// lambda*N + sum_{i>=1} n_{i,2} + alpha*N + beta*n01 + gamma*n_{0,2},
/// the event chosen proportionally. A scaling tick activates one cold
/// server with probability g(n/N) when cold servers exist and is a no-op
/// otherwise. Deterministic for a given (seed, config): single
/// mt19937_64 stream seeded with cfg.seed.
Trajectory run(const Params& p, const ScalingRule& rule, const SimConfig& cfg,
               const CountState& x0, const EventObserver& observer = nullptr);

/// Independent replications with seeds cfg.seed + r for replication
/// r = 0..replications-1, averaged pointwise on the common sample grid.
/// Replications execute in parallel, capped by ALBA_THREADS when set.
ReplicatedTrajectory replicate(const Params& p, const ScalingRule& rule,
                               const SimConfig& cfg, const CountState& x0);

}  // namespace alba
