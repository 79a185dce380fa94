#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alba/state.hpp"

namespace alba {

/// Active branch of the fluid drift at a state; recorded for diagnostics.
enum class Regime {
  Interior,
  ColdBoundaryRecirculating,  // x00 = 0 and gamma*x02 <= alpha*g
  ColdBoundaryRefilling,      // x00 = 0 and gamma*x02 > alpha*g
  BelowThresholdExhausted,    // JBT with sum_{k<=d} x_{k,2} = 0, y0 > 0
  NoWarmServers,              // y0 = 0
};

std::string to_string(Regime r);

struct EventCounts {
  std::uint64_t arrivals = 0;
  std::uint64_t lost = 0;
  std::uint64_t rejected = 0;
  std::uint64_t departures = 0;
  std::uint64_t scale_success = 0;
  std::uint64_t scale_noop = 0;
  std::uint64_t init_complete = 0;
  std::uint64_t expirations = 0;

  std::uint64_t total() const {
    return arrivals + departures + scale_success + scale_noop + init_complete +
           expirations;
  }
  bool operator==(const EventCounts&) const = default;
};

enum class StopReason { Horizon, MaxEvents };

/// Time-stamped states sampled on a fixed grid, for both stochastic
/// (counts/N) and fluid runs, plus the scaling probability and drift
/// regime at each sample.
struct Trajectory {
  std::vector<double> times;
  std::vector<FluidState> states;
  std::vector<double> g_values;
  std::vector<Regime> regimes;
  EventCounts events;                 // all-zero for fluid runs
  StopReason stop = StopReason::Horizon;
  /// Sample intervals whose regime label flipped on every integrator
  /// step (chattering across a drift discontinuity); fluid runs only.
  std::uint64_t regime_chatter_intervals = 0;

  std::size_t size() const { return times.size(); }
  const FluidState& final_state() const { return states.back(); }
};

/// Pointwise mean of replicated stochastic runs plus the per-replication
/// spread (sample standard deviation) of the headline coordinates.
struct ReplicatedTrajectory {
  Trajectory mean;
  std::vector<double> sd_x00;
  std::vector<double> sd_x01;
  std::vector<double> sd_x02;
  std::vector<double> sd_y1;
  std::vector<EventCounts> per_replication;
};

}  // namespace alba
