#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alba/errors.hpp"

namespace alba {

/// Sentinel for an unbounded per-server buffer.
inline constexpr int kInfiniteBuffer = -1;

/// Tolerance for the unit-mass invariant of fluid states.
inline constexpr double kMassTol = 1e-9;

/// Tolerance used for "is this coordinate zero" regime tests. The fluid
/// drift is discontinuous exactly on these sets, so a strict comparison
/// against 0.0 would be meaningless in floating point.
inline constexpr double kRegimeEps = 1e-9;

enum class Dispatch { PowerOfD, JBT };

std::string to_string(Dispatch d);

/// Model parameters. lambda is the arrival rate per server, alpha the
/// scaling-clock rate factor, beta the initialization rate, gamma the
/// expiration rate. d parameterizes the dispatch discipline; buffer is the
/// per-server capacity (kInfiniteBuffer for unbounded).
struct Params {
  double lambda;
  double alpha;
  double beta;
  double gamma;
  int d;
  int buffer;
  Dispatch dispatch;

  Params(double lambda, double alpha, double beta, double gamma, int d,
         int buffer, Dispatch dispatch);

  bool infinite_buffer() const { return buffer == kInfiniteBuffer; }
  bool operator==(const Params&) const = default;
};

/// Occupancy fractions of the server pool: x00 cold, x01 initializing,
/// warm(i) = fraction of warm servers holding exactly i jobs. Entries are
/// nonnegative and sum to one (tolerance kMassTol). Immutable after
/// construction; safe to share across threads.
class FluidState {
 public:
  FluidState(double cold, double initializing, std::vector<double> warm);

  /// Constructs without validating invariants. For integrator internals
  /// that maintain the simplex themselves.
  static FluidState unchecked(double cold, double initializing,
                              std::vector<double> warm);

  static FluidState all_cold(int top);
  /// Capacity matched to mean demand: 1-lambda cold, lambda idle-on.
  static FluidState minimal_dimensioning(double lambda, int top);
  /// The delay/energy optimal point: 1-lambda cold, lambda busy with one job.
  static FluidState optimal(double lambda, int top);

  double x00() const { return x00_; }
  double x01() const { return x01_; }
  /// x_{i,2}; zero beyond the stored truncation.
  double warm(int i) const {
    return (i >= 0 && i < static_cast<int>(warm_.size())) ? warm_[i] : 0.0;
  }
  const std::vector<double>& warm() const { return warm_; }
  /// Largest stored queue-length class.
  int top() const { return static_cast<int>(warm_.size()) - 1; }

  /// y_i = sum_{k>=i} x_{k,2}.
  double y(int i) const;
  double y0() const { return y0_; }
  double y1() const { return y0_ - warm_[0]; }

  /// Copy with the warm tail zero-extended to the given top class.
  FluidState padded(int top) const;

  bool operator==(const FluidState&) const = default;

 private:
  struct Unchecked {};
  FluidState(Unchecked, double cold, double initializing,
             std::vector<double> warm);

  double x00_;
  double x01_;
  std::vector<double> warm_;
  double y0_;
};

/// Integer server counts per (queue length, server state); sums to N
/// exactly at all times.
class CountState {
 public:
  CountState(std::int64_t cold, std::int64_t initializing,
             std::vector<std::int64_t> warm, std::int64_t N);

  /// Rounds N*x to integer counts (largest-remainder) so they sum to N.
  static CountState from_fractions(const FluidState& x, std::int64_t N);

  std::int64_t n00() const { return n00_; }
  std::int64_t n01() const { return n01_; }
  std::int64_t warm(int i) const {
    return (i >= 0 && i < static_cast<int>(warm_.size())) ? warm_[i] : 0;
  }
  const std::vector<std::int64_t>& warm() const { return warm_; }
  int top() const { return static_cast<int>(warm_.size()) - 1; }
  std::int64_t N() const { return N_; }

  FluidState to_fluid() const;

  bool operator==(const CountState&) const = default;

 private:
  friend class CtmcRunner;
  std::int64_t n00_;
  std::int64_t n01_;
  std::vector<std::int64_t> warm_;
  std::int64_t N_;
};

/// Power weights for P(x) = c01*x01 + c02*x02 + c12*y1 and cost weights
/// kappa1 (per watt) / kappa2 (per job).
struct PowerCoeffs {
  double c01 = 1.0;
  double c02 = 1.0;
  double c12 = 1.0;
  double kappa1 = 1.0;
  double kappa2 = 1.0;

  void validate() const;
};

/// Distance induced by the weighted l2 norm with coordinate weights
/// 2^-(i+j). States over different truncations are compared by
/// zero-padding the shorter tail.
double weighted_distance(const FluidState& a, const FluidState& b);

/// Jobs per warm server, (sum_i i*x_{i,2}) / y0. Throws
/// UndefinedMetricError when y0 = 0.
double per_warm_queue(const FluidState& x);

/// Jobs per busy server, (sum_i i*x_{i,2}) / y1. Throws
/// UndefinedMetricError when y1 = 0.
double per_busy_queue(const FluidState& x);

/// Jobs per server, sum_i i*x_{i,2}; cold and initializing servers count 0.
double total_jobs(const FluidState& x);

/// P(x) = c01*x01 + c02*x02 + c12*y1.
double power(const FluidState& x, const PowerCoeffs& c);

}  // namespace alba
