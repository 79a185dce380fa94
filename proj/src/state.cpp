#include "alba/state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace alba {

std::string to_string(Dispatch d) {
  return d == Dispatch::PowerOfD ? "pod" : "jbt";
}

Params::Params(double lambda, double alpha, double beta, double gamma, int d,
               int buffer, Dispatch dispatch)
    : lambda(lambda),
      alpha(alpha),
      beta(beta),
      gamma(gamma),
      d(d),
      buffer(buffer),
      dispatch(dispatch) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw ValidationError("params.lambda: must lie in (0,1)");
  if (!(alpha > 0.0)) throw ValidationError("params.alpha: must be > 0");
  if (!(beta > 0.0)) throw ValidationError("params.beta: must be > 0");
  if (!(gamma > 0.0)) throw ValidationError("params.gamma: must be > 0");
  if (dispatch == Dispatch::PowerOfD && d < 1)
    throw ValidationError("params.d: must be >= 1 for pod dispatch");
  if (dispatch == Dispatch::JBT && d < 0)
    throw ValidationError("params.d: must be >= 0 for jbt dispatch");
  if (buffer != kInfiniteBuffer && buffer <= d)
    throw ValidationError("params.buffer: must be > d (or \"inf\")");
  if (buffer != kInfiniteBuffer && buffer < 1)
    throw ValidationError("params.buffer: must be >= 1");
}

namespace {

void check_simplex(double x00, double x01, const std::vector<double>& warm) {
  if (warm.empty())
    throw ValidationError("fluid state: warm vector must not be empty");
  auto bad = [](double v) { return !(v >= 0.0) || std::isnan(v); };
  if (bad(x00) || bad(x01))
    throw ValidationError("fluid state: coordinates must be >= 0");
  long double mass = static_cast<long double>(x00) + x01;
  for (double v : warm) {
    if (bad(v)) throw ValidationError("fluid state: coordinates must be >= 0");
    mass += v;
  }
  if (std::fabs(static_cast<double>(mass) - 1.0) > kMassTol) {
    std::ostringstream os;
    os << "fluid state: mass " << static_cast<double>(mass)
       << " differs from 1 by more than " << kMassTol;
    throw ValidationError(os.str());
  }
}

double warm_sum(const std::vector<double>& warm) {
  long double s = 0.0L;
  for (double v : warm) s += v;
  return static_cast<double>(s);
}

}  // namespace

FluidState::FluidState(double cold, double initializing,
                       std::vector<double> warm)
    : x00_(cold), x01_(initializing), warm_(std::move(warm)) {
  // Snap rounding-level negatives to zero before validating.
  auto snap = [](double& v) {
    if (v < 0.0 && v > -1e-12) v = 0.0;
  };
  snap(x00_);
  snap(x01_);
  for (double& v : warm_) snap(v);
  check_simplex(x00_, x01_, warm_);
  y0_ = warm_sum(warm_);
}

FluidState::FluidState(Unchecked, double cold, double initializing,
                       std::vector<double> warm)
    : x00_(cold),
      x01_(initializing),
      warm_(std::move(warm)),
      y0_(warm_sum(warm_)) {}

FluidState FluidState::unchecked(double cold, double initializing,
                                 std::vector<double> warm) {
  return FluidState(Unchecked{}, cold, initializing, std::move(warm));
}

FluidState FluidState::all_cold(int top) {
  return FluidState(1.0, 0.0, std::vector<double>(top + 1, 0.0));
}

FluidState FluidState::minimal_dimensioning(double lambda, int top) {
  std::vector<double> warm(top + 1, 0.0);
  warm[0] = lambda;
  return FluidState(1.0 - lambda, 0.0, std::move(warm));
}

FluidState FluidState::optimal(double lambda, int top) {
  if (top < 1) throw ValidationError("optimal state needs top >= 1");
  std::vector<double> warm(top + 1, 0.0);
  warm[1] = lambda;
  return FluidState(1.0 - lambda, 0.0, std::move(warm));
}

double FluidState::y(int i) const {
  if (i <= 0) return y0_;
  long double s = 0.0L;
  for (int k = i; k < static_cast<int>(warm_.size()); ++k) s += warm_[k];
  return static_cast<double>(s);
}

FluidState FluidState::padded(int top) const {
  std::vector<double> warm = warm_;
  if (top + 1 > static_cast<int>(warm.size())) warm.resize(top + 1, 0.0);
  return FluidState(Unchecked{}, x00_, x01_, std::move(warm));
}

CountState::CountState(std::int64_t cold, std::int64_t initializing,
                       std::vector<std::int64_t> warm, std::int64_t N)
    : n00_(cold), n01_(initializing), warm_(std::move(warm)), N_(N) {
  if (N_ < 1) throw ValidationError("count state: N must be >= 1");
  if (warm_.empty())
    throw ValidationError("count state: warm vector must not be empty");
  std::int64_t sum = n00_ + n01_;
  if (n00_ < 0 || n01_ < 0)
    throw ValidationError("count state: counts must be >= 0");
  for (std::int64_t v : warm_) {
    if (v < 0) throw ValidationError("count state: counts must be >= 0");
    sum += v;
  }
  if (sum != N_)
    throw ValidationError("count state: counts sum to " + std::to_string(sum) +
                          ", expected N = " + std::to_string(N_));
}

CountState CountState::from_fractions(const FluidState& x, std::int64_t N) {
  // Largest-remainder rounding keeps the exact-sum invariant.
  std::vector<double> target;
  target.push_back(x.x00() * N);
  target.push_back(x.x01() * N);
  for (double v : x.warm()) target.push_back(v * N);
  std::vector<std::int64_t> counts(target.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    counts[i] = static_cast<std::int64_t>(std::floor(target[i]));
    assigned += counts[i];
  }
  std::vector<std::size_t> order(target.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return target[a] - std::floor(target[a]) > target[b] - std::floor(target[b]);
  });
  for (std::size_t k = 0; assigned < N; ++k, ++assigned) counts[order[k]] += 1;
  std::vector<std::int64_t> warm(counts.begin() + 2, counts.end());
  return CountState(counts[0], counts[1], std::move(warm), N);
}

FluidState CountState::to_fluid() const {
  const double inv = 1.0 / static_cast<double>(N_);
  std::vector<double> warm(warm_.size());
  for (std::size_t i = 0; i < warm_.size(); ++i)
    warm[i] = static_cast<double>(warm_[i]) * inv;
  return FluidState::unchecked(static_cast<double>(n00_) * inv,
                               static_cast<double>(n01_) * inv,
                               std::move(warm));
}

void PowerCoeffs::validate() const {
  if (c01 < 0 || c02 < 0 || c12 < 0 || kappa1 < 0 || kappa2 < 0)
    throw ValidationError("power coefficients must be >= 0");
}

double weighted_distance(const FluidState& a, const FluidState& b) {
  long double s = 0.0L;
  double d00 = a.x00() - b.x00();
  double d01 = a.x01() - b.x01();
  s += static_cast<long double>(d00) * d00;          // weight 2^-(0+0)
  s += static_cast<long double>(d01) * d01 * 0.5L;   // weight 2^-(0+1)
  const int top = std::max(a.top(), b.top());
  for (int i = 0; i <= top; ++i) {
    const double di = a.warm(i) - b.warm(i);
    s += static_cast<long double>(di) * di * std::ldexp(1.0, -(i + 2));
  }
  return std::sqrt(static_cast<double>(s));
}

namespace {
double job_sum(const FluidState& x) {
  long double s = 0.0L;
  for (int i = 1; i <= x.top(); ++i) s += static_cast<long double>(i) * x.warm(i);
  return static_cast<double>(s);
}
}  // namespace

double per_warm_queue(const FluidState& x) {
  if (x.y0() <= 0.0)
    throw UndefinedMetricError("per_warm_queue: no warm servers (y0 = 0)");
  return job_sum(x) / x.y0();
}

double per_busy_queue(const FluidState& x) {
  if (x.y1() <= 0.0)
    throw UndefinedMetricError("per_busy_queue: no busy servers (y1 = 0)");
  return job_sum(x) / x.y1();
}

double total_jobs(const FluidState& x) { return job_sum(x); }

double power(const FluidState& x, const PowerCoeffs& c) {
  return c.c01 * x.x01() + c.c02 * x.warm(0) + c.c12 * x.y1();
}

}  // namespace alba
