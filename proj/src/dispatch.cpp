#include "alba/dispatch.hpp"

#include <algorithm>
#include <cmath>

namespace alba {

std::vector<double> pod_probs(const FluidState& x, int d) {
  if (d < 1) throw ValidationError("pod_probs: d must be >= 1");
  const double y0 = x.y0();
  if (y0 <= kRegimeEps) return {};
  const int top = x.top();
  std::vector<double> f(top + 1, 0.0);
  // Suffix sums y_i, normalized once by y0 so y_i^d stays well scaled.
  std::vector<double> ynorm(top + 2, 0.0);
  long double acc = 0.0L;
  for (int i = top; i >= 0; --i) {
    acc += x.warm(i);
    ynorm[i] = static_cast<double>(acc) / y0;
  }
  for (int i = 0; i <= top; ++i) {
    const double a = std::pow(ynorm[i], d);
    const double b = std::pow(ynorm[i + 1], d);
    f[i] = std::max(a - b, 0.0);
  }
  return f;
}

std::vector<double> jbt_probs(const FluidState& x, int d) {
  if (d < 0) throw ValidationError("jbt_probs: d must be >= 0");
  const double y0 = x.y0();
  if (y0 <= kRegimeEps) return {};
  const int top = x.top();
  std::vector<double> f(top + 1, 0.0);
  long double below = 0.0L;
  for (int k = 0; k <= std::min(d, top); ++k) below += x.warm(k);
  if (static_cast<double>(below) > 0.0) {
    const double w = static_cast<double>(below);
    for (int i = 0; i <= std::min(d, top); ++i) f[i] = x.warm(i) / w;
  } else {
    for (int i = 0; i <= top; ++i) f[i] = x.warm(i) / y0;
  }
  return f;
}

std::vector<double> fluid_rates_pod(const FluidState& x, const Params& p) {
  const int top = x.top();
  std::vector<double> h(top, 0.0);
  if (x.y0() > kRegimeEps) {
    const std::vector<double> f = pod_probs(x, p.d);
    for (int i = 0; i < top; ++i) h[i] = p.lambda * f[i];
  } else {
    std::fill(h.begin(), h.end(), std::min(p.beta * x.x01(), p.lambda));
  }
  return h;
}

std::vector<double> fluid_rates_jbt(const FluidState& x, const Params& p) {
  const int top = x.top();
  const int d = p.d;
  std::vector<double> h(top, 0.0);
  const double y0 = x.y0();
  if (y0 > kRegimeEps) {
    long double below_acc = 0.0L;
    for (int k = 0; k <= std::min(d, top); ++k) below_acc += x.warm(k);
    const double below = static_cast<double>(below_acc);
    if (below > kRegimeEps) {
      for (int i = 0; i <= std::min(d, top - 1); ++i)
        h[i] = p.lambda * x.warm(i) / below;
    } else {
      const double xd1 = x.warm(d + 1);
      const double influx = xd1 + (d + 1) * p.beta * x.x01();
      const double gate = influx <= p.lambda ? 1.0 : 0.0;
      for (int i = 0; i <= std::min(d, top - 1); ++i)
        h[i] = (p.beta * x.x01() + (i == d ? xd1 : 0.0)) * gate;
      const double surplus = std::max(p.lambda - influx, 0.0);
      for (int i = d + 1; i < top; ++i) h[i] = x.warm(i) / y0 * surplus;
    }
  } else {
    std::fill(h.begin(), h.end(), std::min(p.beta * x.x01(), p.lambda));
  }
  return h;
}

std::vector<double> fluid_rates(const FluidState& x, const Params& p) {
  return p.dispatch == Dispatch::PowerOfD ? fluid_rates_pod(x, p)
                                          : fluid_rates_jbt(x, p);
}

namespace {

/// Class of the k-th warm server (0-based) under the natural ordering by
/// queue length.
int class_of(const std::vector<std::int64_t>& warm, std::int64_t k) {
  for (std::size_t i = 0; i < warm.size(); ++i) {
    if (k < warm[i]) return static_cast<int>(i);
    k -= warm[i];
  }
  return static_cast<int>(warm.size()) - 1;  // unreachable for valid k
}

}  // namespace

DispatchResult sample_dispatch(const CountState& n, const DispatchKernel& k,
                               Rng& rng) {
  const auto& warm = n.warm();
  std::int64_t warm_total = 0;
  for (std::int64_t v : warm) warm_total += v;
  if (warm_total == 0) return {DispatchResult::Kind::Lost};

  int cls = -1;
  if (k.discipline == Dispatch::PowerOfD) {
    std::uniform_int_distribution<std::int64_t> pick(0, warm_total - 1);
    cls = class_of(warm, pick(rng));
    for (int j = 1; j < k.d; ++j)
      cls = std::min(cls, class_of(warm, pick(rng)));
  } else {
    std::int64_t below = 0;
    for (int i = 0; i <= std::min<int>(k.d, n.top()); ++i) below += warm[i];
    if (below > 0) {
      std::uniform_int_distribution<std::int64_t> pick(0, below - 1);
      cls = class_of(warm, pick(rng));
    } else {
      std::uniform_int_distribution<std::int64_t> pick(0, warm_total - 1);
      cls = class_of(warm, pick(rng));
    }
  }
  if (k.buffer != kInfiniteBuffer && cls >= k.buffer)
    return {DispatchResult::Kind::Rejected, cls};
  return {DispatchResult::Kind::Assigned, cls};
}

}  // namespace alba
