#include "alba/ctmc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "alba/fluid.hpp"

namespace alba {

void SimConfig::validate() const {
  if (N < 1) throw ValidationError("sim.N: must be >= 1");
  if (!(horizon > 0.0)) throw ValidationError("sim.horizon: must be > 0");
  if (!(sample_dt > 0.0)) throw ValidationError("sim.sample_dt: must be > 0");
  if (replications < 1)
    throw ValidationError("sim.replications: must be >= 1");
}

/// Gillespie loop over aggregated counts. Exchangeability makes the
/// count vector a sufficient state, so one event costs O(B) at worst
/// (prefix walks for class selection).
class CtmcRunner {
 public:
  static Trajectory run(const Params& p, const ScalingRule& rule,
                        const SimConfig& cfg, const CountState& x0,
                        const EventObserver& observer) {
    cfg.validate();
    if (x0.N() != cfg.N)
      throw ValidationError("sim.N does not match the initial counts");
    if (!p.infinite_buffer() && x0.top() > p.buffer) {
      for (int i = p.buffer + 1; i <= x0.top(); ++i)
        if (x0.warm(i) != 0)
          throw ValidationError(
              "initial counts hold servers beyond the finite buffer");
    }

    CountState n = x0;
    if (!p.infinite_buffer() &&
        static_cast<int>(n.warm_.size()) < p.buffer + 1)
      n.warm_.resize(p.buffer + 1, 0);

    const DispatchKernel kernel = DispatchKernel::from(p);
    Rng rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const double N = static_cast<double>(cfg.N);
    const double arrival_rate = p.lambda * N;
    const double clock_rate = p.alpha * N;

    std::int64_t busy = 0;
    for (int i = 1; i <= n.top(); ++i) busy += n.warm_[i];

    Trajectory traj;
    traj.stop = StopReason::Horizon;
    double t = 0.0;
    double next_sample = 0.0;
    std::uint64_t events = 0;

    auto record_through = [&](double limit) {
      while (next_sample <= limit + 1e-12 && next_sample <= cfg.horizon) {
        const FluidState x = n.to_fluid();
        const double g = rule(x);
        traj.times.push_back(next_sample);
        traj.states.push_back(x);
        traj.g_values.push_back(g);
        traj.regimes.push_back(regime_for_g(x, p, g));
        next_sample += cfg.sample_dt;
      }
    };

    for (;;) {
      const double total_rate = arrival_rate + static_cast<double>(busy) +
                                clock_rate + p.beta * static_cast<double>(n.n01_) +
                                p.gamma * static_cast<double>(n.warm_[0]);
      const double dt = std::exponential_distribution<double>(total_rate)(rng);
      const double t_next = t + dt;
      if (t_next >= cfg.horizon) {
        record_through(cfg.horizon);
        break;
      }
      record_through(t_next);

      double u = unit(rng) * total_rate;
      SimEvent ev;
      int dep_class = -1;
      if (u < arrival_rate) {
        ev = SimEvent::Arrival;
      } else if ((u -= arrival_rate) < static_cast<double>(busy)) {
        ev = SimEvent::Departure;
        std::int64_t pick = static_cast<std::int64_t>(u);
        pick = std::min(pick, busy - 1);
        for (int i = 1; i <= n.top(); ++i) {
          if (pick < n.warm_[i]) {
            dep_class = i;
            break;
          }
          pick -= n.warm_[i];
        }
      } else if ((u -= static_cast<double>(busy)) < clock_rate) {
        if (n.n00_ > 0 && unit(rng) < rule(n.to_fluid()))
          ev = SimEvent::ScaleSuccess;
        else
          ev = SimEvent::ScaleNoop;
      } else if ((u -= clock_rate) < p.beta * static_cast<double>(n.n01_)) {
        ev = SimEvent::InitComplete;
      } else {
        ev = SimEvent::Expiration;
      }

      if (observer) observer(t, t_next, n, ev);

      switch (ev) {
        case SimEvent::Arrival: {
          ++traj.events.arrivals;
          const DispatchResult r = sample_dispatch(n, kernel, rng);
          if (r.kind == DispatchResult::Kind::Lost) {
            ++traj.events.lost;
          } else if (r.kind == DispatchResult::Kind::Rejected) {
            ++traj.events.rejected;
          } else {
            if (r.target + 1 > n.top()) n.warm_.push_back(0);
            --n.warm_[r.target];
            ++n.warm_[r.target + 1];
            if (r.target == 0) ++busy;
          }
          break;
        }
        case SimEvent::Departure:
          ++traj.events.departures;
          --n.warm_[dep_class];
          ++n.warm_[dep_class - 1];
          if (dep_class == 1) --busy;
          break;
        case SimEvent::ScaleSuccess:
          ++traj.events.scale_success;
          --n.n00_;
          ++n.n01_;
          break;
        case SimEvent::ScaleNoop:
          ++traj.events.scale_noop;
          break;
        case SimEvent::InitComplete:
          ++traj.events.init_complete;
          --n.n01_;
          ++n.warm_[0];
          break;
        case SimEvent::Expiration:
          ++traj.events.expirations;
          --n.warm_[0];
          ++n.n00_;
          break;
      }
      t = t_next;
      ++events;
      if (cfg.max_events > 0 && events >= cfg.max_events) {
        traj.stop = StopReason::MaxEvents;
        record_through(t);
        break;
      }
    }
    return traj;
  }
};

Trajectory run(const Params& p, const ScalingRule& rule, const SimConfig& cfg,
               const CountState& x0, const EventObserver& observer) {
  return CtmcRunner::run(p, rule, cfg, x0, observer);
}

namespace {

int worker_cap() {
  if (const char* env = std::getenv("ALBA_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

ReplicatedTrajectory replicate(const Params& p, const ScalingRule& rule,
                               const SimConfig& cfg, const CountState& x0) {
  cfg.validate();
  const int reps = cfg.replications;
  std::vector<Trajectory> runs(reps);

  const int workers = std::min(reps, worker_cap());
  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= reps) return;
      SimConfig one = cfg;
      one.replications = 1;
      one.seed = cfg.seed + static_cast<std::uint64_t>(r);
      runs[r] = CtmcRunner::run(p, rule, one, x0, nullptr);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  // Aggregate on the common prefix of the sample grids (replications can
  // stop early only under a max_events budget).
  std::size_t len = runs[0].times.size();
  int top = 0;
  for (const Trajectory& tr : runs) {
    len = std::min(len, tr.times.size());
    for (const FluidState& s : tr.states) top = std::max(top, s.top());
  }

  ReplicatedTrajectory out;
  out.per_replication.reserve(reps);
  for (const Trajectory& tr : runs) {
    out.per_replication.push_back(tr.events);
    out.mean.events.arrivals += tr.events.arrivals;
    out.mean.events.lost += tr.events.lost;
    out.mean.events.rejected += tr.events.rejected;
    out.mean.events.departures += tr.events.departures;
    out.mean.events.scale_success += tr.events.scale_success;
    out.mean.events.scale_noop += tr.events.scale_noop;
    out.mean.events.init_complete += tr.events.init_complete;
    out.mean.events.expirations += tr.events.expirations;
    if (tr.stop == StopReason::MaxEvents) out.mean.stop = StopReason::MaxEvents;
  }

  const double inv = 1.0 / reps;
  for (std::size_t k = 0; k < len; ++k) {
    double m00 = 0.0, m01 = 0.0;
    std::vector<double> mwarm(top + 1, 0.0);
    for (const Trajectory& tr : runs) {
      m00 += tr.states[k].x00();
      m01 += tr.states[k].x01();
      for (int i = 0; i <= tr.states[k].top(); ++i)
        mwarm[i] += tr.states[k].warm(i);
    }
    m00 *= inv;
    m01 *= inv;
    for (double& v : mwarm) v *= inv;

    auto sd_of = [&](auto&& extract, double mean_v) {
      if (reps < 2) return 0.0;
      double acc = 0.0;
      for (const Trajectory& tr : runs) {
        const double d = extract(tr.states[k]) - mean_v;
        acc += d * d;
      }
      return std::sqrt(acc / (reps - 1));
    };
    out.sd_x00.push_back(sd_of([](const FluidState& s) { return s.x00(); }, m00));
    out.sd_x01.push_back(sd_of([](const FluidState& s) { return s.x01(); }, m01));
    out.sd_x02.push_back(
        sd_of([](const FluidState& s) { return s.warm(0); }, mwarm[0]));
    double my1 = 0.0;
    for (int i = 1; i <= top; ++i) my1 += mwarm[i];
    out.sd_y1.push_back(sd_of([](const FluidState& s) { return s.y1(); }, my1));

    FluidState mean_state = FluidState::unchecked(m00, m01, std::move(mwarm));
    const double g = rule(mean_state);
    out.mean.times.push_back(runs[0].times[k]);
    out.mean.g_values.push_back(g);
    out.mean.regimes.push_back(regime_for_g(mean_state, p, g));
    out.mean.states.push_back(std::move(mean_state));
  }
  return out;
}

}  // namespace alba
