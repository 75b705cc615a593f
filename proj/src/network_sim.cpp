// Implementation of the event-driven pulse-coupled network simulator.
#include "pcosync/network_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <utility>

#include "pcosync/errors.hpp"
#include "pcosync/rng.hpp"

namespace pcosync {
namespace {

// Slack below the exact threshold at which a pulse captures a receiver.
constexpr double kAbsorbSlack = 1e-12;
constexpr std::uint64_t kSaltSessionPhases = 0x7068617365730001ULL;

void validate_config(const CouplingConfig& cfg) {
  if (cfg.n < 1) throw ConfigError("n: need at least one node");
  if (!(cfg.epsilon > 0) || !(cfg.epsilon < 1) || !std::isfinite(cfg.epsilon)) {
    throw ConfigError("epsilon: coupling strength must lie in (0, 1)");
  }
  if (!(cfg.rho >= 0) || !std::isfinite(cfg.rho)) {
    throw ConfigError("rho: refractory hold must be finite and non-negative");
  }
  if (cfg.cycle_cap < 1) throw ConfigError("cycle_cap: must be at least 1");
  if (!cfg.delays.empty()) {
    const std::size_t n = static_cast<std::size_t>(cfg.n);
    if (cfg.delays.size() != n) throw ConfigError("delays: matrix must be n×n");
    for (std::size_t i = 0; i < n; ++i) {
      if (cfg.delays[i].size() != n) throw ConfigError("delays: matrix must be n×n");
      for (std::size_t j = 0; j < n; ++j) {
        const double d = cfg.delays[i][j];
        if (!(d >= 0) || !(d < 0.5) || !std::isfinite(d)) {
          throw ConfigError("delays: entries must lie in [0, 0.5)");
        }
        if (d != cfg.delays[j][i]) throw ConfigError("delays: matrix must be symmetric");
        if (i == j && d != 0) throw ConfigError("delays: diagonal must be zero");
      }
    }
  }
}

}  // namespace

Session::Session(const PhaseFunction& pf, const CouplingConfig& cfg,
                 std::span<const double> initial_phases)
    : pf_(&pf), cfg_(cfg), delayed_(!cfg.delays.empty()) {
  validate_config(cfg_);
  if (initial_phases.size() != static_cast<std::size_t>(cfg_.n)) {
    throw ConfigError("initial_phases: need exactly one phase per node");
  }
  groups_.reserve(initial_phases.size());
  for (std::size_t i = 0; i < initial_phases.size(); ++i) {
    const double phi = initial_phases[i];
    if (!(phi >= 0) || !(phi < 1)) {
      throw ConfigError("initial_phases: entries must lie in [0, 1)");
    }
    groups_.push_back(Group{{static_cast<int>(i)}, phi, 0.0});
  }
  raw_counts_.assign(static_cast<std::size_t>(cfg_.n), 0);
  pulse_kinds_.assign(static_cast<std::size_t>(cfg_.n), {});
  trace_.n = cfg_.n;
  trace_.pulse_times.assign(static_cast<std::size_t>(cfg_.n), {});
  if (cfg_.n == 2 && !delayed_) {
    trace_.cycle_boundary_taus.push_back(
        std::abs(initial_phases[1] - initial_phases[0]));
  }
}

double Session::next_fire_time() const {
  double t = std::numeric_limits<double>::infinity();
  for (const Group& g : groups_) {
    t = std::min(t, now_ + g.hold + (1.0 - g.phase));
  }
  return t;
}

void Session::advance_to(double t) {
  const double dt = t - now_;
  for (Group& g : groups_) {
    const double held = std::min(g.hold, dt);
    g.hold -= held;
    g.phase += dt - held;
  }
  now_ = t;
}

void Session::schedule_jam(double t) {
  if (pending_jam_) throw DomainError("a jam pulse is already pending");
  if (!(t >= now_) || !std::isfinite(t)) {
    throw DomainError("jam pulse must be scheduled at or after the current time");
  }
  pending_jam_ = t;
}

double Session::last_boundary_tau() const {
  if (trace_.cycle_boundary_taus.empty()) {
    throw DomainError("boundary differences are recorded only for two-node zero-delay sessions");
  }
  return trace_.cycle_boundary_taus.back();
}

void Session::fire_group(std::size_t g, EventKind kind) {
  fired_flag_[g] = 1;
  Group& grp = groups_[g];
  for (int m : grp.members) {
    trace_.events.push_back(SessionEvent{now_, m, kind});
    trace_.pulse_times[static_cast<std::size_t>(m)].push_back(now_);
    pulse_kinds_[static_cast<std::size_t>(m)].push_back(kind);
    ++raw_counts_[static_cast<std::size_t>(m)];
    fired_members_.push_back(m);
    if (kind == EventKind::absorbed_fire) absorbed_members_.push_back(m);
  }
  grp.phase = 0.0;
  grp.hold = cfg_.rho;
  if (delayed_) {
    // Propagation: every member's pulse reaches every other node after the
    // pairwise delay (members are singletons in delayed mode).
    for (int m : grp.members) {
      for (int r = 0; r < cfg_.n; ++r) {
        if (r == m) continue;
        arrivals_.push_back(Arrival{now_ + cfg_.delays[static_cast<std::size_t>(m)]
                                               [static_cast<std::size_t>(r)],
                                    r});
        std::push_heap(arrivals_.begin(), arrivals_.end(), std::greater<>());
      }
    }
  }
}

// Delivers one pulse instantaneously to every group that has not fired at
// this instant and is not holding; receivers in ascending lead-member order.
// Absorbed receivers fire immediately and join the cascade queue.
void Session::deliver_instant_pulse(std::vector<std::size_t>& queue) {
  for (std::size_t r = 0; r < groups_.size(); ++r) {
    if (fired_flag_[r] || groups_[r].hold > 0) continue;
    const double state = pf_->value(groups_[r].phase);
    if (state >= 1.0 - cfg_.epsilon - kAbsorbSlack) {
      fire_group(r, EventKind::absorbed_fire);
      queue.push_back(r);
    } else {
      groups_[r].phase = pf_->inverse(state + cfg_.epsilon);
    }
  }
}

void Session::deliver_cascade(const std::vector<std::size_t>& natural_groups,
                              bool jam) {
  std::vector<std::size_t> queue;
  for (std::size_t g : natural_groups) {
    fire_group(g, EventKind::natural_fire);
    queue.push_back(g);
  }
  if (jam) {
    // The jammer's pulse reaches every node instantly, delays notwithstanding.
    deliver_instant_pulse(queue);
  }
  std::size_t head = 0;
  while (head < queue.size()) {
    const std::size_t g = queue[head++];
    if (delayed_) {
      (void)g;  // propagation was enqueued by fire_group
      continue;
    }
    deliver_instant_pulse(queue);
  }
}

void Session::after_instant() {
  const int new_min = *std::min_element(raw_counts_.begin(), raw_counts_.end());
  if (new_min <= completed_cycles_) return;
  const bool all_fired_now =
      fired_members_.size() == static_cast<std::size_t>(cfg_.n);
  for (int c = completed_cycles_ + 1; c <= new_min; ++c) {
    if (all_fired_now && !synced_) {
      synced_ = true;
      trace_.sync_cycle = c;
      sync_absorbed_ = absorbed_members_;
    }
    trace_.sync_indicator.push_back(synced_ ? 1 : 0);
    if (cfg_.n == 2 && !delayed_) {
      double tau = 0;
      for (const Group& g : groups_) tau = std::max(tau, g.phase);
      trace_.cycle_boundary_taus.push_back(tau);
    }
  }
  completed_cycles_ = new_min;
  pending_jam_.reset();  // an undelivered pulse does not carry across cycles
}

void Session::run_one_cycle() {
  if (synced_) return;
  const int target = completed_cycles_ + 1;
  while (completed_cycles_ < target && !synced_) {
    const double t_fire = next_fire_time();
    double t = t_fire;
    if (!arrivals_.empty()) t = std::min(t, arrivals_.front().time);
    bool jam_now = false;
    if (pending_jam_) {
      if (*pending_jam_ < t) {
        t = *pending_jam_;
        jam_now = true;
      } else if (*pending_jam_ == t) {
        pending_jam_.reset();  // collision with a legitimate event: dropped
      }
    }

    std::vector<std::size_t> naturals;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      if (now_ + groups_[g].hold + (1.0 - groups_[g].phase) == t) {
        naturals.push_back(g);
      }
    }
    advance_to(t);
    fired_flag_.assign(groups_.size(), 0);
    fired_members_.clear();
    absorbed_members_.clear();

    if (!naturals.empty()) deliver_cascade(naturals, false);
    while (!arrivals_.empty() && arrivals_.front().time == t) {
      std::pop_heap(arrivals_.begin(), arrivals_.end(), std::greater<>());
      const int r = arrivals_.back().receiver;
      arrivals_.pop_back();
      const std::size_t g = static_cast<std::size_t>(r);  // singleton groups
      if (fired_flag_[g] || groups_[g].hold > 0) continue;
      const double state = pf_->value(groups_[g].phase);
      if (state >= 1.0 - cfg_.epsilon - kAbsorbSlack) {
        fire_group(g, EventKind::absorbed_fire);
      } else {
        groups_[g].phase = pf_->inverse(state + cfg_.epsilon);
      }
    }
    if (jam_now) {
      pending_jam_.reset();
      trace_.events.push_back(SessionEvent{now_, -1, EventKind::jam_pulse});
      trace_.jam_log.push_back(now_);
      deliver_cascade({}, true);
    }

    // Zero-delay mode: everything that fired at this instant merges for good.
    if (!delayed_) {
      std::vector<std::size_t> fired;
      for (std::size_t g = 0; g < groups_.size(); ++g) {
        if (fired_flag_[g]) fired.push_back(g);
      }
      if (fired.size() > 1) {
        Group merged;
        merged.hold = cfg_.rho;
        for (std::size_t g : fired) {
          merged.members.insert(merged.members.end(), groups_[g].members.begin(),
                                groups_[g].members.end());
        }
        std::sort(merged.members.begin(), merged.members.end());
        for (auto it = fired.rbegin(); it != fired.rend(); ++it) {
          groups_.erase(groups_.begin() + static_cast<std::ptrdiff_t>(*it));
        }
        groups_.push_back(std::move(merged));
        std::sort(groups_.begin(), groups_.end(),
                  [](const Group& a, const Group& b) {
                    return a.members.front() < b.members.front();
                  });
      }
    }
    after_instant();
  }
}

Session Session::probe_clone() const {
  Session s;
  s.pf_ = pf_;
  s.cfg_ = cfg_;
  s.delayed_ = delayed_;
  s.now_ = now_;
  s.synced_ = synced_;
  s.completed_cycles_ = completed_cycles_;
  s.groups_ = groups_;
  s.pending_jam_ = pending_jam_;
  s.raw_counts_ = raw_counts_;
  s.arrivals_ = arrivals_;
  s.pulse_kinds_.assign(static_cast<std::size_t>(cfg_.n), {});
  s.trace_.n = cfg_.n;
  s.trace_.pulse_times.assign(static_cast<std::size_t>(cfg_.n), {});
  if (!trace_.cycle_boundary_taus.empty()) {
    s.trace_.cycle_boundary_taus.push_back(trace_.cycle_boundary_taus.back());
  }
  return s;
}

SessionTrace Session::finish() {
  trace_.counts = raw_counts_;
  if (synced_) {
    // Absorptions at the synchronizing instant belong to the next cycle.
    for (int m : sync_absorbed_) --trace_.counts[static_cast<std::size_t>(m)];
    // A node one firing ahead may close the session with a natural pulse in
    // the cycle after the completing one; that cycle never finishes either.
    for (int& c : trace_.counts) c = std::min(c, completed_cycles_);
  }
  trace_.shared_count = completed_cycles_;

  // Local detection: first inter-pulse interval with no outside reception,
  // closed by a natural own pulse. After global sync the next (never
  // simulated) interval is silent by construction.
  trace_.local_sync_cycle.assign(static_cast<std::size_t>(cfg_.n), 0);
  for (int j = 0; j < cfg_.n; ++j) {
    const auto& own = trace_.pulse_times[static_cast<std::size_t>(j)];
    const auto& kinds = pulse_kinds_[static_cast<std::size_t>(j)];
    std::vector<double> other_times;
    for (const SessionEvent& e : trace_.events) {
      if (e.node != j) other_times.push_back(e.time);
    }
    int found = 0;
    for (std::size_t k = 0; k + 1 < own.size() && !found; ++k) {
      const auto lo = std::upper_bound(other_times.begin(), other_times.end(), own[k]);
      const auto hi = std::lower_bound(lo, other_times.end(), own[k + 1]);
      if (lo == hi && kinds[k + 1] == EventKind::natural_fire) {
        found = static_cast<int>(k) + 2;  // ordinal of the closing pulse
      }
    }
    if (!found && synced_ && !own.empty()) {
      found = static_cast<int>(own.size()) + 1;
    }
    trace_.local_sync_cycle[static_cast<std::size_t>(j)] = found;
  }
  return std::move(trace_);
}

SessionTrace simulate_session(const PhaseFunction& pf, const CouplingConfig& cfg,
                              std::span<const double> initial_phases,
                              JammerStrategy* jammer, std::uint64_t session_seed) {
  Session s(pf, cfg, initial_phases);
  if (jammer) jammer->begin_session(session_seed);
  while (!s.synchronized() && s.completed_cycles() < cfg.cycle_cap) {
    if (jammer) {
      if (auto t = jammer->next_pulse_time(s, s.now())) s.schedule_jam(*t);
    }
    s.run_one_cycle();
  }
  return s.finish();
}

EmpiricalDistribution monte_carlo_distribution(
    const PhaseFunction& pf, const CouplingConfig& cfg, std::uint64_t trials,
    std::uint64_t seed, int workers,
    const std::function<std::unique_ptr<JammerStrategy>()>& jammer_factory) {
  validate_config(cfg);
  if (trials < 1) throw ConfigError("trials: need at least one session");
  if (workers < 1) throw ConfigError("workers: need at least one");

  const std::size_t pmf_size = static_cast<std::size_t>(cfg.cycle_cap) + 1;
  struct WorkerTally {
    std::vector<std::uint64_t> counts;
    std::uint64_t failures = 0;
    int max_gap = 0;
  };
  const std::uint64_t w = std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), trials);
  std::vector<WorkerTally> tallies(w);
  const std::uint64_t chunk = (trials + w - 1) / w;

  auto run_range = [&](std::uint64_t lo, std::uint64_t hi, WorkerTally& tally) {
    tally.counts.assign(pmf_size, 0);
    std::unique_ptr<JammerStrategy> strategy =
        jammer_factory ? jammer_factory() : nullptr;
    std::vector<double> phases(static_cast<std::size_t>(cfg.n));
    for (std::uint64_t i = lo; i < hi; ++i) {
      SplitMix64 stream = derive_stream(seed, kSaltSessionPhases, i);
      if (cfg.n == 2) {
        // A two-node session is determined by the leader's phase lead, and
        // the analytic pulse-count model takes that lead uniform. Drawing two
        // absolute phases instead would give the realized lead a triangular
        // density 2(1-x), tilting mass toward small gaps and inflating the
        // one-cycle probability.
        phases[0] = 0.0;
        phases[1] = stream.uniform01();
      } else {
        for (double& phi : phases) phi = stream.uniform01();
      }
      const std::uint64_t session_seed = stream.next_u64();
      SessionTrace trace =
          simulate_session(pf, cfg, phases, strategy.get(), session_seed);
      if (trace.sync_cycle) {
        ++tally.counts[static_cast<std::size_t>(*trace.sync_cycle)];
      } else {
        ++tally.failures;
      }
      tally.max_gap = std::max(tally.max_gap, pairwise_count_gap(trace));
    }
  };

  if (w == 1) {
    run_range(0, trials, tallies[0]);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(w);
    for (std::uint64_t k = 0; k < w; ++k) {
      const std::uint64_t lo = k * chunk;
      const std::uint64_t hi = std::min(trials, lo + chunk);
      threads.emplace_back(run_range, lo, hi, std::ref(tallies[k]));
    }
    for (std::thread& t : threads) t.join();
  }

  EmpiricalDistribution out;
  out.count_by_cycle.assign(pmf_size, 0);
  out.trials = trials;
  for (const WorkerTally& tally : tallies) {
    for (std::size_t i = 0; i < pmf_size; ++i) out.count_by_cycle[i] += tally.counts[i];
    out.failures += tally.failures;
    out.max_pairwise_gap = std::max(out.max_pairwise_gap, tally.max_gap);
  }
  return out;
}

int pairwise_count_gap(const SessionTrace& trace) {
  if (trace.n <= 1) return 0;
  std::vector<int> counts(static_cast<std::size_t>(trace.n), 0);
  int gap = 0;
  auto measure = [&] {
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    gap = std::max(gap, *hi - *lo);
  };
  std::size_t i = 0;
  while (i < trace.events.size()) {
    const double t = trace.events[i].time;
    for (; i < trace.events.size() && trace.events[i].time == t; ++i) {
      if (trace.events[i].node >= 0) {
        ++counts[static_cast<std::size_t>(trace.events[i].node)];
      }
    }
    measure();
  }
  return gap;
}

int full_cycle_index(const SessionTrace& trace, double time) {
  int completed = std::numeric_limits<int>::max();
  for (const auto& times : trace.pulse_times) {
    const auto it = std::lower_bound(times.begin(), times.end(), time);
    completed = std::min(completed, static_cast<int>(it - times.begin()));
  }
  if (trace.pulse_times.empty()) completed = 0;
  return completed + 1;
}

}  // namespace pcosync
