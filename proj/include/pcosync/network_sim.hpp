// Event-driven simulator for fully connected pulse-coupled oscillator
// networks: absorption cascades, group merging, optional refractory holds and
// pairwise delays, and injected jammer pulses.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "pcosync/phase_function.hpp"

namespace pcosync {

struct CouplingConfig {
  int n = 2;
  double epsilon = 0.02;
  // Refractory hold: the phase stays at 0 and pulses are ignored for this
  // long after each firing. Zero restores the ideal model.
  double rho = 0.0;
  // Pairwise propagation delays, n×n symmetric with zero diagonal, each in
  // [0, 0.5). Empty means the zero-delay ideal (instant cascades, merging).
  std::vector<std::vector<double>> delays;
  int cycle_cap = 1000;
};

enum class EventKind { natural_fire, absorbed_fire, jam_pulse };

struct SessionEvent {
  double time = 0;
  int node = -1;  // -1 marks jammer pulses
  EventKind kind = EventKind::natural_fire;
};

struct SessionTrace {
  int n = 0;
  // Every physical firing instant per node, ascending, absorption included.
  std::vector<std::vector<double>> pulse_times;
  // Full cycles completed per node when the session ended: at the
  // synchronizing instant, absorptions and natural firings past the
  // completing cycle belong to cycles that never finish and are not counted,
  // so max(counts) equals the shared cycle index at sync.
  std::vector<int> counts;
  // Full-cycle index at which all nodes first fired at one instant, if ever.
  std::optional<int> sync_cycle;
  int shared_count = 0;  // max(counts) when synced; cycles completed otherwise
  // Indicator per completed full cycle (index 0 = cycle 1): 1 once the
  // synchronizing instant has occurred.
  std::vector<std::uint8_t> sync_indicator;
  // Per node: ordinal of the own pulse closing the first inter-pulse interval
  // with no reception from outside the node's merged group (the interval
  // following global sync counts, closed by the never-simulated next pulse).
  // 0 when the session ended without such an interval.
  std::vector<int> local_sync_cycle;
  std::vector<double> jam_log;  // delivered jammer pulse instants
  std::vector<SessionEvent> events;
  // Two-node zero-delay sessions: leading phase difference at each completed
  // cycle boundary; entry 0 is the initial difference, 0 once merged.
  std::vector<double> cycle_boundary_taus;
};

class Session;

// Per-cycle jammer: consulted once at each full-cycle start. Strategies own
// any randomness; begin_session re-seeds them so one instance can serve many
// deterministic sessions.
class JammerStrategy {
 public:
  virtual ~JammerStrategy() = default;
  virtual void begin_session(std::uint64_t /*session_seed*/) {}
  // Returns an absolute pulse instant ≥ now, or nullopt to stay silent this
  // cycle. Instants not reached before the cycle completes are dropped.
  virtual std::optional<double> next_pulse_time(const Session& session,
                                                double now) = 0;
};

// One network evolving in time. Value-semantic: copies are independent clones
// sharing only the immutable phase function, which must outlive them.
class Session {
 public:
  Session(const PhaseFunction& pf, const CouplingConfig& cfg,
          std::span<const double> initial_phases);

  // True once every node has fired at a single instant (zero-delay: the whole
  // network merged into one group).
  bool synchronized() const { return synced_; }
  int completed_cycles() const { return completed_cycles_; }
  double now() const { return now_; }
  int node_count() const { return cfg_.n; }
  int group_count() const { return static_cast<int>(groups_.size()); }
  // Latest cycle-boundary difference record (two-node zero-delay sessions).
  double last_boundary_tau() const;

  // Queues one jammer pulse at absolute time t ≥ now; at most one may be
  // pending, and a pulse still pending when the cycle completes is dropped.
  void schedule_jam(double t);

  // Advances until the full-cycle count increments (or immediately returns if
  // already synchronized).
  void run_one_cycle();

  // Finalizes counts and local detection and surrenders the trace.
  SessionTrace finish();

  // Copy carrying only the dynamic state (groups, clocks, counters, pending
  // arrivals), not the accumulated trace: what-if cycle probes stay O(1) in
  // session length.
  Session probe_clone() const;

 private:
  Session() = default;

  struct Group {
    std::vector<int> members;  // ascending; front() orders deliveries
    double phase = 0;
    double hold = 0;  // remaining refractory time
  };

  void advance_to(double t);
  void deliver_cascade(const std::vector<std::size_t>& natural_groups, bool jam);
  void deliver_instant_pulse(std::vector<std::size_t>& queue);
  void fire_group(std::size_t g, EventKind kind);
  void after_instant();
  double next_fire_time() const;

  const PhaseFunction* pf_ = nullptr;
  CouplingConfig cfg_;
  bool delayed_ = false;
  double now_ = 0;
  bool synced_ = false;
  int completed_cycles_ = 0;
  std::vector<Group> groups_;
  std::optional<double> pending_jam_;
  std::vector<int> raw_counts_;
  std::vector<std::vector<EventKind>> pulse_kinds_;  // parallel to pulse_times
  std::vector<int> sync_absorbed_;        // absorbed at the synchronizing instant
  std::vector<char> fired_flag_;          // per group, scratch within an instant
  std::vector<int> fired_members_;        // nodes that fired at the instant
  std::vector<int> absorbed_members_;     // subset that fired by absorption
  struct Arrival {
    double time;
    int receiver;
    bool operator>(const Arrival& o) const {
      return time != o.time ? time > o.time : receiver > o.receiver;
    }
  };
  std::vector<Arrival> arrivals_;  // min-heap via std::push_heap/greater
  SessionTrace trace_;
};

// Runs a full session: consults the jammer (if any) once per cycle, stops at
// synchronization or the cycle cap. session_seed is forwarded to the
// strategy's begin_session; the dynamics themselves are deterministic.
SessionTrace simulate_session(const PhaseFunction& pf, const CouplingConfig& cfg,
                              std::span<const double> initial_phases,
                              JammerStrategy* jammer = nullptr,
                              std::uint64_t session_seed = 0);

struct EmpiricalDistribution {
  // count_by_cycle[m] = sessions that synchronized at full cycle m (index 0
  // unused); sized cycle_cap + 1.
  std::vector<std::uint64_t> count_by_cycle;
  std::uint64_t failures = 0;  // sessions that hit the cap
  std::uint64_t trials = 0;
  int max_pairwise_gap = 0;  // largest instantaneous count spread observed
};

// Independent sessions with uniform random initial phases; two-node sessions
// draw the leader's phase lead uniformly (the configuration {0, tau} that the
// analytic pulse-count distribution models) rather than two absolute phases,
// whose gap would be triangular, not uniform. Deterministic for a given seed
// regardless of worker count: session i draws its phases and strategy seed
// from a stream derived from (seed, i).
EmpiricalDistribution monte_carlo_distribution(
    const PhaseFunction& pf, const CouplingConfig& cfg, std::uint64_t trials,
    std::uint64_t seed, int workers = 1,
    const std::function<std::unique_ptr<JammerStrategy>()>& jammer_factory = {});

// Largest |count_i - count_j| over all node pairs at any instant of the trace.
int pairwise_count_gap(const SessionTrace& trace);

// Index of the full cycle in progress at the given time: cycle i runs from
// the instant every node has fired i-1 times through the instant every node
// has fired i times (inclusive on the right).
int full_cycle_index(const SessionTrace& trace, double time);

}  // namespace pcosync
