// Jammer-perturbed cycle analysis: the three worst-case one-cycle maps, the
// per-cycle difference envelope, perturbed fixed points, the guaranteed-
// synchronization region, and concrete jammer strategies for the simulator.
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pcosync/coupling_dynamics.hpp"
#include "pcosync/network_sim.hpp"
#include "pcosync/rng.hpp"

namespace pcosync {

struct JamMapValues {
  double outer = 0;      // h(λ·h(τ)): pulse between the two legitimate firings
  double scaled = 0;     // λ·R(τ), capped at 1: pulse after the full cycle map
  double stretched = 0;  // R(λ·τ): pulse before the cycle's first firing
};

// The three one-cycle maps a single jammer pulse can produce, evaluated with
// the clamped boundary conventions so every τ ∈ [0, 1] and λ > 1 is total.
JamMapValues jam_maps(const DynamicsMaps& dm, double lambda, double tau);

struct JamInterval {
  double lo = 0;
  double hi = 0;
};

// Envelope for the next cycle-boundary difference when at most one jammer
// pulse lands in the cycle. The base interval [h(λ0·h(τ)), max{R(λ0·τ),
// λ0·R(τ)}] covers a pulse that finds both nodes below threshold; a pulse
// landing inside the leading node's absorption width triggers its firing and
// stacks a second advance on the laggard in the same instant, so each end is
// widened by the stacked-advance extreme (inactive away from the absorption
// edges). Contains the unjammed R(τ). Both clamped maps treat a boundary hit
// as 0 or 1, which are the same synchronized state on the circle.
JamInterval jam_interval(const DynamicsMaps& dm, double tau);

struct JamFixedPoints {
  bool exists = false;   // true iff R(λ·δ) < δ, the unique-repeller condition
  double stretched = 0;  // τ*_λ with R(λ·τ*_λ) = τ*_λ
  double scaled = 0;     // fixed point of λ·R, equal to λ·τ*_λ
  double outer = 0;      // fixed point of h(λ·h(·)), equal to h^{-1}(τ*_λ)
  std::string note;      // diagnosis when exists is false
};

// Fixed points of the three perturbed maps: τ*_λ by bisection, the other two
// through the scaling identities, each verified by direct evaluation.
JamFixedPoints jam_fixed_points(const DynamicsMaps& dm, double lambda, double tol);

struct SafeRegion {
  double window_lo = 0;  // τ*_λ0
  double window_hi = 0;  // h^{-1}(τ*_λ0)
  double sync_probability_bound = 0;  // 1 - (window_hi - window_lo)
};

// Initial differences outside (window_lo, window_hi) synchronize despite any
// one-pulse-per-cycle jammer of strength bounded by λ0; a uniform random
// difference does so with at least the reported probability. Throws
// HypothesisError when R(λ0·δ) ≥ δ and no unique perturbed repeller exists.
SafeRegion safe_region(const DynamicsMaps& dm, double tol = 1e-12);

// Runs one full cycle of a two-node zero-delay session from difference tau,
// optionally injecting one jammer pulse at the given absolute time (the
// session starts at time 0), and returns the difference at the cycle
// boundary; 0 means the pair merged.
double jammed_cycle_difference(const PhaseFunction& pf, const CouplingConfig& cfg,
                               double tau, std::optional<double> jam_time);

class NoJammer final : public JammerStrategy {
 public:
  std::optional<double> next_pulse_time(const Session&, double) override {
    return std::nullopt;
  }
};

// One pulse per cycle at a uniform offset within [now, now + span); offsets
// past the cycle's completion are dropped by the engine, so late draws jam
// nothing.
class UniformRandomJammer final : public JammerStrategy {
 public:
  explicit UniformRandomJammer(double span = 1.0);
  void begin_session(std::uint64_t session_seed) override;
  std::optional<double> next_pulse_time(const Session& session, double now) override;

 private:
  double span_;
  SplitMix64 rng_;
};

// Greedy per-cycle worst case for two-node sessions: clones the session for
// each candidate offset on a fixed grid, runs the cycle, and keeps the offset
// whose resulting boundary difference sits deepest inside the non-absorbing
// gap (merging scores worst). Deterministic; no randomness involved.
class AdversarialGridJammer final : public JammerStrategy {
 public:
  explicit AdversarialGridJammer(const DynamicsMaps& dm, int grid_points = 512);
  std::optional<double> next_pulse_time(const Session& session, double now) override;

 private:
  const DynamicsMaps* dm_;
  int grid_points_;
};

}  // namespace pcosync
