// Two-node cycle maps induced by a phase response function: the post-pulse
// difference map h, the full-cycle return map R = h∘h, their inverses, the
// absorption width, the repelling fixed point, and derivative extrema.
#pragma once

#include <cstddef>

#include "pcosync/phase_function.hpp"

namespace pcosync {

// How map evaluation treats arguments outside the strict open domain.
enum class MapMode {
  strict,   // out-of-domain arguments throw DomainError
  clamped,  // absorption regions map to their limiting boundary values
};

struct DynamicsOptions {
  double bisect_tol = 1e-12;          // argument tolerance for root finding
  std::size_t extremum_grid = 10001;  // scan resolution for derivative extrema
};

// Precomputes the geometry of the two-node dynamics for one (f, ε) pair.
// Immutable after construction; all queries are const and thread-safe.
class DynamicsMaps {
 public:
  // Validates the phase function and ε ∈ (0,1), then computes every derived
  // quantity eagerly so accessors never fail.
  DynamicsMaps(PhaseFunction pf, double epsilon, DynamicsOptions opts = {});

  const PhaseFunction& phase_function() const { return pf_; }
  double epsilon() const { return epsilon_; }
  const DynamicsOptions& options() const { return opts_; }

  // Absorption width 1 - f^{-1}(1-ε): a trailing difference at or below this
  // is captured on the next pulse.
  double delta() const { return delta_; }
  // Preimage h^{-1}(delta): differences at or above it are captured one pulse
  // later. R is strictly defined on (delta, h_inv_delta).
  double h_inv_delta() const { return h_inv_delta_; }
  // Smallest post-pulse difference, h(1) = f^{-1}(ε); lower edge of h's range.
  double min_post_pulse_diff() const { return f_inv_eps_; }
  // Repelling fixed point of R (equivalently of h), interior to the gap.
  double tau_star() const { return tau_star_; }

  // sup |h'| over (delta, 1): worst single-pulse expansion.
  double lambda0() const { return lambda0_; }
  // Reciprocals of sup R' and inf R' over (delta, h_inv_delta); both in (0,1)
  // and lambda1 <= lambda2. Successive gap distances to the boundaries shrink
  // by a factor within [lambda1, lambda2] per full cycle.
  double lambda1() const { return lambda1_; }
  double lambda2() const { return lambda2_; }

  // h(τ) = f^{-1}(ε + f(1-τ)): difference one pulse after a firing with
  // trailing difference τ. Strictly decreasing. Strict domain (delta, 1);
  // clamped: τ ≤ delta → 1 (continuous extension), τ > 1 → 0.
  double firing_map(double tau, MapMode mode = MapMode::strict) const;

  // h^{-1}(y) = 1 - f^{-1}(f(y) - ε); strict domain (f^{-1}(ε), 1).
  double firing_map_inverse(double y) const;

  // R(τ) = h(h(τ)): difference after one full cycle. Strictly increasing,
  // R' > 1. Strict domain (delta, h_inv_delta); clamped: τ ≤ delta → 0
  // (absorbed), τ ≥ h_inv_delta → 1 (continuous extension).
  double return_map(double tau, MapMode mode = MapMode::strict) const;

  // R^{-1}(y) = h^{-1}(h^{-1}(y)); domain [f^{-1}(ε), 1].
  double return_map_inverse(double y) const;

  // Recomputes the repelling fixed point by bisection on h(τ) - τ over
  // [delta, 1] with the given argument tolerance.
  double fixed_point(double tol) const;

 private:
  double h_unchecked(double tau) const;    // valid on [delta, 1]
  double h_inv_unchecked(double y) const;  // valid on [f^{-1}(ε), 1]
  double abs_h_derivative(double tau) const;
  void compute_extrema();

  PhaseFunction pf_;
  double epsilon_ = 0;
  DynamicsOptions opts_;
  double delta_ = 0;
  double h_inv_delta_ = 0;
  double f_inv_eps_ = 0;
  double tau_star_ = 0;
  double lambda0_ = 0;
  double lambda1_ = 0;
  double lambda2_ = 0;
};

}  // namespace pcosync
