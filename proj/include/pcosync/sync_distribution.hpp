// Analytic distribution of the two-node synchronization cycle count: boundary
// sequences converging to the repeller, per-cycle probabilities, the entropy
// sandwich, and the initial-difference classifier.
#pragma once

#include <span>
#include <utility>
#include <vector>

#include "pcosync/coupling_dynamics.hpp"

namespace pcosync {

// Distribution of the full-cycle index M at which a two-node session with a
// uniformly random initial difference synchronizes. M = i exactly when the
// initial difference lies in [tau_lower[i-1], tau_lower[i]] or
// [tau_upper[i], tau_upper[i-1]].
struct PulseCountDistribution {
  std::vector<double> tau_lower;  // 0, delta, R^{-1}(delta), ... ↑ tau_star
  std::vector<double> tau_upper;  // 1, h^{-1}(delta), ...        ↓ tau_star
  std::vector<double> probs;      // probs[i-1] = Pr{M = i}
  double tail_mass = 0;           // Pr{M > probs.size()}, the unresolved core
  double tau_star = 0;
  double lambda1 = 0;             // envelope ratios copied from the dynamics
  double lambda2 = 0;
  double tol = 0;                 // convergence tolerance the sequences met
};

// Extends both boundary sequences by return-map preimages until each is within
// tol of the fixed point. Returns (tau_lower, tau_upper), equal lengths.
std::pair<std::vector<double>, std::vector<double>> boundary_sequences(
    const DynamicsMaps& dm, double tol = 1e-10);

PulseCountDistribution pulse_count_distribution(const DynamicsMaps& dm,
                                                double tol = 1e-10);

// Analytic classifier: the cycle index at which a two-node session started at
// difference tau synchronizes. Resolves differences beyond the precomputed
// sequences by forward return-map iteration; throws NonSyncError inside the
// floating-point-ambiguous core around the fixed point.
int classify_initial_tau(const DynamicsMaps& dm, const PulseCountDistribution& dist,
                         double tau);
// Convenience overload computing the distribution internally.
int classify_initial_tau(const DynamicsMaps& dm, double tau);

// Shannon entropy in bits of a (sub-)probability vector.
double shannon_entropy_bits(std::span<const double> pmf);

struct EntropyResult {
  double bits = 0;             // entropy of the resolved probabilities
  double tail_bound_bits = 0;  // certified cap on the discarded tail's share
};

// Entropy of M with a geometric-envelope bound on the truncation error.
EntropyResult entropy(const PulseCountDistribution& dist);

struct EntropyBounds {
  double lower_bits = 0;
  double upper_bits = 0;
};

// Closed-form sandwich for H(M) built from the envelope ratios alone, peeling
// off leading probabilities above 1/e where -x·log x stops being monotone.
EntropyBounds entropy_bounds(const DynamicsMaps& dm);

// Distribution of min(M, m_tilde): entries for 1..m_tilde, the last absorbing
// all mass at or beyond m_tilde. Sums to 1.
std::vector<double> truncated_session_distribution(const PulseCountDistribution& dist,
                                                   int m_tilde);

}  // namespace pcosync
