// Three-terminal secrecy analysis: an eavesdropper sees the per-cycle
// synchronization indicator through a binary symmetric channel; this module
// computes her exact and sampled equivocation about the sync cycle count, a
// closed-form key-rate lower bound, and the public reconciliation protocol.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pcosync/rng.hpp"

namespace pcosync {

// Indicator bits S_1..S_m_tilde for a session that synchronized at cycle m:
// zero strictly before position m, one from m on. Requires 1 ≤ m ≤ m_tilde.
std::vector<std::uint8_t> indicator_sequence(int m, int m_tilde);

// Z = S with each bit independently flipped with probability p ∈ (0, 0.5].
std::vector<std::uint8_t> sample_eve_observation(std::span<const std::uint8_t> s,
                                                 double p, SplitMix64& rng);

// Pr{Z = z | M = m}: product of (1-p) over bits matching indicator_sequence(m)
// and p over mismatches.
double likelihood(std::span<const std::uint8_t> z, int m, double p);

// Exhaustively verifies likelihood(z,m1)/likelihood(z,m2) ≥
// (p/(1-p))^|m1-m2| over all 2^m_tilde observations. Requires m_tilde ≤ 20.
bool likelihood_ratio_check(int m1, int m2, double p, int m_tilde);

// H(M|Z) in bits by full enumeration over z; dist is the pmf of M over
// {1..m_tilde} with m_tilde = dist.size() ≤ 20. Valid for p ∈ (0, 0.5].
double conditional_entropy_exact(std::span<const double> dist, double p);

struct McEntropyEstimate {
  double bits = 0;
  double std_error = 0;
};

// Sampling estimate of H(M|Z) = E[-log₂ posterior(M|Z)] for distributions too
// wide to enumerate. Per-trial substreams derived from (seed, trial index)
// and a serial final reduction keep the estimate bit-identical for any worker
// count. Requires trials ≥ 100.
McEntropyEstimate conditional_entropy_mc(std::span<const double> dist, double p,
                                         std::uint64_t trials, std::uint64_t seed,
                                         int workers = 1);

// Guaranteed bits of eavesdropper equivocation per session:
// log₂ min{ 1/(1-d1), 1 + (1-λ2)·Σ_{i=1}^{m_tilde-1} d2^i } with
// d1 = λ1·p/(1-p) and d2 = p/((1-p)·λ2). Zero at m_tilde = 1, non-decreasing
// in m_tilde. Requires p ∈ (0, 0.5) strictly.
double key_rate_lower_bound(double lambda1, double lambda2, double p, int m_tilde);

// Recovers max(m_local, m_remote) from the remote count's residue modulo
// 2d+1, assuming |m_local - m_remote| ≤ d. Throws ProtocolError for residues
// outside {0..2d}; differences beyond d alias undetectably.
int reconcile(int m_local, int remote_residue, int d);

// The shared symbol once the residue is public: floor(m / (2d+1)).
int extract_randomness(int m, int d);

}  // namespace pcosync
