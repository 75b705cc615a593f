// Implementation of the synchronization-count distribution and entropy bounds.
#include "pcosync/sync_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>

#include "pcosync/errors.hpp"

namespace pcosync {
namespace {

constexpr std::size_t kMaxBoundaryTerms = 100000;
constexpr int kMaxForwardIterations = 100000;
// Differences this close to the fixed point cannot be classified reliably in
// double precision (the expansion amplifies representation error).
constexpr double kNonSyncTol = 1e-13;
constexpr double kInvE = 0.36787944117144233;

double g_bits(double x) { return x > 0 ? -x * std::log2(x) : 0.0; }

// Entropy of the geometric envelope anchor·λ^j summed over j ≥ 1, a certified
// cap on the tail entropy when anchor·λ ≤ 1/e.
double geometric_tail_entropy(double anchor, double lambda) {
  const double r = lambda / (1.0 - lambda);
  return g_bits(anchor) * r + anchor * (-std::log2(lambda)) * r / (1.0 - lambda);
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> boundary_sequences(
    const DynamicsMaps& dm, double tol) {
  if (!(tol > 0)) throw DomainError("boundary sequences: tolerance must be positive");
  const double star = dm.tau_star();
  std::vector<double> lower = {0.0, dm.delta()};
  std::vector<double> upper = {1.0, dm.h_inv_delta()};
  while (std::max(star - lower.back(), upper.back() - star) >= tol) {
    if (lower.size() > kMaxBoundaryTerms) {
      throw ConvergenceError("boundary sequences: did not approach the fixed point");
    }
    const double next_lower = dm.return_map_inverse(lower.back());
    const double next_upper = dm.return_map_inverse(upper.back());
    if (!(next_lower > lower.back()) || !(next_lower < star) ||
        !(next_upper < upper.back()) || !(next_upper > star)) {
      throw ConvergenceError("boundary sequences: lost monotonicity near the fixed point");
    }
    lower.push_back(next_lower);
    upper.push_back(next_upper);
  }
  return {std::move(lower), std::move(upper)};
}

PulseCountDistribution pulse_count_distribution(const DynamicsMaps& dm, double tol) {
  PulseCountDistribution dist;
  std::tie(dist.tau_lower, dist.tau_upper) = boundary_sequences(dm, tol);
  dist.tau_star = dm.tau_star();
  dist.lambda1 = dm.lambda1();
  dist.lambda2 = dm.lambda2();
  dist.tol = tol;
  const std::size_t k = dist.tau_lower.size() - 1;
  dist.probs.reserve(k);
  for (std::size_t i = 1; i <= k; ++i) {
    dist.probs.push_back((dist.tau_lower[i] - dist.tau_lower[i - 1]) +
                         (dist.tau_upper[i - 1] - dist.tau_upper[i]));
  }
  dist.tail_mass = dist.tau_upper[k] - dist.tau_lower[k];
  return dist;
}

int classify_initial_tau(const DynamicsMaps& dm, const PulseCountDistribution& dist,
                         double tau) {
  if (!(tau > 0.0) || !(tau < 1.0)) {
    throw DomainError("classify: difference must lie strictly inside (0, 1)");
  }
  // Searches both sequences; empty result means tau sits in the unresolved
  // core between the last computed terms.
  auto resolve = [&dist](double t) -> std::optional<int> {
    if (t <= dist.tau_lower.back()) {
      const auto it =
          std::lower_bound(dist.tau_lower.begin(), dist.tau_lower.end(), t);
      return static_cast<int>(std::max<std::ptrdiff_t>(1, it - dist.tau_lower.begin()));
    }
    if (t >= dist.tau_upper.back()) {
      const auto it = std::lower_bound(dist.tau_upper.begin(), dist.tau_upper.end(), t,
                                       std::greater<double>());
      return static_cast<int>(std::max<std::ptrdiff_t>(1, it - dist.tau_upper.begin()));
    }
    return std::nullopt;
  };

  int cycles = 0;
  double t = tau;
  for (int iter = 0; iter < kMaxForwardIterations; ++iter) {
    if (auto m = resolve(t)) return *m + cycles;
    if (std::abs(t - dist.tau_star) <= kNonSyncTol) {
      char buf[128];
      std::snprintf(buf, sizeof buf,
                    "difference %.17g is within %.3g of the non-synchronizing fixed point",
                    tau, kNonSyncTol);
      throw NonSyncError(buf);
    }
    // One full cycle peels one index: M(t) = M(R(t)) + 1 inside the core.
    t = dm.return_map(t);
    ++cycles;
  }
  throw ConvergenceError("classify: forward iteration failed to escape the core");
}

int classify_initial_tau(const DynamicsMaps& dm, double tau) {
  return classify_initial_tau(dm, pulse_count_distribution(dm), tau);
}

double shannon_entropy_bits(std::span<const double> pmf) {
  double bits = 0;
  for (double p : pmf) {
    if (p < 0 || !std::isfinite(p)) {
      throw DomainError("entropy: probabilities must be finite and non-negative");
    }
    bits += g_bits(p);
  }
  return bits;
}

EntropyResult entropy(const PulseCountDistribution& dist) {
  EntropyResult out;
  out.bits = shannon_entropy_bits(dist.probs);
  if (dist.tail_mass <= 0 || dist.probs.empty()) return out;
  const double anchor = dist.probs.back();
  if (!(anchor * dist.lambda2 <= kInvE)) {
    throw ConvergenceError("entropy: truncation too coarse for a certified tail bound");
  }
  out.tail_bound_bits = geometric_tail_entropy(anchor, dist.lambda2);
  return out;
}

EntropyBounds entropy_bounds(const DynamicsMaps& dm) {
  const double delta = dm.delta();
  const double hd = dm.h_inv_delta();
  const double t2 = dm.return_map_inverse(delta);
  const double u2 = dm.return_map_inverse(hd);
  const double t3 = dm.return_map_inverse(t2);
  const double u3 = dm.return_map_inverse(u2);
  const double p1 = delta + (1.0 - hd);
  const double p2 = (t2 - delta) + (hd - u2);
  const double p3 = (t3 - t2) + (u2 - u3);

  // Probabilities above 1/e are peeled off and added exactly; at most two can
  // exceed 1/e since three would sum past 1.
  double peeled_bits = 0;
  double anchor = p1;
  if (p1 >= kInvE) {
    peeled_bits += g_bits(p1);
    anchor = p2;
    if (p2 >= kInvE) {
      peeled_bits += g_bits(p2);
      anchor = p3;
      if (p3 >= kInvE) {
        throw ConvergenceError("entropy bounds: three leading probabilities above 1/e");
      }
    }
  }

  auto sandwich = [&](double lambda) {
    const double q = 1.0 - lambda;
    return peeled_bits + g_bits(anchor) / q + anchor * g_bits(lambda) / (q * q);
  };
  EntropyBounds out;
  out.lower_bits = sandwich(dm.lambda1());
  out.upper_bits = sandwich(dm.lambda2());
  return out;
}

std::vector<double> truncated_session_distribution(const PulseCountDistribution& dist,
                                                   int m_tilde) {
  if (m_tilde < 1) throw DomainError("truncated distribution: cap must be at least 1");
  const std::size_t k = dist.probs.size();
  std::vector<double> out(static_cast<std::size_t>(m_tilde), 0.0);
  for (std::size_t i = 1; i < static_cast<std::size_t>(m_tilde) && i <= k; ++i) {
    out[i - 1] = dist.probs[i - 1];
  }
  double last = dist.tail_mass;
  for (std::size_t i = static_cast<std::size_t>(m_tilde); i <= k; ++i) {
    last += dist.probs[i - 1];
  }
  out[static_cast<std::size_t>(m_tilde) - 1] = last;
  return out;
}

}  // namespace pcosync
