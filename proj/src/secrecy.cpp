// Implementation of the eavesdropper model and reconciliation protocol.
#include "pcosync/secrecy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>
#include <vector>

#include "pcosync/errors.hpp"

namespace pcosync {
namespace {

constexpr int kMaxEnumerationBits = 20;
constexpr std::uint64_t kSaltEveTrials = 0x657665747269616cULL;

void require_p(double p, bool allow_half) {
  const bool ok = p > 0 && (allow_half ? p <= 0.5 : p < 0.5) && std::isfinite(p);
  if (!ok) {
    throw DomainError(allow_half ? "crossover probability must lie in (0, 0.5]"
                                 : "crossover probability must lie in (0, 0.5)");
  }
}

void require_m(int m, int m_tilde) {
  if (m_tilde < 1 || m_tilde > kMaxEnumerationBits) {
    throw DomainError("session cap must lie in 1..20 for enumeration");
  }
  if (m < 1 || m > m_tilde) {
    throw DomainError("cycle count must lie in 1..m_tilde");
  }
}

// Bitmask form of indicator_sequence(m): bit i-1 set iff S_i = 1, i.e. i ≥ m.
std::uint32_t indicator_mask(int m, int m_tilde) {
  const std::uint32_t full = (m_tilde == 32) ? ~0u : ((1u << m_tilde) - 1);
  return full & ~((1u << (m - 1)) - 1);
}

// p^k (1-p)^(n-k) for k = 0..n by repeated multiplication.
std::vector<double> mismatch_powers(double p, int n) {
  std::vector<double> tab(static_cast<std::size_t>(n) + 1);
  tab[0] = 1;
  for (int k = 1; k <= n; ++k) tab[static_cast<std::size_t>(k)] = tab[k - 1] * p;
  double match = 1;
  for (int k = n; k >= 0; --k) {
    tab[static_cast<std::size_t>(k)] *= match;
    match *= 1 - p;
  }
  return tab;
}

void validate_pmf(std::span<const double> dist) {
  if (dist.empty()) throw DomainError("distribution must be non-empty");
  double sum = 0;
  for (double q : dist) {
    if (!(q >= 0) || !std::isfinite(q)) {
      throw DomainError("distribution entries must be finite and non-negative");
    }
    sum += q;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw DomainError("distribution must sum to 1");
  }
}

}  // namespace

std::vector<std::uint8_t> indicator_sequence(int m, int m_tilde) {
  if (m_tilde < 1) throw DomainError("session cap must be at least 1");
  if (m < 1 || m > m_tilde) throw DomainError("cycle count must lie in 1..m_tilde");
  std::vector<std::uint8_t> s(static_cast<std::size_t>(m_tilde), 0);
  for (int i = m; i <= m_tilde; ++i) s[static_cast<std::size_t>(i - 1)] = 1;
  return s;
}

std::vector<std::uint8_t> sample_eve_observation(std::span<const std::uint8_t> s,
                                                 double p, SplitMix64& rng) {
  require_p(p, /*allow_half=*/true);
  std::vector<std::uint8_t> z(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    z[i] = rng.bernoulli(p) ? static_cast<std::uint8_t>(1 - s[i]) : s[i];
  }
  return z;
}

double likelihood(std::span<const std::uint8_t> z, int m, double p) {
  require_p(p, /*allow_half=*/true);
  const int m_tilde = static_cast<int>(z.size());
  if (m_tilde < 1 || m < 1 || m > m_tilde) {
    throw DomainError("cycle count must lie in 1..m_tilde");
  }
  double prob = 1;
  for (int i = 1; i <= m_tilde; ++i) {
    const std::uint8_t s_i = i >= m ? 1 : 0;
    prob *= (z[static_cast<std::size_t>(i - 1)] == s_i) ? 1 - p : p;
  }
  return prob;
}

bool likelihood_ratio_check(int m1, int m2, double p, int m_tilde) {
  require_p(p, /*allow_half=*/true);
  require_m(m1, m_tilde);
  require_m(m2, m_tilde);
  const std::vector<double> tab = mismatch_powers(p, m_tilde);
  const std::uint32_t mask1 = indicator_mask(m1, m_tilde);
  const std::uint32_t mask2 = indicator_mask(m2, m_tilde);
  double bound = 1;
  for (int i = 0; i < std::abs(m1 - m2); ++i) bound *= p / (1 - p);
  constexpr double kRelSlack = 1e-12;
  for (std::uint32_t z = 0; z < (1u << m_tilde); ++z) {
    const double l1 = tab[static_cast<std::size_t>(std::popcount(z ^ mask1))];
    const double l2 = tab[static_cast<std::size_t>(std::popcount(z ^ mask2))];
    if (l1 < bound * l2 * (1 - kRelSlack)) return false;
  }
  return true;
}

double conditional_entropy_exact(std::span<const double> dist, double p) {
  require_p(p, /*allow_half=*/true);
  validate_pmf(dist);
  const int m_tilde = static_cast<int>(dist.size());
  if (m_tilde > kMaxEnumerationBits) {
    throw DomainError("session cap must lie in 1..20 for enumeration");
  }
  const std::vector<double> tab = mismatch_powers(p, m_tilde);
  std::vector<std::uint32_t> masks(static_cast<std::size_t>(m_tilde));
  for (int m = 1; m <= m_tilde; ++m) {
    masks[static_cast<std::size_t>(m - 1)] = indicator_mask(m, m_tilde);
  }
  std::vector<double> joint(static_cast<std::size_t>(m_tilde));
  double entropy = 0;
  for (std::uint32_t z = 0; z < (1u << m_tilde); ++z) {
    double pz = 0;
    for (int m = 0; m < m_tilde; ++m) {
      joint[static_cast<std::size_t>(m)] =
          dist[static_cast<std::size_t>(m)] *
          tab[static_cast<std::size_t>(std::popcount(z ^ masks[static_cast<std::size_t>(m)]))];
      pz += joint[static_cast<std::size_t>(m)];
    }
    if (pz <= 0) continue;
    for (int m = 0; m < m_tilde; ++m) {
      const double j = joint[static_cast<std::size_t>(m)];
      if (j > 0) entropy -= j * std::log2(j / pz);
    }
  }
  return entropy;
}

McEntropyEstimate conditional_entropy_mc(std::span<const double> dist, double p,
                                         std::uint64_t trials, std::uint64_t seed,
                                         int workers) {
  require_p(p, /*allow_half=*/true);
  validate_pmf(dist);
  if (trials < 100) throw DomainError("need at least 100 trials");
  if (workers < 1) throw DomainError("need at least one worker");
  const int m_tilde = static_cast<int>(dist.size());

  std::vector<double> cdf(dist.size());
  double acc = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    acc += dist[i];
    cdf[i] = acc;
  }
  cdf.back() = 1.0;
  const double log_p = std::log(p);
  const double log_q = std::log(1 - p);

  // One trial: draw m and z, then -log₂ posterior(m|z). The log-likelihoods
  // of all candidate counts follow from logL(m+1) - logL(m) =
  // log P(z_m|S_m=0) - log P(z_m|S_m=1), since the indicators differ only at
  // position m.
  std::vector<double> values(trials);
  auto run_range = [&](std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::uint8_t> z(static_cast<std::size_t>(m_tilde));
    std::vector<double> loglik(static_cast<std::size_t>(m_tilde));
    std::vector<double> logjoint(static_cast<std::size_t>(m_tilde));
    for (std::uint64_t i = lo; i < hi; ++i) {
      SplitMix64 stream = derive_stream(seed, kSaltEveTrials, i);
      const double u = stream.uniform01();
      const int m = static_cast<int>(
          std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin() + 1);
      for (int k = 1; k <= m_tilde; ++k) {
        const std::uint8_t s_k = k >= m ? 1 : 0;
        z[static_cast<std::size_t>(k - 1)] =
            stream.bernoulli(p) ? static_cast<std::uint8_t>(1 - s_k) : s_k;
      }
      double ll = 0;  // logL(1): all-ones indicator
      for (int k = 0; k < m_tilde; ++k) ll += z[static_cast<std::size_t>(k)] ? log_q : log_p;
      loglik[0] = ll;
      for (int k = 1; k < m_tilde; ++k) {
        const bool z_k = z[static_cast<std::size_t>(k - 1)] != 0;
        ll += (z_k ? log_p : log_q) - (z_k ? log_q : log_p);
        loglik[static_cast<std::size_t>(k)] = ll;
      }
      double best = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < m_tilde; ++k) {
        const double d = dist[static_cast<std::size_t>(k)];
        logjoint[static_cast<std::size_t>(k)] =
            d > 0 ? loglik[static_cast<std::size_t>(k)] + std::log(d)
                  : -std::numeric_limits<double>::infinity();
        best = std::max(best, logjoint[static_cast<std::size_t>(k)]);
      }
      double norm = 0;
      for (int k = 0; k < m_tilde; ++k) {
        norm += std::exp(logjoint[static_cast<std::size_t>(k)] - best);
      }
      const double log_posterior =
          logjoint[static_cast<std::size_t>(m - 1)] - (best + std::log(norm));
      values[i] = -log_posterior / std::numbers::ln2;
    }
  };

  const std::uint64_t w =
      std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), trials);
  if (w == 1) {
    run_range(0, trials);
  } else {
    const std::uint64_t chunk = (trials + w - 1) / w;
    std::vector<std::thread> threads;
    threads.reserve(w);
    for (std::uint64_t k = 0; k < w; ++k) {
      threads.emplace_back(run_range, k * chunk, std::min(trials, (k + 1) * chunk));
    }
    for (std::thread& t : threads) t.join();
  }

  // Serial reduction in trial order: the estimate is independent of workers.
  double sum = 0, sum_sq = 0;
  for (double v : values) {
    sum += v;
    sum_sq += v * v;
  }
  McEntropyEstimate out;
  const double n = static_cast<double>(trials);
  out.bits = sum / n;
  const double var = std::max(0.0, (sum_sq - n * out.bits * out.bits) / (n - 1));
  out.std_error = std::sqrt(var / n);
  return out;
}

double key_rate_lower_bound(double lambda1, double lambda2, double p, int m_tilde) {
  require_p(p, /*allow_half=*/false);
  if (!(lambda1 > 0) || !(lambda1 < 1) || !(lambda2 > 0) || !(lambda2 < 1) ||
      lambda1 > lambda2) {
    throw DomainError("envelope ratios must satisfy 0 < lambda1 <= lambda2 < 1");
  }
  if (m_tilde < 1) throw DomainError("session cap must be at least 1");
  const double odds = p / (1 - p);
  const double d1 = lambda1 * odds;
  const double d2 = odds / lambda2;
  // The sum is explicit so the bound is exact for every m_tilde, including
  // d2 ≥ 1 where no closed geometric form applies.
  double sum = 0, power = 1;
  for (int i = 1; i < m_tilde; ++i) {
    power *= d2;
    sum += power;
  }
  return std::log2(std::min(1.0 / (1.0 - d1), 1.0 + (1.0 - lambda2) * sum));
}

int reconcile(int m_local, int remote_residue, int d) {
  if (d < 1) throw DomainError("reconcile: window radius must be at least 1");
  if (m_local < 1) throw DomainError("reconcile: count must be at least 1");
  const int mod = 2 * d + 1;
  if (remote_residue < 0 || remote_residue >= mod) {
    throw ProtocolError("reconcile: remote residue outside 0..2d");
  }
  // Signed difference in [-d, d] recovered from the residues; true
  // differences beyond d alias into the window undetectably.
  int diff = (m_local - remote_residue) % mod;
  if (diff < 0) diff += mod;
  if (diff > d) diff -= mod;
  return diff < 0 ? m_local - diff : m_local;
}

int extract_randomness(int m, int d) {
  if (d < 1) throw DomainError("extract: window radius must be at least 1");
  if (m < 1) throw DomainError("extract: count must be at least 1");
  return m / (2 * d + 1);
}

}  // namespace pcosync
