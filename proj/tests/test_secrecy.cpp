// Eavesdropper analysis: indicator sequences, channel likelihoods, exact and
// sampled equivocation, the key-rate bound, and the reconciliation protocol.
#include <cmath>
#include <vector>

#include <doctest.h>

#include "pcosync/errors.hpp"
#include "pcosync/rng.hpp"
#include "pcosync/secrecy.hpp"
#include "pcosync/sync_distribution.hpp"
#include "test_support.hpp"

using pcosync::conditional_entropy_exact;
using pcosync::conditional_entropy_mc;
using pcosync::DomainError;
using pcosync::extract_randomness;
using pcosync::indicator_sequence;
using pcosync::key_rate_lower_bound;
using pcosync::likelihood;
using pcosync::likelihood_ratio_check;
using pcosync::McEntropyEstimate;
using pcosync::ProtocolError;
using pcosync::reconcile;
using pcosync::shannon_entropy_bits;
using testsup::close;

namespace {

double binary_entropy_bits(double p) {
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace

TEST_CASE("indicator bits turn on at the synchronization cycle") {
  CHECK(indicator_sequence(1, 4) == std::vector<std::uint8_t>{1, 1, 1, 1});
  CHECK(indicator_sequence(2, 4) == std::vector<std::uint8_t>{0, 1, 1, 1});
  CHECK(indicator_sequence(4, 4) == std::vector<std::uint8_t>{0, 0, 0, 1});
  CHECK_THROWS_AS(indicator_sequence(0, 4), DomainError);
  CHECK_THROWS_AS(indicator_sequence(5, 4), DomainError);
}

TEST_CASE("channel likelihoods multiply per-bit flip probabilities") {
  const std::vector<std::uint8_t> z{0, 1};
  // s(1) = 11: one mismatch; s(2) = 01: none.
  CHECK(close(likelihood(z, 1, 0.25), 0.25 * 0.75, 1e-15));
  CHECK(close(likelihood(z, 2, 0.25), 0.75 * 0.75, 1e-15));
  const std::vector<std::uint8_t> z2{1, 0, 1};
  // z = 101 against s(2) = 011 mismatches in the first two bits only.
  CHECK(close(likelihood(z2, 2, 0.1), 0.1 * 0.1 * 0.9, 1e-15));
  CHECK_THROWS_AS(likelihood(z, 3, 0.25), DomainError);
}

TEST_CASE("posterior dominance: closer counts are never less likely") {
  for (double p : {0.1, 0.3, 0.45}) {
    CHECK(likelihood_ratio_check(1, 5, p, 8));
    CHECK(likelihood_ratio_check(5, 1, p, 8));
    CHECK(likelihood_ratio_check(3, 4, p, 8));
    CHECK(likelihood_ratio_check(8, 2, p, 8));
  }
  CHECK_THROWS_AS(likelihood_ratio_check(1, 2, 0.3, 25), DomainError);
}

TEST_CASE("exact equivocation: hand-checked two-cell case") {
  // Uniform prior on {1, 2}: only the first indicator bit separates the
  // hypotheses, so H(M|Z) is the binary entropy of the crossover.
  const std::vector<double> uniform2{0.5, 0.5};
  for (double p : {0.05, 0.25, 0.4}) {
    CHECK(close(conditional_entropy_exact(uniform2, p), binary_entropy_bits(p),
                1e-12));
  }
  // A vanishing crossover reveals everything; a blind channel reveals nothing.
  CHECK(conditional_entropy_exact(uniform2, 1e-12) < 1e-9);
  CHECK(close(conditional_entropy_exact(uniform2, 0.5), 1.0, 1e-12));
}

TEST_CASE("a blind channel leaves the full session entropy behind") {
  const auto dist = pcosync::pulse_count_distribution(testsup::reference_dm());
  const std::vector<double> t = pcosync::truncated_session_distribution(dist, 10);
  CHECK(close(conditional_entropy_exact(t, 0.5), shannon_entropy_bits(t), 1e-12));
  CHECK(conditional_entropy_exact(t, 0.3) < shannon_entropy_bits(t));
  const std::vector<double> not_normalized{0.4, 0.4};
  CHECK_THROWS_AS(conditional_entropy_exact(not_normalized, 0.3), DomainError);
}

TEST_CASE("sampled equivocation agrees with enumeration and ignores workers") {
  const std::vector<double> dist{0.35, 0.3, 0.2, 0.15};
  const double exact = conditional_entropy_exact(dist, 0.3);
  const McEntropyEstimate est = conditional_entropy_mc(dist, 0.3, 40000, 11, 1);
  CHECK(std::fabs(est.bits - exact) <= 4.0 * est.std_error);
  CHECK(est.std_error > 0.0);
  const McEntropyEstimate est2 = conditional_entropy_mc(dist, 0.3, 40000, 11, 4);
  CHECK(est.bits == est2.bits);
  CHECK(est.std_error == est2.std_error);
  const McEntropyEstimate other = conditional_entropy_mc(dist, 0.3, 40000, 12, 1);
  CHECK(est.bits != other.bits);
  CHECK_THROWS_AS(conditional_entropy_mc(dist, 0.3, 50, 1, 1), DomainError);
}

TEST_CASE("sampling the eavesdropper's channel flips bits at the given rate") {
  pcosync::SplitMix64 rng(7);
  const std::vector<std::uint8_t> s = indicator_sequence(3, 12);
  int flips = 0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    const std::vector<std::uint8_t> z = pcosync::sample_eve_observation(s, 0.2, rng);
    REQUIRE(z.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) flips += z[i] != s[i];
  }
  const double rate = static_cast<double>(flips) / (12.0 * trials);
  CHECK(close(rate, 0.2, 0.01));
}

TEST_CASE("key-rate bound: zero floor, growth in the horizon, valid domain") {
  const double l1 = 0.8697344037306953;
  const double l2 = 0.9102995985947262;
  CHECK(key_rate_lower_bound(l1, l2, 0.3, 1) == 0.0);
  double prev = 0.0;
  for (int mt = 1; mt <= 14; ++mt) {
    const double r = key_rate_lower_bound(l1, l2, 0.3, mt);
    CHECK(r >= prev);
    prev = r;
  }
  CHECK(key_rate_lower_bound(l1, l2, 0.45, 12) > 0.0);
  CHECK_THROWS_AS(key_rate_lower_bound(l1, l2, 0.5, 5), DomainError);
  CHECK_THROWS_AS(key_rate_lower_bound(l1, l2, 0.0, 5), DomainError);
  CHECK_THROWS_AS(key_rate_lower_bound(0.0, l2, 0.3, 5), DomainError);
  CHECK_THROWS_AS(key_rate_lower_bound(l2, l1, 0.3, 5), DomainError);
}

TEST_CASE("reconciliation recovers the larger count from a residue") {
  // Worked examples: counts 7 and 6 with radius 1; 10 and 8 with radius 2.
  CHECK(reconcile(7, 6 % 3, 1) == 7);
  CHECK(reconcile(6, 7 % 3, 1) == 7);
  CHECK(reconcile(10, 8 % 5, 2) == 10);
  CHECK(reconcile(8, 10 % 5, 2) == 10);
  // Equal counts pass through.
  CHECK(reconcile(9, 9 % 3, 1) == 9);
  CHECK_THROWS_AS(reconcile(9, 3, 1), ProtocolError);
  CHECK_THROWS_AS(reconcile(9, -1, 1), ProtocolError);
  CHECK_THROWS_AS(reconcile(0, 0, 1), DomainError);
  CHECK_THROWS_AS(reconcile(5, 1, 0), DomainError);
}

TEST_CASE("both parties compute the same maximum over the whole small range") {
  for (int d = 1; d <= 3; ++d) {
    const int mod = 2 * d + 1;
    for (int ma = 1; ma <= 60; ++ma) {
      for (int diff = -d; diff <= d; ++diff) {
        const int mb = ma + diff;
        if (mb < 1) continue;
        const int expect = std::max(ma, mb);
        CHECK(reconcile(ma, mb % mod, d) == expect);
        CHECK(reconcile(mb, ma % mod, d) == expect);
      }
    }
  }
}

TEST_CASE("randomness extraction drops the disclosed residue information") {
  CHECK(extract_randomness(7, 1) == 2);
  CHECK(extract_randomness(2, 1) == 0);
  CHECK(extract_randomness(25, 2) == 5);
  CHECK(extract_randomness(3, 1) == 1);
  CHECK_THROWS_AS(extract_randomness(0, 1), DomainError);
  CHECK_THROWS_AS(extract_randomness(5, 0), DomainError);
}
