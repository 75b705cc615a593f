// Cycle-count distribution: boundary sequences against the cycle map, golden
// probabilities, envelope properties, the classifier, and the entropy
// sandwich.
#include <cmath>
#include <vector>

#include <doctest.h>

#include "pcosync/coupling_dynamics.hpp"
#include "pcosync/errors.hpp"
#include "pcosync/rng.hpp"
#include "pcosync/sync_distribution.hpp"
#include "test_support.hpp"

using pcosync::classify_initial_tau;
using pcosync::ConvergenceError;
using pcosync::DomainError;
using pcosync::DynamicsMaps;
using pcosync::entropy;
using pcosync::entropy_bounds;
using pcosync::EntropyBounds;
using pcosync::EntropyResult;
using pcosync::MapMode;
using pcosync::NonSyncError;
using pcosync::PhaseFunction;
using pcosync::pulse_count_distribution;
using pcosync::PulseCountDistribution;
using pcosync::shannon_entropy_bits;
using pcosync::truncated_session_distribution;
using testsup::close;
using testsup::reference_dm;

namespace {

// 50-digit reference values for γ = 2, ε = 0.02.
constexpr double kP1 = 0.1105944416676025802698;
constexpr double kP2 = 0.08909902235284055773627;
constexpr double kP3 = 0.07855591004568637331895;
constexpr double kTau2 = 0.1051255348730267532954;
constexpr double kTauPrime2 = 0.9054320708525836152893;
constexpr double kEntropyLower = 3.838300012971984230608;
constexpr double kEntropyUpper = 5.613059111446791144643;
constexpr double kEntropyExact = 4.763959785416956075827;

const PulseCountDistribution& reference_dist() {
  static const PulseCountDistribution dist =
      pulse_count_distribution(reference_dm(), 1e-10);
  return dist;
}

}  // namespace

TEST_CASE("boundary sequences walk inward by cycle-map preimages") {
  const DynamicsMaps& dm = reference_dm();
  const auto [lower, upper] = pcosync::boundary_sequences(dm, 1e-10);
  REQUIRE(lower.size() == upper.size());
  REQUIRE(lower.size() >= 4);
  CHECK(lower[0] == 0.0);
  CHECK(upper[0] == 1.0);
  CHECK(close(lower[1], dm.delta(), 1e-15));
  CHECK(close(upper[1], dm.h_inv_delta(), 1e-15));
  CHECK(close(lower[2], kTau2, 1e-12));
  CHECK(close(upper[2], kTauPrime2, 1e-12));
  // Forward consistency: R maps each boundary onto its predecessor.
  for (std::size_t i = 2; i + 1 < lower.size(); ++i) {
    CHECK(close(dm.return_map(lower[i], MapMode::clamped), lower[i - 1], 1e-9));
    CHECK(close(dm.return_map(upper[i], MapMode::clamped), upper[i - 1], 1e-9));
  }
  // Strict monotone approach to the repeller from both sides.
  for (std::size_t i = 1; i < lower.size(); ++i) {
    CHECK(lower[i] > lower[i - 1]);
    CHECK(upper[i] < upper[i - 1]);
    CHECK(lower[i] < dm.tau_star());
    CHECK(upper[i] > dm.tau_star());
  }
  const double gap = std::max(dm.tau_star() - lower.back(),
                              upper.back() - dm.tau_star());
  CHECK(gap < 1e-10);
  CHECK_THROWS_AS(pcosync::boundary_sequences(dm, -1.0), DomainError);
}

TEST_CASE("cycle-count probabilities match the golden values and sum to one") {
  const PulseCountDistribution& dist = reference_dist();
  REQUIRE(dist.probs.size() >= 3);
  CHECK(close(dist.probs[0], kP1, 1e-13));
  CHECK(close(dist.probs[1], kP2, 1e-13));
  CHECK(close(dist.probs[2], kP3, 1e-13));
  double total = dist.tail_mass;
  for (double p : dist.probs) {
    CHECK(p > 0.0);
    total += p;
  }
  CHECK(close(total, 1.0, 1e-12));
  CHECK(dist.tail_mass >= 0.0);
  CHECK(dist.tail_mass < 1e-9);
  CHECK(dist.lambda1 == reference_dm().lambda1());
  CHECK(dist.lambda2 == reference_dm().lambda2());
}

TEST_CASE("probability ratios obey the expansion envelope from the third term") {
  const PulseCountDistribution& dist = reference_dist();
  const double l1 = dist.lambda1;
  const double l2 = dist.lambda2;
  // The first ratio sits below the two-sided band (p2/p1 ≈ 0.8056 < λ1); the
  // band holds from p3/p2 on. Each term is a difference of root-found
  // boundary values (position error ~1e-12), so a ratio of terms p and q
  // carries slack ~1e-12·(1/p + 1/q) — negligible for the leading mass,
  // dominant for the ~1e-10 terms deepest in the tail.
  CHECK(dist.probs[1] / dist.probs[0] < l1);
  for (std::size_t i = 2; i < dist.probs.size(); ++i) {
    const double ratio = dist.probs[i] / dist.probs[i - 1];
    const double slack =
        4e-12 * (1.0 / dist.probs[i] + 1.0 / dist.probs[i - 1]) + 1e-12;
    CHECK(ratio >= l1 - slack);
    CHECK(ratio <= l2 + slack);
  }
  // Geometric envelopes anchored at p1 (above) and p2 (below).
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    CHECK(dist.probs[i] <=
          dist.probs[0] * std::pow(l2, static_cast<double>(i)) + 1e-15);
    if (i >= 1) {
      CHECK(dist.probs[i] >=
            dist.probs[1] * std::pow(l1, static_cast<double>(i - 1)) - 1e-15);
    }
  }
}

TEST_CASE("classifier resolves boundaries, interior points, and the core") {
  const DynamicsMaps& dm = reference_dm();
  const PulseCountDistribution& dist = reference_dist();
  CHECK(classify_initial_tau(dm, dist, dm.delta()) == 1);
  CHECK(classify_initial_tau(dm, dist, 0.03) == 1);
  CHECK(classify_initial_tau(dm, dist, 0.97) == 1);
  CHECK(classify_initial_tau(dm, dist, dm.h_inv_delta()) == 1);
  CHECK(classify_initial_tau(dm, dist, kTau2) == 2);
  CHECK(classify_initial_tau(dm, dist, 0.08) == 2);
  CHECK(classify_initial_tau(dm, dist, 0.5) == 40);
  // The convenience overload agrees.
  CHECK(classify_initial_tau(dm, 0.5) == 40);
  CHECK_THROWS_AS(classify_initial_tau(dm, dist, 0.0), DomainError);
  CHECK_THROWS_AS(classify_initial_tau(dm, dist, 1.0), DomainError);
  CHECK_THROWS_AS(classify_initial_tau(dm, dist, dm.tau_star()), NonSyncError);
  CHECK(testsup::contains(
      testsup::message_of([&] { classify_initial_tau(dm, dist, dm.tau_star()); }),
      "non-synchronizing fixed point"));

  // Membership check against the interval table itself.
  pcosync::SplitMix64 rng(2024);
  for (int k = 0; k < 2000; ++k) {
    const double tau = rng.uniform01();
    int m = 0;
    try {
      m = classify_initial_tau(dm, dist, tau);
    } catch (const NonSyncError&) {
      continue;
    }
    if (static_cast<std::size_t>(m) < dist.tau_lower.size()) {
      const auto i = static_cast<std::size_t>(m);
      const bool in_lower = tau >= dist.tau_lower[i - 1] && tau <= dist.tau_lower[i];
      const bool in_upper = tau >= dist.tau_upper[i] && tau <= dist.tau_upper[i - 1];
      CHECK((in_lower || in_upper));
    }
  }
}

TEST_CASE("entropy of the resolved distribution carries a certified tail cap") {
  const EntropyResult er = entropy(reference_dist());
  CHECK(close(er.bits, kEntropyExact, 1e-8));
  CHECK(std::fabs(er.bits - kEntropyExact) <= er.tail_bound_bits + 1e-12);
  CHECK(er.tail_bound_bits < 1e-7);
}

TEST_CASE("closed-form sandwich brackets the entropy") {
  const EntropyBounds eb = entropy_bounds(reference_dm());
  CHECK(close(eb.lower_bits, kEntropyLower, 1e-10));
  CHECK(close(eb.upper_bits, kEntropyUpper, 1e-10));
  const EntropyResult er = entropy(reference_dist());
  CHECK(eb.lower_bits <= er.bits + er.tail_bound_bits);
  CHECK(er.bits <= eb.upper_bits);
}

TEST_CASE("strong coupling peels a leading probability above 1/e") {
  // ε = 0.4 pushes p1 ≈ 0.8676 past 1/e where -x·log x turns decreasing; the
  // sandwich must still bracket the true entropy.
  const DynamicsMaps dm(testsup::reference_pf(), 0.4);
  const PulseCountDistribution dist = pulse_count_distribution(dm, 1e-12);
  CHECK(close(dist.probs[0], 0.867581250444, 1e-9));
  CHECK(dist.probs[0] > 1.0 / std::exp(1.0));
  const EntropyBounds eb = entropy_bounds(dm);
  const EntropyResult er = entropy(dist);
  CHECK(eb.lower_bits <= er.bits + er.tail_bound_bits);
  CHECK(er.bits <= eb.upper_bits + 1e-12);
  CHECK(eb.lower_bits > 0.0);
}

TEST_CASE("plain entropy helper and its input screening") {
  const std::vector<double> uniform(4, 0.25);
  CHECK(close(shannon_entropy_bits(uniform), 2.0, 1e-12));
  const std::vector<double> degenerate{1.0, 0.0};
  CHECK(shannon_entropy_bits(degenerate) == 0.0);
  const std::vector<double> bad{0.5, -0.1};
  CHECK_THROWS_AS(shannon_entropy_bits(bad), DomainError);
}

TEST_CASE("truncation folds the tail into the last cell") {
  const PulseCountDistribution& dist = reference_dist();
  for (int mt : {1, 2, 5, 10}) {
    const std::vector<double> t = truncated_session_distribution(dist, mt);
    REQUIRE(t.size() == static_cast<std::size_t>(mt));
    double sum = 0.0;
    for (double p : t) sum += p;
    CHECK(close(sum, 1.0, 1e-12));
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      CHECK(t[i] == dist.probs[i]);
    }
  }
  const std::vector<double> all = truncated_session_distribution(dist, 1);
  CHECK(close(all[0], 1.0, 1e-12));
  CHECK_THROWS_AS(truncated_session_distribution(dist, 0), DomainError);
}
