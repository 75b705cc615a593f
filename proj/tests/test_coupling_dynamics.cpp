// Pulse-exchange maps: golden values for the reference configuration,
// inversion and composition identities, monotonicity, expansion ratios
// against closed-form derivative exponents, and domain handling.
#include <cmath>

#include <doctest.h>

#include "pcosync/bisect.hpp"
#include "pcosync/coupling_dynamics.hpp"
#include "pcosync/errors.hpp"
#include "test_support.hpp"

using pcosync::ConvergenceError;
using pcosync::DomainError;
using pcosync::DynamicsMaps;
using pcosync::MapMode;
using pcosync::PhaseFunction;
using testsup::close;
using testsup::reference_dm;
using testsup::reference_pf;

namespace {

// Reference configuration (γ = 2, ε = 0.02) values computed to 50 digits from
// the closed forms; the exponential family admits exact expressions for every
// quantity below, including |h'(τ)| = e^{γ(h(τ)+τ-1)} and
// R'(τ) = e^{γ(R(τ)+2h(τ)+τ-2)}.
constexpr double kDelta = 0.06012604672420683252626;
constexpr double kFInvEps = 0.008722284961017764265936;
constexpr double kHAtHalf = 0.5240744100038060971667;
constexpr double kHInvDelta = 0.9495316050566042522564;
constexpr double kTauStar = 0.5117509301601190397975;
constexpr double kLambda0 = 1.127781121978613004545;
constexpr double kLambda1 = 0.8697344037306953536758;
constexpr double kLambda2 = 0.9102995985947262390827;
constexpr double kReturnAtHalf = 0.4988419636928076153243;

double closed_form_return_derivative(const DynamicsMaps& dm, double tau) {
  // Clamped mode extends both maps continuously to the closed interval, so
  // the exponent formula is evaluable at the absorption edges as well.
  const double h = dm.firing_map(tau, MapMode::clamped);
  const double r = dm.return_map(tau, MapMode::clamped);
  return std::exp(2.0 * (r + 2.0 * h + tau - 2.0));
}

}  // namespace

TEST_CASE("reference configuration reproduces the golden dynamics values") {
  const DynamicsMaps& dm = reference_dm();
  CHECK(close(dm.delta(), kDelta, 1e-13));
  CHECK(close(dm.min_post_pulse_diff(), kFInvEps, 1e-13));
  CHECK(close(dm.h_inv_delta(), kHInvDelta, 1e-12));
  CHECK(close(dm.firing_map(0.5), kHAtHalf, 1e-13));
  CHECK(close(dm.return_map(0.5), kReturnAtHalf, 1e-13));
  CHECK(close(dm.tau_star(), kTauStar, 1e-11));
  CHECK(close(dm.lambda0(), kLambda0, 1e-10));
  CHECK(close(dm.lambda1(), kLambda1, 1e-10));
  CHECK(close(dm.lambda2(), kLambda2, 1e-10));
  CHECK(dm.epsilon() == testsup::kEpsilon);
}

TEST_CASE("largest expansion matches the closed-form exponent") {
  // For the exponential family sup|h'| sits at the absorption edge, giving
  // λ0 = e^{γδ} exactly.
  const DynamicsMaps& dm = reference_dm();
  CHECK(close(dm.lambda0(), std::exp(2.0 * dm.delta()), 1e-9));
}

TEST_CASE("the firing map is its own inverse's inverse") {
  const DynamicsMaps& dm = reference_dm();
  for (int i = 1; i < 200; ++i) {
    const double tau = dm.delta() + (1.0 - dm.delta()) * i / 200.0;
    const double y = dm.firing_map(tau);
    CHECK(close(dm.firing_map_inverse(y), tau, 1e-12));
  }
}

TEST_CASE("one full cycle is two pulse exchanges") {
  const DynamicsMaps& dm = reference_dm();
  for (int i = 1; i < 200; ++i) {
    const double tau =
        dm.delta() + (dm.h_inv_delta() - dm.delta()) * i / 200.0;
    CHECK(close(dm.return_map(tau), dm.firing_map(dm.firing_map(tau)), 1e-14));
  }
}

TEST_CASE("cycle-map inversion round-trips and matches a bisection oracle") {
  const DynamicsMaps& dm = reference_dm();
  for (int i = 1; i < 100; ++i) {
    const double tau =
        dm.delta() + (dm.h_inv_delta() - dm.delta()) * i / 100.0;
    const double y = dm.return_map(tau);
    CHECK(close(dm.return_map_inverse(y), tau, 1e-11));
  }
  // Independent oracle: invert R by bisection instead of composing h^{-1}.
  // The bracket sits just inside the open domain; R spans (0,1) across it,
  // so every target below still changes sign.
  for (double y : {0.1, 0.3, 0.55, 0.8, 0.93}) {
    const double direct = pcosync::bisect_root(
        [&](double t) { return dm.return_map(t) - y; }, dm.delta() + 1e-9,
        dm.h_inv_delta() - 1e-9, 1e-14, "oracle");
    CHECK(close(dm.return_map_inverse(y), direct, 1e-11));
  }
  // The inverse of the full range hits the absorption endpoints exactly.
  CHECK(close(dm.return_map_inverse(1.0), dm.h_inv_delta(), 1e-15));
}

TEST_CASE("map monotonicity: h falls, R rises, both strictly") {
  const DynamicsMaps& dm = reference_dm();
  double prev_h = dm.firing_map(dm.delta() + 1e-9);
  double prev_r = dm.return_map(dm.delta() + 1e-9);
  for (int i = 1; i <= 500; ++i) {
    const double tau = dm.delta() + 1e-9 +
                       (dm.h_inv_delta() - dm.delta() - 2e-9) * i / 500.0;
    const double h = dm.firing_map(tau);
    const double r = dm.return_map(tau);
    CHECK(h < prev_h);
    CHECK(r > prev_r);
    prev_h = h;
    prev_r = r;
  }
}

TEST_CASE("expansion ratios come from the true derivative extrema") {
  const DynamicsMaps& dm = reference_dm();
  // Grid oracle over the closed-form R' exponent. The derivative extends
  // continuously to the closed interval and its supremum sits at the upper
  // edge, so the grid must include both endpoints.
  double sup_rp = 0.0;
  double inf_rp = 1e300;
  const int n = 40000;
  for (int i = 0; i <= n; ++i) {
    const double tau =
        dm.delta() + (dm.h_inv_delta() - dm.delta()) * i / static_cast<double>(n);
    const double rp = closed_form_return_derivative(dm, tau);
    sup_rp = std::max(sup_rp, rp);
    inf_rp = std::min(inf_rp, rp);
  }
  CHECK(close(dm.lambda1(), 1.0 / sup_rp, 1e-8));
  CHECK(close(dm.lambda2(), 1.0 / inf_rp, 1e-8));
  CHECK(dm.lambda1() <= dm.lambda2());
  CHECK(dm.lambda2() < 1.0);
  // R expands uniformly: two-point slopes stay above 1/λ2's reciprocal floor.
  for (int i = 1; i + 1 < 200; ++i) {
    const double a =
        dm.delta() + (dm.h_inv_delta() - dm.delta()) * i / 200.0;
    const double b = a + (dm.h_inv_delta() - dm.delta()) / 200.0;
    const double slope = (dm.return_map(b) - dm.return_map(a)) / (b - a);
    CHECK(slope > 1.0);
  }
}

TEST_CASE("the repeller is a genuine fixed point of both maps") {
  const DynamicsMaps& dm = reference_dm();
  const double t = dm.tau_star();
  CHECK(close(dm.firing_map(t), t, 1e-11));
  CHECK(close(dm.return_map(t), t, 1e-11));
  // Re-solve with a much looser tolerance: same root, looser accuracy.
  CHECK(close(dm.fixed_point(1e-6), t, 1e-5));
}

TEST_CASE("strict maps reject the absorbing tails, clamped maps resolve them") {
  const DynamicsMaps& dm = reference_dm();
  CHECK_THROWS_AS(dm.firing_map(dm.delta() * 0.5), DomainError);
  CHECK_THROWS_AS(dm.firing_map(dm.delta()), DomainError);
  CHECK_THROWS_AS(dm.firing_map(1.0), DomainError);
  CHECK_THROWS_AS(dm.return_map(dm.h_inv_delta()), DomainError);
  CHECK_THROWS_AS(dm.return_map(0.99), DomainError);
  CHECK_THROWS_AS(dm.firing_map_inverse(dm.min_post_pulse_diff()), DomainError);
  CHECK(testsup::contains(
      testsup::message_of([&] { dm.firing_map(0.01); }), "outside open domain"));

  // A difference at or below δ is absorbed: the survivor's next gap is a full
  // unit (firing map) and the cycle ends merged (return map).
  CHECK(dm.firing_map(dm.delta(), MapMode::clamped) == 1.0);
  CHECK(dm.firing_map(0.0, MapMode::clamped) == 1.0);
  CHECK(dm.return_map(dm.delta(), MapMode::clamped) == 0.0);
  CHECK(dm.return_map(0.02, MapMode::clamped) == 0.0);
  CHECK(dm.return_map(dm.h_inv_delta(), MapMode::clamped) == 1.0);
  CHECK(dm.return_map(0.999, MapMode::clamped) == 1.0);
  // Inside the open domain both modes agree bit for bit.
  CHECK(dm.firing_map(0.5, MapMode::clamped) == dm.firing_map(0.5));
  CHECK(dm.return_map(0.5, MapMode::clamped) == dm.return_map(0.5));
}

TEST_CASE("construction rejects bad inputs with precise reasons") {
  CHECK_THROWS_AS(DynamicsMaps(reference_pf(), 0.0), DomainError);
  CHECK_THROWS_AS(DynamicsMaps(reference_pf(), 1.0), DomainError);
  CHECK_THROWS_AS(DynamicsMaps(reference_pf(), -0.5), DomainError);
  CHECK(testsup::contains(
      testsup::message_of([] { DynamicsMaps(reference_pf(), 2.0); }),
      "coupling strength"));
  // A convex table fails phase-function validation inside the constructor.
  CHECK(testsup::contains(
      testsup::message_of([] {
        DynamicsMaps(PhaseFunction::tabulated({0.0, 0.1, 0.4, 1.0}), 0.02);
      }),
      "invalid phase response function"));
  pcosync::DynamicsOptions bad;
  bad.bisect_tol = 0.0;
  CHECK_THROWS_AS(DynamicsMaps(reference_pf(), 0.02, bad), DomainError);
}

TEST_CASE("densely sampled tables reproduce the analytic dynamics") {
  std::vector<double> tab(4001);
  const double c = 1.0 / (1.0 - std::exp(-2.0));
  for (int i = 0; i <= 4000; ++i) {
    tab[static_cast<std::size_t>(i)] = c * (1.0 - std::exp(-2.0 * i / 4000.0));
  }
  tab.back() = 1.0;
  const DynamicsMaps dm(PhaseFunction::tabulated(tab), 0.02);
  CHECK(close(dm.delta(), kDelta, 1e-6));
  CHECK(close(dm.tau_star(), kTauStar, 1e-6));
  CHECK(close(dm.lambda0(), kLambda0, 1e-3));
}

TEST_CASE("bisection utility brackets, converges, and reports failures") {
  const double root = pcosync::bisect_root(
      [](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-14, "sqrt2");
  CHECK(close(root, std::sqrt(2.0), 1e-13));
  CHECK_THROWS_AS(pcosync::bisect_root([](double x) { return x * x + 1.0; },
                                       -1.0, 1.0, 1e-12, "none"),
                  ConvergenceError);
  const double mn = pcosync::golden_minimize(
      [](double x) { return (x - 0.3) * (x - 0.3); }, 0.0, 1.0, 1e-12);
  CHECK(close(mn, 0.3, 1e-6));
}
