// Implementation of the jam-perturbed map analysis and jammer strategies.
#include "pcosync/jam_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "pcosync/bisect.hpp"
#include "pcosync/errors.hpp"

namespace pcosync {
namespace {

constexpr std::uint64_t kSaltUniformJam = 0x756e696a616d0001ULL;

void require_lambda(double lambda) {
  if (!(lambda > 1.0) || !std::isfinite(lambda)) {
    throw DomainError("expansion factor must exceed 1");
  }
}

void require_tau(double tau) {
  if (!(tau >= 0.0) || !(tau <= 1.0)) {
    throw DomainError("difference must lie in [0, 1]");
  }
}

}  // namespace

JamMapValues jam_maps(const DynamicsMaps& dm, double lambda, double tau) {
  require_lambda(lambda);
  require_tau(tau);
  JamMapValues out;
  const double inner = dm.firing_map(tau, MapMode::clamped);
  out.outer = dm.firing_map(lambda * inner, MapMode::clamped);
  out.scaled = std::min(1.0, lambda * dm.return_map(tau, MapMode::clamped));
  out.stretched = dm.return_map(lambda * tau, MapMode::clamped);
  return out;
}

JamInterval jam_interval(const DynamicsMaps& dm, double tau) {
  const JamMapValues v = jam_maps(dm, dm.lambda0(), tau);
  // The three base maps assume the pulse finds both nodes below threshold and
  // stretches the difference by at most λ0. A pulse landing inside the
  // leader's absorption width instead triggers its firing, and the laggard
  // takes the jam and the triggered pulse in the same instant — one full
  // extra advance on the gap, which can exceed a λ0 stretch near the
  // absorption edges. One pulse advances a phase x to h(1 - x), so each end
  // widens by that stacked advance: the post-exchange gap h(τ) for the lower
  // end, the full-cycle difference R(τ) for the upper.
  const double gap = dm.firing_map(tau, MapMode::clamped);
  const double stacked = dm.firing_map(1.0 - gap, MapMode::clamped);
  const double lo = dm.firing_map(std::max(dm.lambda0() * gap, stacked),
                                  MapMode::clamped);
  const double ret = dm.return_map(tau, MapMode::clamped);
  const double late =
      (tau <= dm.delta()) ? 0.0 : dm.firing_map(1.0 - ret, MapMode::clamped);
  return JamInterval{lo, std::max({v.scaled, v.stretched, late})};
}

JamFixedPoints jam_fixed_points(const DynamicsMaps& dm, double lambda, double tol) {
  require_lambda(lambda);
  if (!(tol > 0)) throw DomainError("tolerance must be positive");
  JamFixedPoints out;
  const double delta = dm.delta();
  const double r_at_scaled_delta = dm.return_map(lambda * delta, MapMode::clamped);
  if (!(r_at_scaled_delta < delta)) {
    char buf[192];
    std::snprintf(buf, sizeof buf,
                  "R(λδ) = %.17g does not fall below δ = %.17g: no sign change "
                  "brackets a fixed point of R(λτ), λR(τ), or h(λh(τ))",
                  r_at_scaled_delta, delta);
    out.note = buf;
    return out;
  }
  out.exists = true;

  // R(λτ) - τ is negative at δ (hypothesis) and positive at h^{-1}(δ)/λ where
  // the stretched map hits 1; the unique root lies between.
  const double hi = dm.h_inv_delta() / lambda;
  out.stretched = bisect_root(
      [&](double t) { return dm.return_map(lambda * t, MapMode::clamped) - t; },
      delta, hi, tol, "stretched-map fixed point");
  out.scaled = lambda * out.stretched;
  out.outer = dm.firing_map_inverse(out.stretched);

  // The scaling identities are exact; a loose residual means the bisection or
  // the maps are inconsistent.
  const double guard = 100 * tol + 1e-9;
  const double scaled_residual =
      std::abs(lambda * dm.return_map(out.scaled, MapMode::clamped) - out.scaled);
  const double outer_inner = dm.firing_map(out.outer, MapMode::clamped);
  const double outer_residual = std::abs(
      dm.firing_map(lambda * outer_inner, MapMode::clamped) - out.outer);
  if (scaled_residual > guard || outer_residual > guard) {
    throw ConvergenceError("perturbed fixed points failed direct verification");
  }
  return out;
}

SafeRegion safe_region(const DynamicsMaps& dm, double tol) {
  JamFixedPoints fps = jam_fixed_points(dm, dm.lambda0(), tol);
  if (!fps.exists) throw HypothesisError(fps.note);
  SafeRegion out;
  out.window_lo = fps.stretched;
  out.window_hi = fps.outer;
  out.sync_probability_bound = 1.0 - (out.window_hi - out.window_lo);
  if (!(out.window_lo < dm.tau_star()) || !(dm.tau_star() < out.window_hi)) {
    throw ConvergenceError("perturbed window does not bracket the unjammed repeller");
  }
  return out;
}

double jammed_cycle_difference(const PhaseFunction& pf, const CouplingConfig& cfg,
                               double tau, std::optional<double> jam_time) {
  const double phases[2] = {0.0, tau};
  Session session(pf, cfg, phases);
  if (jam_time) session.schedule_jam(*jam_time);
  session.run_one_cycle();
  return session.synchronized() ? 0.0 : session.last_boundary_tau();
}

UniformRandomJammer::UniformRandomJammer(double span) : span_(span), rng_(0) {
  if (!(span > 0) || !std::isfinite(span)) {
    throw DomainError("jam span must be positive");
  }
}

void UniformRandomJammer::begin_session(std::uint64_t session_seed) {
  rng_ = derive_stream(session_seed, kSaltUniformJam);
}

std::optional<double> UniformRandomJammer::next_pulse_time(const Session&,
                                                           double now) {
  return now + rng_.uniform01() * span_;
}

AdversarialGridJammer::AdversarialGridJammer(const DynamicsMaps& dm, int grid_points)
    : dm_(&dm), grid_points_(grid_points) {
  if (grid_points < 1) throw DomainError("grid needs at least one candidate");
}

std::optional<double> AdversarialGridJammer::next_pulse_time(const Session& session,
                                                             double now) {
  if (session.node_count() != 2) {
    throw DomainError("the grid jammer targets two-node sessions");
  }
  if (session.group_count() == 1) return std::nullopt;
  const double delta = dm_->delta();
  const double hd = dm_->h_inv_delta();
  double best_score = -std::numeric_limits<double>::infinity();
  double best_t = now;
  for (int i = 0; i < grid_points_; ++i) {
    const double t =
        now + (i + 0.5) / static_cast<double>(grid_points_);
    Session clone = session.probe_clone();
    clone.schedule_jam(t);
    clone.run_one_cycle();
    // Deepest inside the non-absorbing gap survives longest; merging loses.
    double score;
    if (clone.synchronized()) {
      score = -std::numeric_limits<double>::infinity();
    } else {
      const double next_tau = clone.last_boundary_tau();
      score = std::min(next_tau - delta, hd - next_tau);
    }
    if (score > best_score) {
      best_score = score;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace pcosync
