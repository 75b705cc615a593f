// Implementation of the two-node cycle maps and their derived geometry.
#include "pcosync/coupling_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>

#include "pcosync/bisect.hpp"
#include "pcosync/errors.hpp"

namespace pcosync {
namespace {

[[noreturn]] void throw_out_of_domain(const char* what, double value, double lo,
                                      double hi) {
  char buf[192];
  std::snprintf(buf, sizeof buf, "%s: argument %.17g outside open domain (%.17g, %.17g)",
                what, value, lo, hi);
  throw DomainError(buf);
}

}  // namespace

DynamicsMaps::DynamicsMaps(PhaseFunction pf, double epsilon, DynamicsOptions opts)
    : pf_(std::move(pf)), epsilon_(epsilon), opts_(opts) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0) || !std::isfinite(epsilon)) {
    throw DomainError("coupling strength must lie in (0, 1)");
  }
  if (!(opts_.bisect_tol > 0) || opts_.extremum_grid < 3) {
    throw DomainError("invalid dynamics options");
  }
  // Tables are validated at their own knots: in between they are exactly
  // linear, which a finer grid would misreport as a concavity defect.
  const std::size_t grid = pf_.kind() == PhaseFunctionKind::custom_tabulated
                               ? std::max<std::size_t>(pf_.table_size(), 3)
                               : std::size_t{1001};
  ValidationReport report = validate_phase_function(pf_, grid);
  if (!report.valid()) {
    throw DomainError("invalid phase response function: " + report.violations.front());
  }

  delta_ = 1.0 - pf_.inverse(1.0 - epsilon_);
  f_inv_eps_ = pf_.inverse(epsilon_);
  // Concavity of f makes f^{-1}(ε) + f^{-1}(1-ε) ≤ 1, so delta ≥ f^{-1}(ε)
  // and f(delta) - ε ≥ 0; guard anyway for near-degenerate tabulated inputs.
  const double fd = pf_.value(delta_) - epsilon_;
  if (!(fd >= 0.0)) {
    throw DomainError("phase function too close to linear: absorption geometry degenerates");
  }
  h_inv_delta_ = 1.0 - pf_.inverse(fd);
  if (!(delta_ < h_inv_delta_)) {
    throw DomainError("absorption spans the whole cycle: no interior dynamics");
  }

  // h(delta) - delta = 1 - delta > 0 and h(1) - 1 = f^{-1}(ε) - 1 < 0, so the
  // decreasing map h has exactly one fixed point in (delta, 1). Tighten the
  // bisection so the residual of R at the result stays within bisect_tol.
  tau_star_ = fixed_point(opts_.bisect_tol * 0.25);

  compute_extrema();
}

double DynamicsMaps::h_unchecked(double tau) const {
  return pf_.inverse(std::min(1.0, epsilon_ + pf_.value(1.0 - tau)));
}

double DynamicsMaps::h_inv_unchecked(double y) const {
  return 1.0 - pf_.inverse(std::max(0.0, pf_.value(y) - epsilon_));
}

double DynamicsMaps::abs_h_derivative(double tau) const {
  // h'(τ) = -f'(1-τ) / f'(h(τ)); f' > 0 so the magnitude is the plain ratio.
  return pf_.derivative(1.0 - tau) / pf_.derivative(h_unchecked(tau));
}

void DynamicsMaps::compute_extrema() {
  const std::size_t n = opts_.extremum_grid;

  // lambda0 = sup |h'| over [delta, 1]; the endpoints are evaluable directly.
  {
    const double a = delta_, b = 1.0;
    const double step = (b - a) / static_cast<double>(n - 1);
    double best = -1.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = (i + 1 == n) ? b : a + step * static_cast<double>(i);
      const double v = abs_h_derivative(x);
      if (v > best) {
        best = v;
        best_i = i;
      }
    }
    const double lo = (best_i == 0) ? a : a + step * static_cast<double>(best_i - 1);
    const double hi = (best_i + 1 >= n) ? b : a + step * static_cast<double>(best_i + 1);
    const double x =
        golden_minimize([this](double t) { return -abs_h_derivative(t); }, lo, hi,
                        opts_.bisect_tol);
    lambda0_ = std::max(best, abs_h_derivative(x));
  }

  // R'(τ) = |h'(h(τ))| · |h'(τ)|; scan [delta, h_inv_delta] for both extrema.
  {
    const double a = delta_, b = h_inv_delta_;
    const double step = (b - a) / static_cast<double>(n - 1);
    auto rprime = [this](double t) {
      return abs_h_derivative(h_unchecked(t)) * abs_h_derivative(t);
    };
    double best_max = -1.0, best_min = std::numeric_limits<double>::infinity();
    std::size_t max_i = 0, min_i = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = (i + 1 == n) ? b : a + step * static_cast<double>(i);
      const double v = rprime(x);
      if (v > best_max) {
        best_max = v;
        max_i = i;
      }
      if (v < best_min) {
        best_min = v;
        min_i = i;
      }
    }
    auto refine = [&](std::size_t idx, bool maximize) {
      const double lo = (idx == 0) ? a : a + step * static_cast<double>(idx - 1);
      const double hi = (idx + 1 >= n) ? b : a + step * static_cast<double>(idx + 1);
      const double x = golden_minimize(
          [&](double t) { return maximize ? -rprime(t) : rprime(t); }, lo, hi,
          opts_.bisect_tol);
      return rprime(x);
    };
    const double sup_rp = std::max(best_max, refine(max_i, true));
    const double inf_rp = std::min(best_min, refine(min_i, false));
    if (!(inf_rp > 1.0)) {
      throw ConvergenceError("return map is not uniformly expanding");
    }
    lambda1_ = 1.0 / sup_rp;
    lambda2_ = 1.0 / inf_rp;
  }
}

double DynamicsMaps::firing_map(double tau, MapMode mode) const {
  if (mode == MapMode::clamped) {
    if (tau <= delta_) return 1.0;
    if (tau > 1.0) return 0.0;
    return h_unchecked(tau);
  }
  if (!(tau > delta_) || !(tau < 1.0)) {
    throw_out_of_domain("firing map", tau, delta_, 1.0);
  }
  return h_unchecked(tau);
}

double DynamicsMaps::firing_map_inverse(double y) const {
  if (!(y > f_inv_eps_) || !(y < 1.0)) {
    throw_out_of_domain("firing map inverse", y, f_inv_eps_, 1.0);
  }
  return h_inv_unchecked(y);
}

double DynamicsMaps::return_map(double tau, MapMode mode) const {
  if (mode == MapMode::clamped) {
    if (tau <= delta_) return 0.0;
    if (tau >= h_inv_delta_) return 1.0;
    return h_unchecked(h_unchecked(tau));
  }
  if (!(tau > delta_) || !(tau < h_inv_delta_)) {
    throw_out_of_domain("return map", tau, delta_, h_inv_delta_);
  }
  return h_unchecked(h_unchecked(tau));
}

double DynamicsMaps::return_map_inverse(double y) const {
  if (!(y >= f_inv_eps_) || !(y <= 1.0)) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "return map inverse: argument %.17g outside range [%.17g, 1]", y,
                  f_inv_eps_);
    throw DomainError(buf);
  }
  // R^{-1} = h^{-1} ∘ h^{-1}; the inner preimage lands in [delta, 1], inside
  // the outer h^{-1} domain.
  return h_inv_unchecked(h_inv_unchecked(y));
}

double DynamicsMaps::fixed_point(double tol) const {
  return bisect_root([this](double t) { return h_unchecked(t) - t; }, delta_, 1.0,
                     tol, "repeller fixed point");
}

}  // namespace pcosync
