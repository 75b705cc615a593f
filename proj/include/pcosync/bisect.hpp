// Bracketing bisection for monotone root finding; argument-tolerance based.
#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <utility>

#include "pcosync/errors.hpp"

namespace pcosync {

inline constexpr int kBisectMaxIter = 200;

// Finds x in [lo, hi] with fn(x) = 0, assuming fn changes sign across the
// bracket. Stops when the bracket width falls below tol. `label` names the
// equation in error messages.
template <typename F>
double bisect_root(F&& fn, double lo, double hi, double tol, const char* label) {
  if (!(tol > 0) || !(lo <= hi)) {
    throw DomainError(std::string(label) + ": invalid bracket or tolerance");
  }
  double flo = fn(lo);
  double fhi = fn(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if (std::signbit(flo) == std::signbit(fhi)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: no sign change on [%.17g, %.17g]", label,
                  lo, hi);
    throw ConvergenceError(buf);
  }
  for (int iter = 0; iter < kBisectMaxIter && (hi - lo) > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = fn(mid);
    if (fmid == 0) return mid;
    if (std::signbit(fmid) == std::signbit(flo)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  if ((hi - lo) > tol) {
    throw ConvergenceError(std::string(label) + ": bracket did not shrink to tolerance");
  }
  return 0.5 * (lo + hi);
}

// Locates the minimizer of fn on [lo, hi] by golden-section search; assumes a
// single interior minimum (or a monotone slide to an endpoint).
template <typename F>
double golden_minimize(F&& fn, double lo, double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = fn(x1);
  double f2 = fn(x2);
  for (int iter = 0; iter < kBisectMaxIter && (b - a) > tol; ++iter) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = fn(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = fn(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace pcosync
