// Shared fixtures for the unit tests: the reference configuration, closeness
// helpers, and scratch-directory plumbing.
#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pcosync/coupling_dynamics.hpp"
#include "pcosync/phase_function.hpp"

namespace testsup {

constexpr double kGamma = 2.0;
constexpr double kEpsilon = 0.02;

inline const pcosync::PhaseFunction& reference_pf() {
  static const pcosync::PhaseFunction pf = pcosync::PhaseFunction::peskin(kGamma);
  return pf;
}

inline const pcosync::DynamicsMaps& reference_dm() {
  static const pcosync::DynamicsMaps dm(reference_pf(), kEpsilon);
  return dm;
}

inline bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

// Distance treating 0 and 1 as the same point of the phase circle.
inline double circular_gap(double a, double b) {
  const double d = std::fabs(a - b);
  return std::min(d, 1.0 - d);
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fresh scratch directory under the build tree's temp space.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  const std::filesystem::path base =
      std::filesystem::temp_directory_path() / ("pcosync_tests_" + tag);
  std::filesystem::remove_all(base);
  std::filesystem::create_directories(base);
  return base;
}

template <typename Fn>
std::string message_of(Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

inline bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace testsup
