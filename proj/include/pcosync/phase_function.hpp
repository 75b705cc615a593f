// Oscillator state curve x = f(phase). The analytic pipeline needs f to rise
// from f(0)=0 to f(1)=1, strictly increasing and strictly concave; the Peskin
// family f(phi) = c(1 - exp(-gamma*phi)), c = 1/(1 - exp(-gamma)) satisfies
// all of that for gamma > 0. A tabulated variant (uniform grid, linear
// interpolation) exists for experimentation and for exercising validation.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace pcosync {

enum class PhaseFunctionKind { peskin, custom_tabulated };

class PhaseFunction {
  public:
    static PhaseFunction peskin(double gamma);

    // `values` holds f at uniformly spaced phases 0, 1/(k-1), ..., 1.
    // Values are taken verbatim; shape defects are reported by
    // validate_phase_function, not rejected here.
    static PhaseFunction tabulated(std::vector<double> values);

    // State at a phase in [0,1].
    double value(double phase) const;

    // Phase at a state in [0,1]; exact closed form for Peskin, per-segment
    // linear inversion for tables.
    double inverse(double state) const;

    // df/dphase at a phase in [0,1]. Tables report the slope of the segment
    // to the right (last segment at phase 1).
    double derivative(double phase) const;

    PhaseFunctionKind kind() const { return kind_; }
    double gamma() const;  // Peskin only
    double scale() const;  // Peskin normalization constant c
    std::size_t table_size() const { return table_.size(); }  // 0 for Peskin

  private:
    PhaseFunction() = default;

    PhaseFunctionKind kind_ = PhaseFunctionKind::peskin;
    double gamma_ = 0.0;
    double scale_ = 0.0;
    std::vector<double> table_;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool valid() const { return violations.empty(); }
};

// Checks endpoint normalization, strict monotonicity, strict concavity
// (second differences), and derivative positivity on `grid_size` uniform
// phases. For tabulated functions pass the table's own size, otherwise the
// interpolant's flat curvature inside segments is reported as a violation.
ValidationReport validate_phase_function(const PhaseFunction& pf,
                                         std::size_t grid_size = 1001);

}  // namespace pcosync
