#include "pcosync/phase_function.hpp"

#include <cmath>
#include <cstdio>

#include "pcosync/errors.hpp"

namespace pcosync {

namespace {

void require_unit_interval(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s must lie in [0, 1], got %.17g", what, v);
        throw DomainError(buf);
    }
}

}  // namespace

PhaseFunction PhaseFunction::peskin(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw DomainError("peskin gamma must be positive and finite");
    }
    PhaseFunction pf;
    pf.kind_ = PhaseFunctionKind::peskin;
    pf.gamma_ = gamma;
    pf.scale_ = 1.0 / (1.0 - std::exp(-gamma));  // pins f(1) = 1
    return pf;
}

PhaseFunction PhaseFunction::tabulated(std::vector<double> values) {
    if (values.size() < 2) {
        throw DomainError("tabulated phase function needs at least 2 samples");
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw DomainError("tabulated sample not finite");
    }
    PhaseFunction pf;
    pf.kind_ = PhaseFunctionKind::custom_tabulated;
    pf.table_ = std::move(values);
    return pf;
}

double PhaseFunction::value(double phase) const {
    require_unit_interval(phase, "phase");
    if (kind_ == PhaseFunctionKind::peskin) {
        return scale_ * (1.0 - std::exp(-gamma_ * phase));
    }
    const std::size_t segs = table_.size() - 1;
    const double t = phase * static_cast<double>(segs);
    std::size_t i = static_cast<std::size_t>(t);
    if (i >= segs) i = segs - 1;
    const double frac = t - static_cast<double>(i);
    return table_[i] + (table_[i + 1] - table_[i]) * frac;
}

double PhaseFunction::inverse(double state) const {
    require_unit_interval(state, "state");
    if (kind_ == PhaseFunctionKind::peskin) {
        // x = c(1 - e^{-g phi})  =>  phi = -ln(1 - x/c)/g
        return -std::log1p(-state / scale_) / gamma_;
    }
    const std::size_t segs = table_.size() - 1;
    for (std::size_t i = 0; i < segs; ++i) {
        const double a = table_[i], b = table_[i + 1];
        if ((state >= a && state <= b) || (state >= b && state <= a)) {
            const double run = b - a;
            const double frac = (run == 0.0) ? 0.0 : (state - a) / run;
            return (static_cast<double>(i) + frac) / static_cast<double>(segs);
        }
    }
    throw DomainError("state not covered by the tabulated range");
}

double PhaseFunction::derivative(double phase) const {
    require_unit_interval(phase, "phase");
    if (kind_ == PhaseFunctionKind::peskin) {
        return scale_ * gamma_ * std::exp(-gamma_ * phase);
    }
    const std::size_t segs = table_.size() - 1;
    std::size_t i = static_cast<std::size_t>(phase * static_cast<double>(segs));
    if (i >= segs) i = segs - 1;
    return (table_[i + 1] - table_[i]) * static_cast<double>(segs);
}

double PhaseFunction::gamma() const {
    if (kind_ != PhaseFunctionKind::peskin) {
        throw DomainError("gamma defined only for the peskin kind");
    }
    return gamma_;
}

double PhaseFunction::scale() const {
    if (kind_ != PhaseFunctionKind::peskin) {
        throw DomainError("scale defined only for the peskin kind");
    }
    return scale_;
}

ValidationReport validate_phase_function(const PhaseFunction& pf,
                                         std::size_t grid_size) {
    if (grid_size < 3) throw DomainError("validation grid needs at least 3 points");
    constexpr double kEndpointTol = 1e-12;

    ValidationReport report;
    auto flag = [&report](const char* fmt, double at) {
        char buf[96];
        std::snprintf(buf, sizeof buf, fmt, at);
        report.violations.emplace_back(buf);
    };

    std::vector<double> y(grid_size);
    const double step = 1.0 / static_cast<double>(grid_size - 1);
    for (std::size_t j = 0; j < grid_size; ++j) {
        y[j] = pf.value(static_cast<double>(j) * step);
    }

    if (std::fabs(y.front()) > kEndpointTol) {
        flag("f(0) = %.17g, expected 0", y.front());
    }
    if (std::fabs(y.back() - 1.0) > kEndpointTol) {
        flag("f(1) = %.17g, expected 1", y.back());
    }
    for (std::size_t j = 0; j + 1 < grid_size; ++j) {
        if (!(y[j + 1] > y[j])) {
            flag("not strictly increasing at phase %.6g", static_cast<double>(j) * step);
            break;
        }
    }
    for (std::size_t j = 1; j + 1 < grid_size; ++j) {
        const double d2 = y[j + 1] - 2.0 * y[j] + y[j - 1];
        if (!(d2 < 0.0)) {
            flag("not strictly concave at phase %.6g", static_cast<double>(j) * step);
            break;
        }
    }
    for (std::size_t j = 0; j < grid_size; ++j) {
        if (!(pf.derivative(static_cast<double>(j) * step) > 0.0)) {
            flag("derivative not positive at phase %.6g", static_cast<double>(j) * step);
            break;
        }
    }
    return report;
}

}  // namespace pcosync
