#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace stablab {

// Ordinary least squares y = a + b x with the standard error of the slope.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    std::size_t n_points = 0;
};

inline LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_linear: need >= 2 matching points");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fit_linear: degenerate abscissae");
    LinearFit fit;
    fit.n_points = x.size();
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        ss += r * r;
    }
    if (x.size() > 2)
        fit.slope_stderr = std::sqrt(ss / (n - 2.0) * n / denom);
    return fit;
}

inline LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("fit_loglog: values must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return fit_linear(lx, ly);
}

// Per-iteration history of a Picard solve.
struct ConvergenceReport {
    std::vector<double> iteration_diffs;      // ||u^n - u^{n-1}|| in the solve norm
    std::vector<double> contraction_ratios;   // successive quotients
    bool converged = false;
    std::size_t iterations = 0;
    double lambda_used = 0.0;
    double final_diff = 0.0;

    nlohmann::json to_json() const {
        return {{"iteration_diffs", iteration_diffs},
                {"contraction_ratios", contraction_ratios},
                {"converged", converged},
                {"iterations", iterations},
                {"lambda_used", lambda_used},
                {"final_diff", final_diff}};
    }
};

// Slope fit with context (used for smoothing rates, PP4/PP5 checks).
struct FitReport {
    double slope = 0.0;
    double slope_stderr = 0.0;
    double theoretical_exponent = 0.0;
    std::size_t n_points = 0;
    std::vector<double> abscissae;
    std::vector<double> values;

    nlohmann::json to_json() const {
        return {{"slope", slope},
                {"slope_stderr", slope_stderr},
                {"theoretical_exponent", theoretical_exponent},
                {"n_points", n_points},
                {"abscissae", abscissae},
                {"values", values}};
    }
};

} // namespace stablab
