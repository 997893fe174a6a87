#pragma once

#include <cstddef>
#include <vector>

namespace specwave {

/// Result of a log-log power-law fit: series ~ C * t^{-exponent} over
/// [t_lo, t_hi]. power_law is cleared when r_squared < 0.95, which is how
/// exponential (spectral-gap) regimes get flagged.
struct DecayFit {
    double exponent = 0.0;
    double intercept = 0.0;  // log C
    double t_lo = 0.0;
    double t_hi = 0.0;
    double r_squared = 0.0;
    std::size_t n_points = 0;
    bool power_law = false;
};

/// Least squares on (log t, log y). Throws std::invalid_argument when fewer
/// than 8 points fall in the window and std::runtime_error on non-positive
/// values inside it.
DecayFit fit_powerlaw(const std::vector<double>& times, const std::vector<double>& values,
                      double t_lo, double t_hi);

/// Log-spaced grid including both endpoints.
std::vector<double> log_spaced(double lo, double hi, std::size_t count);
std::vector<double> lin_spaced(double lo, double hi, std::size_t count);

}  // namespace specwave
