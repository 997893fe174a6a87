#include "specwave/fit.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace specwave {

DecayFit fit_powerlaw(const std::vector<double>& times, const std::vector<double>& values,
                      double t_lo, double t_hi) {
    if (times.size() != values.size()) {
        throw std::invalid_argument("fit_powerlaw: times/values length mismatch");
    }
    if (!(t_lo < t_hi)) {
        throw std::invalid_argument("fit_powerlaw: window must satisfy t_lo < t_hi");
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        if (t < t_lo || t > t_hi) continue;
        const double y = values[i];
        if (!(y > 0.0)) {
            throw std::runtime_error("fit_powerlaw: non-positive value " + std::to_string(y) +
                                     " at t = " + std::to_string(t) + " inside fit window");
        }
        lx.push_back(std::log(t));
        ly.push_back(std::log(y));
    }
    if (lx.size() < 8) {
        throw std::invalid_argument("fit_powerlaw: need at least 8 samples in window, have " +
                                    std::to_string(lx.size()));
    }

    const std::size_t n = lx.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = lx[i] - mx;
        const double dy = ly[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    const double slope = sxy / sxx;

    DecayFit fit;
    fit.exponent = -slope;
    fit.intercept = my - slope * mx;
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    fit.n_points = n;
    if (syy <= 0.0) {
        fit.r_squared = 1.0;  // constant series, perfectly flat power law
    } else {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = ly[i] - (fit.intercept + slope * lx[i]);
            ss_res += e * e;
        }
        fit.r_squared = 1.0 - ss_res / syy;
    }
    fit.power_law = fit.r_squared >= 0.95;
    return fit;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2) {
        throw std::invalid_argument("log_spaced: need 0 < lo < hi and count >= 2");
    }
    std::vector<double> out(count);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                    static_cast<double>(count - 1));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> lin_spaced(double lo, double hi, std::size_t count) {
    if (!(hi >= lo) || count < 1) {
        throw std::invalid_argument("lin_spaced: need hi >= lo and count >= 1");
    }
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    out.back() = hi;
    return out;
}

}  // namespace specwave
