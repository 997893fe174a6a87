#include "specwave/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace specwave {

namespace {

void require_nonneg(double t, double lambda) {
    if (!(t >= 0.0)) {
        throw std::invalid_argument("multiplier kernel: t must be >= 0, got " + std::to_string(t));
    }
    if (!(lambda >= 0.0)) {
        throw std::invalid_argument("multiplier kernel: lambda must be >= 0, got " +
                                    std::to_string(lambda));
    }
}

}  // namespace

MultiplierKernel::MultiplierKernel(double branch_halfwidth, int series_terms)
    : branch_halfwidth_(branch_halfwidth), series_terms_(series_terms) {
    if (!(branch_halfwidth > 0.0)) {
        throw std::invalid_argument("multiplier kernel: branch_halfwidth must be positive");
    }
    if (series_terms < 4) {
        throw std::invalid_argument("multiplier kernel: series_terms must be >= 4");
    }
}

double MultiplierKernel::sinhc_series(double t, double om2) const {
    // sinh(t w)/(t w) = sum_n (t^2 w^2)^n / (2n+1)!, valid for w^2 of either sign.
    const double x = t * t * om2;
    double term = 1.0;
    double sum = 1.0;
    for (int n = 1; n < series_terms_; ++n) {
        term *= x / (static_cast<double>(2 * n) * static_cast<double>(2 * n + 1));
        sum += term;
    }
    return sum;
}

double MultiplierKernel::cosh_series(double t, double om2) const {
    const double x = t * t * om2;
    double term = 1.0;
    double sum = 1.0;
    for (int n = 1; n < series_terms_; ++n) {
        term *= x / (static_cast<double>(2 * n - 1) * static_cast<double>(2 * n));
        sum += term;
    }
    return sum;
}

double MultiplierKernel::D(double t, double lambda) const {
    require_nonneg(t, lambda);
    const double d = 0.25 - lambda;
    if (std::abs(d) <= branch_halfwidth_) {
        return std::exp(-0.5 * t) * t * sinhc_series(t, d);
    }
    if (lambda < 0.25) {
        // e^{-t/2} sinh(t w)/w with both exponents kept non-positive.
        const double w = std::sqrt(d);
        return (std::exp(t * (w - 0.5)) - std::exp(-t * (w + 0.5))) / (2.0 * w);
    }
    const double w = std::sqrt(-d);
    return std::exp(-0.5 * t) * std::sin(t * w) / w;
}

double MultiplierKernel::dtD(double t, double lambda) const {
    require_nonneg(t, lambda);
    const double d = 0.25 - lambda;
    if (std::abs(d) <= branch_halfwidth_) {
        const double Dv = std::exp(-0.5 * t) * t * sinhc_series(t, d);
        return -0.5 * Dv + std::exp(-0.5 * t) * cosh_series(t, d);
    }
    if (lambda < 0.25) {
        const double w = std::sqrt(d);
        const double Dv = (std::exp(t * (w - 0.5)) - std::exp(-t * (w + 0.5))) / (2.0 * w);
        const double cosh_part = 0.5 * (std::exp(t * (w - 0.5)) + std::exp(-t * (w + 0.5)));
        return -0.5 * Dv + cosh_part;
    }
    const double w = std::sqrt(-d);
    const double e = std::exp(-0.5 * t);
    return -0.5 * e * std::sin(t * w) / w + e * std::cos(t * w);
}

double MultiplierKernel::dt2D(double t, double lambda) const {
    return -dtD(t, lambda) - lambda * D(t, lambda);
}

double MultiplierKernel::heat(double t, double lambda) {
    require_nonneg(t, lambda);
    return std::exp(-t * lambda);
}

namespace {

// (1 - e^{-x})/x, accurate down to x = 0.
double one_minus_exp_over(double x) {
    if (std::abs(x) > 1e-8) {
        return -std::expm1(-x) / x;
    }
    return 1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0;
}

}  // namespace

double MultiplierKernel::step_integral(double h, double lambda) const {
    if (!(h > 0.0)) {
        throw std::invalid_argument("step_integral: h must be positive, got " + std::to_string(h));
    }
    if (!(lambda >= 0.0)) {
        throw std::invalid_argument("step_integral: lambda must be >= 0");
    }
    if (lambda >= branch_halfwidth_) {
        // Integrate D'' + D' + lambda D = 0 over [0,h] with D(0)=0, D'(0)=1.
        return (1.0 - dtD(h, lambda) - D(h, lambda)) / lambda;
    }
    // Near lambda = 0 use the root factorization e^{-a s}, e^{-b s} with
    // a b = lambda, a + b = 1; the closed form above loses all digits there.
    const double r = std::sqrt(1.0 - 4.0 * lambda);
    const double a = 2.0 * lambda / (1.0 + r);
    const double b = 0.5 * (1.0 + r);
    return h * (one_minus_exp_over(a * h) - one_minus_exp_over(b * h)) / (b - a);
}

double MultiplierKernel::diff_symbol(double t, double lambda) const {
    if (!(t >= 0.0)) {
        throw std::invalid_argument("diff_symbol: t must be >= 0");
    }
    if (!(lambda >= 0.0) || lambda >= 0.125) {
        throw std::domain_error("diff_symbol: lambda must lie in [0, 1/8), got " +
                                std::to_string(lambda));
    }
    const double r = std::sqrt(1.0 - 4.0 * lambda);
    const double onep = 1.0 + r;
    const double w = 4.0 * t * lambda * lambda / (onep * onep);
    // (1/r - 1) e^{-t l/2 - w}  +  e^{-t l/2} (e^{-w} - 1)  -  e^{-t(1+r-l)/2}/r,
    // with 1 - r rewritten as 4 l/(1+r) to avoid cancellation at small l.
    const double term1 = (4.0 * lambda / (r * onep)) * std::exp(-0.5 * t * lambda - w);
    const double term2 = std::exp(-0.5 * t * lambda) * std::expm1(-w);
    const double term3 = -std::exp(-0.5 * t * (1.0 + r - lambda)) / r;
    return term1 + term2 + term3;
}

namespace {
const MultiplierKernel& default_kernel() {
    static const MultiplierKernel k;
    return k;
}
}  // namespace

double eval_D(double t, double lambda) { return default_kernel().D(t, lambda); }
double eval_dtD(double t, double lambda) { return default_kernel().dtD(t, lambda); }
double eval_dt2D(double t, double lambda) { return default_kernel().dt2D(t, lambda); }
double eval_heat(double t, double lambda) { return MultiplierKernel::heat(t, lambda); }
double eval_step_integral(double h, double lambda) {
    return default_kernel().step_integral(h, lambda);
}
double eval_diff_symbol(double t, double lambda) {
    return default_kernel().diff_symbol(t, lambda);
}

}  // namespace specwave
