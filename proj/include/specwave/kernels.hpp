#pragma once

namespace specwave {

/// Scalar multiplier family for the damped wave flow: the fundamental
/// solution D(t,l) of y'' + y' + l*y = 0 with y(0)=0, y'(0)=1, its time
/// derivatives, the heat symbol e^{-t l}, the one-step integral
/// I(h,l) = int_0^h D(s,l) ds, and the low-frequency difference symbol
/// e^{t l/2}(D(t,l) - e^{-t l}).
///
/// D has three branches (hyperbolic for l < 1/4, polynomial at l = 1/4,
/// oscillatory for l > 1/4). Inside |l - 1/4| <= branch_halfwidth the
/// evaluator switches to the even power series in (1/4 - l), which
/// analytically continues both outer branches, so values are continuous
/// across the branch point to ~1e-10 for t <= 1e3.
///
/// All evaluators are pure; exponentials that underflow return exact 0.
class MultiplierKernel {
public:
    explicit MultiplierKernel(double branch_halfwidth = 1e-6, int series_terms = 12);

    double D(double t, double lambda) const;
    double dtD(double t, double lambda) const;
    /// -dtD - lambda*D, i.e. the second derivative forced by the defining ODE.
    double dt2D(double t, double lambda) const;
    static double heat(double t, double lambda);
    /// int_0^h D(s,lambda) ds, closed form (1 - dtD - D)/lambda away from 0.
    double step_integral(double h, double lambda) const;
    /// e^{t l/2}(D(t,l) - e^{-t l}) on l in [0, 1/8), cancellation-free.
    double diff_symbol(double t, double lambda) const;

    double branch_halfwidth() const { return branch_halfwidth_; }
    int series_terms() const { return series_terms_; }

private:
    double sinhc_series(double t, double om2) const;  // sinh(t w)/(t w) as series in om2 = w^2
    double cosh_series(double t, double om2) const;   // cosh(t w) as series in om2

    double branch_halfwidth_;
    int series_terms_;
};

// Default-parameter entry points (branch_halfwidth 1e-6, 12 terms).
double eval_D(double t, double lambda);
double eval_dtD(double t, double lambda);
double eval_dt2D(double t, double lambda);
double eval_heat(double t, double lambda);
double eval_step_integral(double h, double lambda);
double eval_diff_symbol(double t, double lambda);

}  // namespace specwave
