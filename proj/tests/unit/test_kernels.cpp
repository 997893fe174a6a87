#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "specwave/kernels.hpp"
#include "specwave/rng.hpp"

using namespace specwave;

namespace {

// Long-double series oracle for D near the branch point: e^{-t/2} t *
// sum (t^2 (1/4 - l))^n / (2n+1)!, 50 terms.
long double D_series_oracle(long double t, long double lambda) {
    const long double x = t * t * (0.25L - lambda);
    long double term = 1.0L, sum = 1.0L;
    for (int n = 1; n < 50; ++n) {
        term *= x / (static_cast<long double>(2 * n) * static_cast<long double>(2 * n + 1));
        sum += term;
    }
    return expl(-0.5L * t) * t * sum;
}

long double D_oracle(long double t, long double lambda) {
    const long double d = 0.25L - lambda;
    if (fabsl(d) < 1e-3L) return D_series_oracle(t, lambda);
    if (lambda < 0.25L) {
        const long double w = sqrtl(d);
        return expl(-0.5L * t) * sinhl(t * w) / w;
    }
    const long double w = sqrtl(-d);
    return expl(-0.5L * t) * sinl(t * w) / w;
}

// Adaptive Simpson for the step-integral oracle.
template <typename F>
double simpson(F f, double a, double b, double fa, double fm, double fb, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson(f, a, m, fa, flm, fm, tol / 2, depth - 1) +
           simpson(f, m, b, fm, frm, fb, tol / 2, depth - 1);
}

template <typename F>
double integrate(F f, double a, double b, double tol = 1e-13) {
    return simpson(f, a, b, f(a), f(0.5 * (a + b)), f(b), tol, 40);
}

}  // namespace

TEST_CASE("D: branch values") {
    CHECK(eval_D(1.0, 0.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
    CHECK(eval_D(2.0, 0.25) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(std::abs(eval_D(M_PI, 1.25)) < 1e-15);
    CHECK(eval_D(0.0, 7.0) == 0.0);
    CHECK(eval_D(0.0, 0.25) == 0.0);
    CHECK(eval_D(0.0, 0.1) == 0.0);
}

TEST_CASE("D: series window against 50-term long-double oracle") {
    for (double t : {0.1, 1.0, 2.0, 10.0, 100.0, 1000.0}) {
        for (double off : {-1e-10, 1e-10, -1e-9, 1e-9, -5e-7, 5e-7}) {
            const double lam = 0.25 + off;
            const double got = eval_D(t, lam);
            const double want = static_cast<double>(D_oracle(t, lam));
            CHECK(std::abs(got - want) < 1e-9);
        }
    }
    CHECK(eval_D(2.0, 0.25 + 1e-10) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-9));
    CHECK(eval_D(2.0, 0.25 - 1e-10) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("D: branch continuity across the window edge") {
    double worst = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double t = 1000.0 * i / 2000.0;
        worst = std::max(worst, std::abs(eval_D(t, 0.25 + 1e-9) - eval_D(t, 0.25 - 1e-9)));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("D: positivity on the hyperbolic branch and global bound") {
    Rng rng(7);
    for (int i = 0; i < 2000; ++i) {
        const double t = 0.01 + 100.0 * rng.uniform();
        const double lam = 0.25 * rng.uniform();
        CHECK(eval_D(t, lam) > 0.0);
    }
    double supD = 0.0, supDp = 0.0;
    for (int i = 1; i <= 200; ++i) {
        for (int j = 0; j <= 200; ++j) {
            const double t = 100.0 * i / 200.0;
            const double lam = 100.0 * j / 200.0;
            supD = std::max(supD, std::abs(eval_D(t, lam)));
            supDp = std::max(supDp, std::abs(eval_dtD(t, lam)));
        }
    }
    CHECK(supD <= 3.0);
    CHECK(supDp <= 3.0);
}

TEST_CASE("dtD: values and finite-difference oracle") {
    for (double lam : {0.0, 0.1, 0.25, 0.75, 10.0}) {
        CHECK(eval_dtD(0.0, lam) == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(std::abs(eval_dtD(2.0, 0.25)) < 1e-14);

    Rng rng(11);
    const double h = 1e-6;
    for (int i = 0; i < 300; ++i) {
        const double t = 0.1 + 20.0 * rng.uniform();
        const double lam = 100.0 * rng.uniform();
        const double fd = (eval_D(t + h, lam) - eval_D(t - h, lam)) / (2.0 * h);
        CHECK(eval_dtD(t, lam) == doctest::Approx(fd).epsilon(1e-7).scale(1.0));
    }
}

TEST_CASE("dt2D: values, second-difference oracle, ODE identity") {
    CHECK(eval_dt2D(0.0, 3.7) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(eval_dt2D(1.0, 0.0) == doctest::Approx(-std::exp(-1.0)).epsilon(1e-12));

    Rng rng(13);
    const double h = 1e-4;
    for (int i = 0; i < 300; ++i) {
        const double t = 0.1 + 20.0 * rng.uniform();
        const double lam = 100.0 * rng.uniform();
        const double fd =
            (eval_D(t + h, lam) - 2.0 * eval_D(t, lam) + eval_D(t - h, lam)) / (h * h);
        CHECK(eval_dt2D(t, lam) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
    }

    // The identity holds by construction; this catches future branch drift.
    for (int i = 0; i < 10000; ++i) {
        const double t = 100.0 * (i % 100 + 1) / 100.0;
        const double lam = 100.0 * (i / 100) / 100.0;
        const double resid = eval_dt2D(t, lam) + eval_dtD(t, lam) + lam * eval_D(t, lam);
        CHECK(std::abs(resid) < 1e-12 * (1.0 + lam));
    }
}

TEST_CASE("heat symbol") {
    CHECK(eval_heat(0.0, 5.0) == 1.0);
    CHECK(eval_heat(3.0, 0.0) == 1.0);
    CHECK(eval_heat(1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
}

TEST_CASE("step integral: closed forms and quadrature oracle") {
    for (double h : {0.1, 1.0, 2.5}) {
        CHECK(eval_step_integral(h, 0.0) ==
              doctest::Approx(h - 1.0 + std::exp(-h)).epsilon(1e-12));
    }
    Rng rng(17);
    for (int i = 0; i < 25; ++i) {
        const double h = 0.05 + 3.0 * rng.uniform();
        const double lam = i < 5 ? 1e-7 * rng.uniform() : 30.0 * rng.uniform();
        const double quad = integrate([&](double s) { return eval_D(s, lam); }, 0.0, h);
        CHECK(eval_step_integral(h, lam) == doctest::Approx(quad).epsilon(1e-10).scale(1e-10));
    }
    CHECK(eval_step_integral(1.0, 1.0) ==
          doctest::Approx(integrate([](double s) { return eval_D(s, 1.0); }, 0.0, 1.0))
              .epsilon(1e-10));
    // Small-step expansion I(h) = h^2/2 + O(h^3)
    for (double lam : {0.0, 0.2, 1.0, 10.0}) {
        const double h = 1e-3;
        CHECK(std::abs(eval_step_integral(h, lam) - 0.5 * h * h) < 5.0 * h * h * h);
    }
}

TEST_CASE("diff symbol: values, extended-precision oracle, domain") {
    for (double t : {0.5, 2.0, 10.0}) {
        CHECK(eval_diff_symbol(t, 0.0) == doctest::Approx(-std::exp(-t)).epsilon(1e-13));
    }
    // naive long-double evaluation e^{t l/2}(D - e^{-t l})
    for (double t : {1.0, 10.0, 50.0}) {
        for (double lam : {0.01, 0.05, 0.1, 0.124}) {
            const long double naive =
                expl(0.5L * t * lam) * (D_oracle(t, lam) - expl(-static_cast<long double>(t) * lam));
            CHECK(std::abs(eval_diff_symbol(t, lam) - static_cast<double>(naive)) < 1e-9);
        }
    }
    CHECK_THROWS_AS((void)eval_diff_symbol(1.0, 0.125), std::domain_error);
    CHECK_THROWS_AS((void)eval_diff_symbol(1.0, -0.01), std::domain_error);
}

TEST_CASE("parameter errors") {
    CHECK_THROWS_AS((void)eval_D(-1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)eval_D(1.0, -0.5), std::invalid_argument);
    CHECK_THROWS_AS((void)eval_dtD(-0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)eval_step_integral(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)eval_step_integral(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(MultiplierKernel(0.0, 12), std::invalid_argument);
    CHECK_THROWS_AS(MultiplierKernel(1e-6, 2), std::invalid_argument);
}

TEST_CASE("large-t underflow returns exact zero, not an error") {
    CHECK(eval_D(4000.0, 1.0) == 0.0);
    CHECK(eval_dtD(4000.0, 1.0) == 0.0);
    CHECK(eval_D(1e6, 0.9) == 0.0);
}
