#include <doctest.h>

#include <cmath>
#include <functional>
#include <stdexcept>

#include "specwave/analysis.hpp"
#include "specwave/backend.hpp"
#include "specwave/rng.hpp"

using namespace specwave;

namespace {
const double kPi = 3.14159265358979323846;

EvolutionTrace synthetic_trace(const std::vector<double>& times,
                               const std::function<TraceRow(double)>& make) {
    EvolutionTrace tr;
    for (double t : times) tr.rows.push_back(make(t));
    return tr;
}

std::vector<double> logspace(double lo, double hi, std::size_t n) { return log_spaced(lo, hi, n); }

}  // namespace

TEST_CASE("fit_decay: exact power law, scale invariance, exponential flag") {
    const auto times = logspace(1.0, 100.0, 20);
    auto tr = synthetic_trace(times, [](double t) {
        TraceRow r;
        r.t = t;
        r.l2 = 5.0 * std::pow(t, -0.25);
        return r;
    });
    const DecayFit fit = fit_decay(tr, "l2", 1.0, 100.0);
    CHECK(std::abs(fit.exponent - 0.25) < 1e-12);
    CHECK(std::abs(fit.intercept - std::log(5.0)) < 1e-12);
    CHECK(fit.power_law);
    CHECK(fit.n_points == 20);

    auto tr2 = synthetic_trace(times, [](double t) {
        TraceRow r;
        r.t = t;
        r.l2 = 35.0 * std::pow(t, -0.25);  // 7x the first series
        return r;
    });
    const DecayFit fit2 = fit_decay(tr2, "l2", 1.0, 100.0);
    CHECK(std::abs(fit2.exponent - fit.exponent) < 1e-13);
    CHECK(std::abs(fit2.intercept - (fit.intercept + std::log(7.0))) < 1e-12);

    auto tre = synthetic_trace(times, [](double t) {
        TraceRow r;
        r.t = t;
        r.l2 = std::exp(-t);
        return r;
    });
    const DecayFit fe = fit_decay(tre, "l2", 1.0, 100.0);
    CHECK(fe.r_squared < 0.95);
    CHECK_FALSE(fe.power_law);
}

TEST_CASE("fit_decay: errors") {
    const auto times = logspace(1.0, 100.0, 20);
    auto tr = synthetic_trace(times, [](double t) {
        TraceRow r;
        r.t = t;
        r.l2 = 1.0 / t;
        return r;
    });
    CHECK_THROWS_AS((void)fit_decay(tr, "l2", 50.0, 60.0), std::invalid_argument);  // < 8 points
    auto bad = synthetic_trace(times, [](double t) {
        TraceRow r;
        r.t = t;
        r.l2 = t < 50.0 ? 1.0 : 0.0;
        return r;
    });
    CHECK_THROWS_AS((void)fit_decay(bad, "l2", 1.0, 100.0), std::runtime_error);
}

TEST_CASE("predict_exponent: paper exponents and monotonicity") {
    CHECK(predict_exponent(0.25, 1.0, 0, 0.0, DecayTarget::L2).predicted ==
          doctest::Approx(0.25).epsilon(1e-14));
    CHECK(predict_exponent(0.25, 1.0, 0, 0.0, DecayTarget::Linf).predicted ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK(predict_exponent(0.25, 1.0, 0, 0.0, DecayTarget::DiffL2).predicted ==
          doctest::Approx(1.25).epsilon(1e-14));
    CHECK(predict_exponent(0.25, 1.0, 1, 0.0, DecayTarget::L2).predicted ==
          doctest::Approx(1.25).epsilon(1e-14));
    CHECK(predict_exponent(0.25, 1.0, 0, 1.0, DecayTarget::L2).predicted ==
          doctest::Approx(0.75).epsilon(1e-14));

    Rng rng(9);
    for (int i = 0; i < 100; ++i) {
        const double alpha = 0.1 + rng.uniform();
        const double q1 = 1.0 + rng.uniform() * 0.5;
        const double q2 = q1 + rng.uniform() * (2.0 - q1);
        const double s = 2.0 * rng.uniform();
        for (DecayTarget tgt : {DecayTarget::Linf, DecayTarget::L2}) {
            CHECK(predict_exponent(alpha, q1, 0, s, tgt).predicted >=
                  predict_exponent(alpha, q2, 0, s, tgt).predicted - 1e-14);
            CHECK(predict_exponent(alpha, q1, 1, s, tgt).predicted ==
                  doctest::Approx(predict_exponent(alpha, q1, 0, s, tgt).predicted + 1.0)
                      .epsilon(1e-13));
            CHECK(predict_exponent(alpha, q1, 0, s + 1.0, tgt).predicted ==
                  doctest::Approx(predict_exponent(alpha, q1, 0, s, tgt).predicted + 0.5)
                      .epsilon(1e-13));
        }
    }
    CHECK_THROWS_AS((void)predict_exponent(0.25, 2.5, 0, 0.0, DecayTarget::L2),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)predict_exponent(0.25, 1.0, 2, 0.0, DecayTarget::L2),
                    std::invalid_argument);
}

TEST_CASE("criticality: admissible and boundary cases") {
    const CriticalityRecord a = criticality(4.0, 1.0, 0.25);
    CHECK(a.p_fujita == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(a.admissible);
    CHECK(a.q_lo == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(a.q_hi == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(a.delta == 0);
    CHECK(a.sigma == doctest::Approx(1.0).epsilon(1e-14));

    const CriticalityRecord b = criticality(3.0, 1.5, 0.25);
    CHECK_FALSE(b.admissible);  // 2 alpha (p-1) = 1 < q

    const CriticalityRecord c = criticality(2.0, 1.0, 0.25);
    CHECK_FALSE(c.admissible);  // sub-critical p < p_F(alpha,1)
    CHECK(c.p_fujita == doctest::Approx(3.0).epsilon(1e-14));

    const CriticalityRecord d = criticality(4.0, 1.5, 0.25);
    CHECK(d.admissible);
    CHECK(d.delta == 1);  // q = 2 alpha (p-1) exactly

    // alpha > 1/2 brings the extra cap p <= 2 alpha/(2 alpha - 1)
    const CriticalityRecord e = criticality(4.0, 1.2, 1.0);
    CHECK_FALSE(e.admissible);  // p > 2 alpha/(2 alpha - 1) = 2
    const CriticalityRecord f = criticality(1.9, 1.2, 1.0);
    CHECK(f.admissible);

    // endpoint consistency: q at the right endpoint (when below 2) has delta 1
    for (double p : {3.5, 4.0, 5.0}) {
        const double alpha = 0.25;
        const double q_hi = std::min(2.0, 2.0 * alpha * (p - 1.0));
        const CriticalityRecord g = criticality(p, q_hi, alpha);
        if (q_hi < 2.0) CHECK(g.delta == 1);
    }
    CHECK_THROWS_AS((void)criticality(1.0, 1.0, 0.25), std::invalid_argument);
    CHECK_THROWS_AS((void)criticality(2.0, 2.5, 0.25), std::invalid_argument);
}

TEST_CASE("weighted X norm: trivial weights and exact-weight trace") {
    const auto times = logspace(0.5, 50.0, 16);
    // q = 2 kills the common factor; X = sup(<t> ut (log)^{-delta} + <t>^{1/2} h1 + l2)
    auto tr = synthetic_trace(times, [](double t) {
        TraceRow r;
        r.t = t;
        const double tb = std::sqrt(1.0 + t * t);
        r.ut_l2 = 1.0 / tb;
        r.h1dot = 1.0 / std::sqrt(tb);
        r.l2 = 1.0;
        return r;
    });
    CHECK(weighted_X_norm(tr, 2.0, 0.25, 0) == doctest::Approx(3.0).epsilon(1e-12));

    // q = 1: weights <t>^{2a/2...}; build rows that cancel them exactly
    const double alpha = 0.25, q = 1.0;
    const double e = 2.0 * alpha * (1.0 / q - 0.5);
    auto tr2 = synthetic_trace(times, [&](double t) {
        TraceRow r;
        r.t = t;
        const double tb = std::sqrt(1.0 + t * t);
        r.ut_l2 = std::pow(tb, -(e + 1.0)) * std::log(2.0 + t);  // delta = 1 case
        r.h1dot = std::pow(tb, -(e + 0.5));
        r.l2 = std::pow(tb, -e);
        return r;
    });
    CHECK(weighted_X_norm(tr2, q, alpha, 1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_THROWS_AS((void)weighted_X_norm(EvolutionTrace{}, 1.0, 0.25, 0), std::invalid_argument);
}

TEST_CASE("weighted Y norm: exact weights and missing channels") {
    const auto times = logspace(0.5, 50.0, 16);
    const double p = 4.0, q = 1.0, alpha = 0.25, sigma = 1.0;
    auto tr = synthetic_trace(times, [&](double t) {
        TraceRow r;
        r.t = t;
        const double tb = std::sqrt(1.0 + t * t);
        r.f_l2 = std::pow(tb, -2.0 * alpha * (1.0 / q - 1.0 / (2.0 * p)) * p);
        r.f_lsig = std::pow(tb, -2.0 * alpha * (1.0 / q - 1.0 / (sigma * p)) * p);
        return r;
    });
    CHECK(weighted_Y_norm(tr, p, q, alpha, sigma) == doctest::Approx(2.0).epsilon(1e-12));

    auto bare = synthetic_trace(times, [](double t) {
        TraceRow r;
        r.t = t;
        return r;
    });
    CHECK_THROWS_AS((void)weighted_Y_norm(bare, p, q, alpha, sigma), std::invalid_argument);
}

TEST_CASE("scan_kernel_bounds: branch-point column and bounds") {
    KernelScanGrid grid;
    grid.t_lo = 0.05;
    grid.t_hi = 20.0;
    grid.t_count = 400;
    grid.lambda_lo = 0.25;
    grid.lambda_hi = 0.25;
    grid.lambda_count = 2;
    grid.diff_t_count = 5;
    grid.diff_lambda_count = 64;
    const KernelBoundsReport rep = scan_kernel_bounds(grid, 2);
    CHECK(std::abs(rep.sup_D - 2.0 / std::exp(1.0)) < 1e-3);  // max of t e^{-t/2} at t = 2

    KernelScanGrid full;
    full.t_count = 300;
    full.lambda_count = 300;
    full.diff_t_count = 9;
    full.diff_lambda_count = 500;
    const KernelBoundsReport r2 = scan_kernel_bounds(full, 1);
    CHECK(r2.sup_D <= 3.0);
    CHECK(r2.sup_dtD <= 3.0);
    CHECK(r2.diff_constant > 0.0);
    for (const auto& row : r2.diff_rows) {
        CHECK(row.weighted_sup <= r2.diff_constant + 1e-15);
    }
}

TEST_CASE("check_inequalities: ratios, skips, determinism") {
    const BackendPtr b = build_dirichlet_1d(200.0 * kPi, 256);
    InequalityOptions opts;
    opts.trials = 50;
    opts.seed = 42;
    const InequalityReport rep = check_inequalities(*b, opts);

    const auto find = [&](const std::string& name) {
        for (const auto& r : rep.results) {
            if (r.name == name) return r;
        }
        throw std::runtime_error("missing inequality " + name);
    };
    CHECK(find("sobolev").applicable);
    CHECK(find("sobolev").max_ratio > 0.0);
    CHECK(find("gagliardo-nirenberg").applicable);
    CHECK(find("gagliardo-nirenberg").max_ratio > 0.0);
    CHECK_FALSE(find("critical-sobolev").applicable);  // alpha = 1/4 <= 1/2
    CHECK(find("critical-sobolev").skip_reason.find("alpha") != std::string::npos);
    // scalar calculus bound sup sqrt(l) e^{-tl} sqrt(t) = (2e)^{-1/2}
    CHECK(find("heat-smoothing").max_ratio <= 1.0 / std::sqrt(2.0 * std::exp(1.0)) + 1e-12);

    const InequalityReport again = check_inequalities(*b, opts);
    for (std::size_t i = 0; i < rep.results.size(); ++i) {
        CHECK(rep.results[i].max_ratio == again.results[i].max_ratio);
    }

    // critical Sobolev applies for a fractional backend with alpha = 1
    const BackendPtr frac = build_fractional(build_dirichlet_1d(200.0 * kPi, 256), 0.5);
    const InequalityReport frep = check_inequalities(*frac, opts);
    for (const auto& r : frep.results) {
        if (r.name == "critical-sobolev") {
            CHECK(r.applicable);
            CHECK(r.max_ratio > 0.0);
        }
    }
}

TEST_CASE("check_inequalities: single eigenfunction closed form") {
    const double L = 10.0;
    const BackendPtr b = build_dirichlet_1d(L, 64);
    const std::size_t k = 5;
    std::vector<double> ef(64);
    for (std::size_t j = 0; j < 64; ++j) ef[j] = b->eigenfunction(k, j);
    const GridFunction f = b->make_grid_function(ef);
    const double linf = b->lq_norm(f, std::numeric_limits<double>::infinity());
    const double l2 = b->lq_norm(f, 2.0);
    const double h1 = std::sqrt(b->eigenvalues()[k]);  // unit-L2 eigenfunction
    const double ratio = linf / (std::sqrt(l2) * std::sqrt(h1));
    // ||phi_k||_inf <= sqrt(2/L); the grid may miss the crest slightly
    CHECK(l2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(linf <= std::sqrt(2.0 / L) + 1e-12);
    CHECK(ratio > 0.0);
    CHECK(std::isfinite(ratio));
}

TEST_CASE("check_inequalities_levels: fixed-band refinement stability") {
    InequalityOptions opts;
    opts.trials = 40;
    opts.seed = 7;
    const InequalityScanReport rep =
        check_inequalities_levels(200.0 * kPi, {128, 256, 512}, opts, 0.25, 0.2);
    CHECK(rep.levels.size() == 3);
    CHECK(rep.stable);
    for (const auto& [name, step] : rep.max_step) {
        if (name == "sobolev" || name == "gagliardo-nirenberg") CHECK(step < 0.2);
    }
    CHECK_THROWS_AS(
        (void)check_inequalities_levels(1.0, {128}, opts, 0.25, 0.2), std::invalid_argument);
}
