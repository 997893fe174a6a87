#include "specwave/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "specwave/kernels.hpp"
#include "specwave/parallel.hpp"
#include "specwave/rng.hpp"

namespace specwave {

namespace {
double t_bracket(double t) { return std::sqrt(1.0 + t * t); }
}  // namespace

DecayFit fit_decay(const EvolutionTrace& trace, const std::string& which_norm, double t_lo,
                   double t_hi) {
    return fit_powerlaw(trace.times(), trace.series(which_norm), t_lo, t_hi);
}

DecayTarget parse_decay_target(const std::string& text) {
    if (text == "linf") return DecayTarget::Linf;
    if (text == "l2") return DecayTarget::L2;
    if (text == "diff_linf") return DecayTarget::DiffLinf;
    if (text == "diff_l2") return DecayTarget::DiffL2;
    throw std::invalid_argument("decay target must be linf|l2|diff_linf|diff_l2, got \"" + text +
                                "\"");
}

const char* to_string(DecayTarget target) {
    switch (target) {
        case DecayTarget::Linf: return "linf";
        case DecayTarget::L2: return "l2";
        case DecayTarget::DiffLinf: return "diff_linf";
        case DecayTarget::DiffL2: return "diff_l2";
    }
    return "l2";
}

ExponentPrediction predict_exponent(double alpha, double q, int k, double s, DecayTarget target) {
    if (!(alpha > 0.0)) throw std::invalid_argument("predict_exponent: alpha must be > 0");
    if (!(q >= 1.0 && q <= 2.0)) {
        throw std::invalid_argument("predict_exponent: q must lie in [1,2], got " +
                                    std::to_string(q));
    }
    if (k != 0 && k != 1) throw std::invalid_argument("predict_exponent: k must be 0 or 1");
    if (!(s >= 0.0)) throw std::invalid_argument("predict_exponent: s must be >= 0");

    ExponentPrediction pred{alpha, q, k, s, target, 0.0};
    switch (target) {
        case DecayTarget::Linf:
            pred.predicted = 2.0 * alpha / q + k + 0.5 * s;
            break;
        case DecayTarget::L2:
            pred.predicted = 2.0 * alpha * (1.0 / q - 0.5) + k + 0.5 * s;
            break;
        case DecayTarget::DiffLinf:
            pred.predicted = 2.0 * alpha / q + k + 0.5 * s + 1.0;
            break;
        case DecayTarget::DiffL2:
            pred.predicted = 2.0 * alpha * (1.0 / q - 0.5) + k + 0.5 * s + 1.0;
            break;
    }
    return pred;
}

CriticalityRecord criticality(double p, double q, double alpha) {
    if (!(p > 1.0)) throw std::invalid_argument("criticality: p must be > 1");
    if (!(q >= 1.0 && q <= 2.0)) throw std::invalid_argument("criticality: q must lie in [1,2]");
    if (!(alpha > 0.0)) throw std::invalid_argument("criticality: alpha must be > 0");

    CriticalityRecord rec;
    rec.p = p;
    rec.q = q;
    rec.alpha = alpha;
    rec.p_fujita = 1.0 + q / (2.0 * alpha);
    rec.sigma = std::max(1.0, 2.0 / p);
    rec.q_lo = std::max(1.0, 2.0 / p);
    rec.q_hi = std::min(2.0, 2.0 * alpha * (p - 1.0));
    rec.delta = (q == 2.0 * alpha * (p - 1.0)) ? 1 : 0;

    const double p_f1 = 1.0 + 1.0 / (2.0 * alpha);  // p_F(alpha, 1)
    rec.admissible = true;
    if (!(p > p_f1)) {
        rec.admissible = false;
        rec.reason = "p <= p_F(alpha,1) = " + std::to_string(p_f1);
    } else if (!(2.0 / p < 2.0 * alpha * (p - 1.0))) {
        rec.admissible = false;
        rec.reason = "2/p >= 2 alpha (p-1)";
    } else if (q < rec.q_lo || q > rec.q_hi) {
        rec.admissible = false;
        rec.reason = "q outside [" + std::to_string(rec.q_lo) + ", " + std::to_string(rec.q_hi) + "]";
    } else if (alpha > 0.5 && !(p <= 2.0 * alpha / (2.0 * alpha - 1.0))) {
        rec.admissible = false;
        rec.reason = "p > 2 alpha/(2 alpha - 1) with alpha > 1/2";
    }
    return rec;
}

double weighted_X_norm(const EvolutionTrace& trace, double q, double alpha, int delta) {
    if (trace.rows.empty()) throw std::invalid_argument("weighted_X_norm: empty trace");
    const double e = 2.0 * alpha * (1.0 / q - 0.5);
    double sup = 0.0;
    for (const TraceRow& r : trace.rows) {
        const double tb = t_bracket(r.t);
        const double logw = delta == 0 ? 1.0 : 1.0 / std::log(2.0 + r.t);
        const double v = std::pow(tb, e + 1.0) * logw * r.ut_l2 +
                         std::pow(tb, e + 0.5) * r.h1dot + std::pow(tb, e) * r.l2;
        sup = std::max(sup, v);
    }
    return sup;
}

double weighted_Y_norm(const EvolutionTrace& trace, double p, double q, double alpha,
                       double sigma) {
    if (trace.rows.empty()) throw std::invalid_argument("weighted_Y_norm: empty trace");
    double sup = 0.0;
    for (const TraceRow& r : trace.rows) {
        if (std::isnan(r.f_l2) || std::isnan(r.f_lsig)) {
            throw std::invalid_argument(
                "weighted_Y_norm: trace does not record the forcing norm channels");
        }
        const double tb = t_bracket(r.t);
        const double v = std::pow(tb, 2.0 * alpha * (1.0 / q - 1.0 / (2.0 * p)) * p) * r.f_l2 +
                         std::pow(tb, 2.0 * alpha * (1.0 / q - 1.0 / (sigma * p)) * p) * r.f_lsig;
        sup = std::max(sup, v);
    }
    return sup;
}

KernelBoundsReport scan_kernel_bounds(const KernelScanGrid& grid, int threads) {
    KernelBoundsReport report;
    report.grid = grid;

    const std::vector<double> ts = grid.t_log ? log_spaced(grid.t_lo, grid.t_hi, grid.t_count)
                                              : lin_spaced(grid.t_lo, grid.t_hi, grid.t_count);
    const std::vector<double> lams = lin_spaced(grid.lambda_lo, grid.lambda_hi, grid.lambda_count);

    struct RowMax {
        double d = 0.0, d_lam = 0.0;
        double dt = 0.0, dt_lam = 0.0;
    };
    std::vector<RowMax> rows(ts.size());
    parallel_for(ts.size(), threads, [&](std::size_t i) {
        const double t = ts[i];
        RowMax rm;
        for (double lam : lams) {
            const double d = std::abs(eval_D(t, lam));
            const double dp = std::abs(eval_dtD(t, lam));
            if (d > rm.d) {
                rm.d = d;
                rm.d_lam = lam;
            }
            if (dp > rm.dt) {
                rm.dt = dp;
                rm.dt_lam = lam;
            }
        }
        rows[i] = rm;
    });
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (rows[i].d > report.sup_D) {
            report.sup_D = rows[i].d;
            report.sup_D_t = ts[i];
            report.sup_D_lambda = rows[i].d_lam;
        }
        if (rows[i].dt > report.sup_dtD) {
            report.sup_dtD = rows[i].dt;
            report.sup_dtD_t = ts[i];
            report.sup_dtD_lambda = rows[i].dt_lam;
        }
    }

    const std::vector<double> dts = log_spaced(grid.diff_t_lo, grid.diff_t_hi, grid.diff_t_count);
    // Half-open [0, 1/8): place points strictly below the endpoint.
    std::vector<double> dlams(grid.diff_lambda_count);
    for (std::size_t j = 0; j < dlams.size(); ++j) {
        dlams[j] = 0.125 * static_cast<double>(j) / static_cast<double>(dlams.size());
    }
    report.diff_rows.resize(dts.size());
    parallel_for(dts.size(), threads, [&](std::size_t i) {
        const double t = dts[i];
        double sup = 0.0;
        for (double lam : dlams) sup = std::max(sup, std::abs(eval_diff_symbol(t, lam)));
        report.diff_rows[i] = DiffSymbolRow{t, sup, t_bracket(t) * sup};
    });
    for (const auto& row : report.diff_rows) {
        report.diff_constant = std::max(report.diff_constant, row.weighted_sup);
    }
    return report;
}

namespace {

struct TestFunction {
    std::vector<double> coeffs;   // spectral
    std::vector<double> samples;  // physical
};

TestFunction band_limited_noise(const SpectrumBackend& backend, std::size_t band, Rng& rng) {
    TestFunction f;
    f.coeffs.assign(backend.mode_count(), 0.0);
    for (std::size_t k = 0; k < band; ++k) f.coeffs[k] = rng.normal();
    backend.inverse_raw(f.coeffs, f.samples);
    return f;
}

double linf_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

InequalityReport check_inequalities(const SpectrumBackend& backend, const InequalityOptions& opts) {
    if (opts.trials < 1) throw std::invalid_argument("check_inequalities: trials must be >= 1");
    const std::size_t band = opts.band_modes > 0
                                 ? std::min(opts.band_modes, backend.mode_count())
                                 : std::max<std::size_t>(1, backend.mode_count() / 4);
    const double alpha = backend.alpha();
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("check_inequalities: backend has no alpha (give alpha_hint)");
    }
    const auto& lam = backend.eigenvalues();

    InequalityReport rep;
    rep.trials = opts.trials;
    rep.seed = opts.seed;
    rep.band_modes = band;

    InequalityResult sob{"sobolev", true, "", 0.0, opts.sobolev_s};
    const double s_min = 2.0 * alpha;  // q = inf case of s > 2 alpha (1 - 2/q)
    if (opts.sobolev_s <= s_min) {
        sob.applicable = false;
        sob.skip_reason = "s <= 2 alpha (1 - 2/q); inequality not claimed";
    }

    const double gn_exp = 4.0 * alpha * (0.5 - (std::isinf(opts.gn_q) ? 0.0 : 1.0 / opts.gn_q));
    InequalityResult gn{"gagliardo-nirenberg", true, "", 0.0, gn_exp};
    if (!(gn_exp < 1.0) || !(opts.gn_q > 2.0)) {
        gn.applicable = false;
        gn.skip_reason = "needs q > 2 and alpha(1/2 - 1/q) < 1/4";
    }

    InequalityResult cs{"critical-sobolev", true, "", 0.0, 0.0};
    double cs_q = 0.0;
    if (alpha > 0.5) {
        cs_q = 4.0 * alpha / (2.0 * alpha - 1.0);
        cs.exponent_a = cs_q;
    } else {
        cs.applicable = false;
        cs.skip_reason = "requires alpha > 1/2";
    }

    InequalityResult heat{"heat-smoothing", true, "", 0.0, 0.5};

    for (std::size_t trial = 0; trial < opts.trials; ++trial) {
        Rng rng = Rng::for_trial(opts.seed, trial);
        const TestFunction f = band_limited_noise(backend, band, rng);
        double l2 = 0.0, h1 = 0.0;
        for (std::size_t k = 0; k < f.coeffs.size(); ++k) {
            l2 += f.coeffs[k] * f.coeffs[k];
            h1 += lam[k] * f.coeffs[k] * f.coeffs[k];
        }
        l2 = std::sqrt(l2);
        h1 = std::sqrt(h1);
        const double linf = linf_of(f.samples);
        const GridFunction fg{f.samples, nullptr};

        if (sob.applicable) {
            double hs = 0.0;
            for (std::size_t k = 0; k < f.coeffs.size(); ++k) {
                hs += std::pow(1.0 + lam[k], opts.sobolev_s) * f.coeffs[k] * f.coeffs[k];
            }
            hs = std::sqrt(hs);
            if (hs > 0.0) sob.max_ratio = std::max(sob.max_ratio, linf / hs);
        }
        if (gn.applicable && l2 > 0.0 && h1 > 0.0) {
            double lhs;
            if (std::isinf(opts.gn_q)) {
                lhs = linf;
            } else {
                double s = 0.0;
                for (std::size_t j = 0; j < f.samples.size(); ++j) {
                    s += backend.quadrature_weights()[j] * std::pow(std::abs(f.samples[j]), opts.gn_q);
                }
                lhs = std::pow(s, 1.0 / opts.gn_q);
            }
            gn.max_ratio =
                std::max(gn.max_ratio, lhs / (std::pow(l2, 1.0 - gn_exp) * std::pow(h1, gn_exp)));
        }
        if (cs.applicable && h1 > 0.0) {
            double s = 0.0;
            for (std::size_t j = 0; j < f.samples.size(); ++j) {
                s += backend.quadrature_weights()[j] * std::pow(std::abs(f.samples[j]), cs_q);
            }
            cs.max_ratio = std::max(cs.max_ratio, std::pow(s, 1.0 / cs_q) / h1);
        }
        if (heat.applicable && l2 > 0.0) {
            // ||A^{1/2} e^{-tA} f||_2 <= t^{-1/2} ||f||_2 up to the scanned
            // constant; scalar bound sup_x sqrt(x) e^{-tx} = (2 e t)^{-1/2}.
            for (double t : {0.25, 1.0, 4.0, 16.0}) {
                double v = 0.0;
                for (std::size_t k = 0; k < f.coeffs.size(); ++k) {
                    const double m = std::sqrt(lam[k]) * std::exp(-t * lam[k]);
                    v += m * m * f.coeffs[k] * f.coeffs[k];
                }
                heat.max_ratio = std::max(heat.max_ratio, std::sqrt(v) / (l2 / std::sqrt(t)));
            }
        }
    }

    rep.results = {sob, gn, cs, heat};
    return rep;
}

InequalityScanReport check_inequalities_levels(double length, const std::vector<std::size_t>& levels,
                                               const InequalityOptions& opts, double band_fraction,
                                               double tolerance) {
    if (levels.size() < 2) {
        throw std::invalid_argument("check_inequalities_levels: need at least 2 levels");
    }
    if (!(band_fraction > 0.0 && band_fraction <= 1.0)) {
        throw std::invalid_argument("check_inequalities_levels: band fraction must be in (0,1]");
    }
    const std::size_t min_modes = *std::min_element(levels.begin(), levels.end());
    // Band pinned to the coarsest level so every level sees the same
    // random function class; otherwise the refinement study has no limit.
    const std::size_t band =
        std::max<std::size_t>(1, static_cast<std::size_t>(band_fraction * static_cast<double>(min_modes)));

    InequalityScanReport scan;
    scan.tolerance = tolerance;
    for (std::size_t n : levels) {
        InequalityOptions level_opts = opts;
        level_opts.band_modes = band;
        const BackendPtr backend = build_dirichlet_1d(length, n);
        InequalityLevelRow row;
        row.modes = n;
        row.results = check_inequalities(*backend, level_opts).results;
        scan.levels.push_back(std::move(row));
    }

    scan.stable = true;
    const std::size_t n_ineq = scan.levels.front().results.size();
    for (std::size_t i = 0; i < n_ineq; ++i) {
        double worst = 0.0;
        bool applicable = true;
        for (std::size_t l = 0; l + 1 < scan.levels.size(); ++l) {
            const auto& a = scan.levels[l].results[i];
            const auto& b = scan.levels[l + 1].results[i];
            if (!a.applicable || !b.applicable) {
                applicable = false;
                continue;
            }
            if (a.max_ratio > 0.0) {
                worst = std::max(worst, std::abs(b.max_ratio / a.max_ratio - 1.0));
            }
        }
        scan.max_step.emplace_back(scan.levels.front().results[i].name, worst);
        if (applicable && worst > tolerance) scan.stable = false;
    }
    return scan;
}

}  // namespace specwave
