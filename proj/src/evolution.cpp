#include "specwave/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "specwave/kernels.hpp"

namespace specwave {

Nonlinearity Nonlinearity::make(double p, Form form) {
    if (form != Form::None && !(p > 1.0)) {
        throw std::invalid_argument("nonlinearity: p must be > 1, got " + std::to_string(p));
    }
    return Nonlinearity{p, form};
}

Nonlinearity Nonlinearity::parse(double p, const std::string& text) {
    Form form;
    if (text == "+|u|^p") form = Form::AbsPow;
    else if (text == "-|u|^p") form = Form::NegAbsPow;
    else if (text == "+|u|^{p-1}u") form = Form::SignedPow;
    else if (text == "-|u|^{p-1}u") form = Form::NegSignedPow;
    else if (text == "none") form = Form::None;
    else {
        throw std::invalid_argument(
            "nonlinearity: form must be one of +|u|^p, -|u|^p, +|u|^{p-1}u, -|u|^{p-1}u, none; got \"" +
            text + "\"");
    }
    return make(p, form);
}

const char* Nonlinearity::form_name() const {
    switch (form) {
        case Form::AbsPow: return "+|u|^p";
        case Form::NegAbsPow: return "-|u|^p";
        case Form::SignedPow: return "+|u|^{p-1}u";
        case Form::NegSignedPow: return "-|u|^{p-1}u";
        case Form::None: return "none";
    }
    return "none";
}

std::vector<double> EvolutionTrace::times() const {
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = rows[i].t;
    return out;
}

std::vector<double> EvolutionTrace::series(const std::string& which) const {
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const TraceRow& r = rows[i];
        double v;
        if (which == "l1") v = r.l1;
        else if (which == "lq") v = r.lq;
        else if (which == "l2") v = r.l2;
        else if (which == "linf") v = r.linf;
        else if (which == "h1dot") v = r.h1dot;
        else if (which == "ut_l2") v = r.ut_l2;
        else if (which == "hs") v = r.hs;
        else if (which == "f_l2") v = r.f_l2;
        else if (which == "f_lsig") v = r.f_lsig;
        else throw std::invalid_argument("trace: unknown norm channel \"" + which + "\"");
        out[i] = v;
    }
    return out;
}

namespace {

void check_times(const std::vector<double>& times) {
    if (times.empty()) throw std::invalid_argument("times: empty");
    double prev = -1.0;
    for (double t : times) {
        if (!(t >= 0.0)) throw std::invalid_argument("times: must be >= 0");
        if (!(t > prev)) throw std::invalid_argument("times: must be strictly ascending");
        prev = t;
    }
}

void check_data(const CauchyData& data) {
    if (!data.u0.backend || data.u0.backend != data.u1.backend) {
        throw std::invalid_argument("cauchy data: u0 and u1 must share one backend");
    }
}

double coeff_l2(const std::vector<double>& c) {
    double s = 0.0;
    for (double x : c) s += x * x;
    return std::sqrt(s);
}

TraceRow make_row(const SpectrumBackend& backend, double t, const std::vector<double>& c,
                  const std::vector<double>& cdot, const GridFunction& u_phys, double lq_q,
                  double sobolev_s) {
    TraceRow row;
    row.t = t;
    row.l1 = backend.lq_norm(u_phys, 1.0);
    row.lq = backend.lq_norm(u_phys, lq_q);
    row.l2 = coeff_l2(c);
    row.linf = backend.lq_norm(u_phys, std::numeric_limits<double>::infinity());
    double h1 = 0.0;
    const auto& lam = backend.eigenvalues();
    for (std::size_t k = 0; k < c.size(); ++k) h1 += lam[k] * c[k] * c[k];
    row.h1dot = std::sqrt(h1);
    row.ut_l2 = coeff_l2(cdot);
    if (!std::isnan(sobolev_s)) {
        double hs = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            hs += std::pow(1.0 + lam[k], sobolev_s) * c[k] * c[k];
        }
        row.hs = std::sqrt(hs);
    }
    return row;
}

}  // namespace

EvolutionTrace linear_solve(const CauchyData& data, const std::vector<double>& times,
                            const TraceOptions& opts) {
    check_data(data);
    check_times(times);
    const BackendPtr backend = data.u0.backend;
    const auto& lam = backend->eigenvalues();
    const std::size_t n = backend->mode_count();

    EvolutionTrace trace;
    trace.backend = backend;
    trace.lq_q = opts.lq_q;
    trace.sobolev_s = opts.sobolev_s;
    trace.c0 = backend->forward(data.u0).coeffs;
    trace.c1 = backend->forward(data.u1).coeffs;

    std::vector<double> c(n), cdot(n);
    for (double t : times) {
        for (std::size_t k = 0; k < n; ++k) {
            const double D = eval_D(t, lam[k]);
            const double Dp = eval_dtD(t, lam[k]);
            const double Dpp = -Dp - lam[k] * D;
            const double s = trace.c0[k] + trace.c1[k];
            c[k] = D * s + Dp * trace.c0[k];
            cdot[k] = Dp * s + Dpp * trace.c0[k];
        }
        const GridFunction u = backend->inverse(backend->make_coeffs(c));
        trace.rows.push_back(make_row(*backend, t, c, cdot, u, opts.lq_q, opts.sobolev_s));
    }
    return trace;
}

EvolutionTrace heat_solve(const GridFunction& f, const std::vector<double>& times,
                          const TraceOptions& opts) {
    if (!f.backend) throw std::invalid_argument("heat_solve: missing backend");
    check_times(times);
    const BackendPtr backend = f.backend;
    const auto& lam = backend->eigenvalues();
    const std::size_t n = backend->mode_count();

    EvolutionTrace trace;
    trace.backend = backend;
    trace.lq_q = opts.lq_q;
    trace.sobolev_s = opts.sobolev_s;
    trace.c0 = backend->forward(f).coeffs;
    trace.c1.assign(n, 0.0);

    std::vector<double> c(n), cdot(n);
    for (double t : times) {
        for (std::size_t k = 0; k < n; ++k) {
            c[k] = trace.c0[k] * std::exp(-t * lam[k]);
            cdot[k] = -lam[k] * c[k];
        }
        const GridFunction u = backend->inverse(backend->make_coeffs(c));
        trace.rows.push_back(make_row(*backend, t, c, cdot, u, opts.lq_q, opts.sobolev_s));
    }
    return trace;
}

namespace {

struct StepTables {
    std::vector<double> D, Dp, Dpp, I;
    StepTables(const std::vector<double>& lam, double h) {
        const std::size_t n = lam.size();
        D.resize(n);
        Dp.resize(n);
        Dpp.resize(n);
        I.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            D[k] = eval_D(h, lam[k]);
            Dp[k] = eval_dtD(h, lam[k]);
            Dpp[k] = -Dp[k] - lam[k] * D[k];
            I[k] = eval_step_integral(h, lam[k]);
        }
    }
};

}  // namespace

EvolutionTrace nonlinear_evolve(const CauchyData& data, const Nonlinearity& F,
                                const EvolveOptions& opts) {
    check_data(data);
    if (!(opts.step > 0.0)) {
        throw std::invalid_argument("nonlinear_evolve: step must be positive");
    }
    if (!(opts.horizon >= opts.step)) {
        throw std::invalid_argument("nonlinear_evolve: horizon must be >= step");
    }
    if (opts.record_stride == 0) {
        throw std::invalid_argument("nonlinear_evolve: record_stride must be >= 1");
    }
    const BackendPtr backend = data.u0.backend;
    const auto& lam = backend->eigenvalues();
    const std::size_t n = backend->mode_count();
    const double h = opts.step;
    const std::size_t nsteps = static_cast<std::size_t>(std::llround(opts.horizon / h));

    const double sigma = std::isnan(opts.f_sigma) ? std::max(1.0, 2.0 / F.p) : opts.f_sigma;

    EvolutionTrace trace;
    trace.backend = backend;
    trace.lq_q = opts.lq_q;
    trace.sobolev_s = opts.sobolev_s;
    trace.sigma = sigma;
    trace.c0 = backend->forward(data.u0).coeffs;
    trace.c1 = backend->forward(data.u1).coeffs;

    const bool midpoint = opts.mode == StepperMode::ExponentialMidpoint;
    const StepTables full(lam, h);
    const StepTables half(lam, midpoint ? 0.5 * h : h);

    std::vector<double> c = trace.c0, cdot = trace.c1;
    std::vector<double> u_phys(n), fc(n), half_c(n), half_u(n), fvals(n);

    for (std::size_t step = 0; step <= nsteps; ++step) {
        const double t = static_cast<double>(step) * h;
        backend->inverse_raw(c, u_phys);

        bool finite = true;
        double linf = 0.0;
        for (double x : u_phys) {
            if (!std::isfinite(x)) {
                finite = false;
                break;
            }
            linf = std::max(linf, std::abs(x));
        }
        if (!finite || linf > opts.linf_cap) {
            // Terminal entry carries the state that tripped the cap.
            TraceRow row;
            row.t = t;
            if (finite) {
                GridFunction ug = backend->make_grid_function(u_phys);
                row = make_row(*backend, t, c, cdot, ug, opts.lq_q, opts.sobolev_s);
            } else {
                row.l1 = row.lq = row.l2 = row.linf = row.h1dot = row.ut_l2 =
                    std::numeric_limits<double>::infinity();
            }
            trace.rows.push_back(row);
            trace.blowup = BlowupRecord{t, finite ? "linf_cap_exceeded" : "non_finite_state"};
            return trace;
        }

        for (std::size_t j = 0; j < n; ++j) fvals[j] = F(u_phys[j]);
        if (step % opts.record_stride == 0 || step == nsteps) {
            GridFunction ug = backend->make_grid_function(u_phys);
            TraceRow row = make_row(*backend, t, c, cdot, ug, opts.lq_q, opts.sobolev_s);
            if (F.active()) {
                GridFunction fg{fvals, backend};
                row.f_l2 = backend->lq_norm(fg, 2.0);
                row.f_lsig = backend->lq_norm(fg, sigma);
            }
            trace.rows.push_back(row);
        }
        if (opts.snapshot_stride > 0 && (step % opts.snapshot_stride == 0 || step == nsteps)) {
            trace.snapshot_times.push_back(t);
            trace.snapshots.push_back(u_phys);
        }
        if (step == nsteps) break;

        if (F.active()) {
            if (midpoint) {
                // Predictor half-step with the left-point forcing, then use
                // F at the predicted midpoint for the full step.
                backend->forward_raw(fvals, fc);
                for (std::size_t k = 0; k < n; ++k) {
                    const double s = c[k] + cdot[k];
                    half_c[k] = half.D[k] * s + half.Dp[k] * c[k] + half.I[k] * fc[k];
                }
                backend->inverse_raw(half_c, half_u);
                for (std::size_t j = 0; j < n; ++j) fvals[j] = F(half_u[j]);
            }
            backend->forward_raw(fvals, fc);
        } else {
            std::fill(fc.begin(), fc.end(), 0.0);
        }

        for (std::size_t k = 0; k < n; ++k) {
            const double s = c[k] + cdot[k];
            const double cn = full.D[k] * s + full.Dp[k] * c[k] + full.I[k] * fc[k];
            const double cdn = full.Dp[k] * s + full.Dpp[k] * c[k] + full.D[k] * fc[k];
            c[k] = cn;
            cdot[k] = cdn;
        }
    }
    return trace;
}

double duhamel_residual(const EvolutionTrace& trace, const Nonlinearity& F,
                        const std::vector<double>& sample_times) {
    if (!trace.backend) throw std::invalid_argument("duhamel_residual: trace has no backend");
    if (trace.snapshots.size() < 2) {
        throw std::invalid_argument(
            "duhamel_residual: trace holds fewer than 2 snapshots; rerun with snapshot_stride > 0");
    }
    const BackendPtr backend = trace.backend;
    const auto& lam = backend->eigenvalues();
    const std::size_t n = backend->mode_count();
    const auto& taus = trace.snapshot_times;

    // Spectral F(u(tau)) once per stored snapshot.
    std::vector<std::vector<double>> fcoeffs(taus.size());
    for (std::size_t i = 0; i < taus.size(); ++i) {
        std::vector<double> fv(n);
        for (std::size_t j = 0; j < n; ++j) fv[j] = F(trace.snapshots[i][j]);
        fcoeffs[i] = backend->forward(backend->make_grid_function(fv)).coeffs;
    }

    double worst = 0.0;
    for (double t : sample_times) {
        std::size_t it = taus.size();
        for (std::size_t i = 0; i < taus.size(); ++i) {
            if (std::abs(taus[i] - t) <= 1e-9 * std::max(1.0, t)) {
                it = i;
                break;
            }
        }
        if (it == taus.size()) {
            throw std::invalid_argument("duhamel_residual: sample time " + std::to_string(t) +
                                        " is not a stored snapshot time");
        }

        // Trapezoid over snapshot times up to t of D(t - tau, A) F(u(tau)).
        std::vector<double> acc(n, 0.0);
        for (std::size_t i = 0; i + 1 <= it; ++i) {
            const double dt = taus[i + 1] - taus[i];
            for (std::size_t k = 0; k < n; ++k) {
                const double Da = eval_D(t - taus[i], lam[k]);
                const double Db = eval_D(t - taus[i + 1], lam[k]);
                acc[k] += 0.5 * dt * (Da * fcoeffs[i][k] + Db * fcoeffs[i + 1][k]);
            }
        }
        double resid = 0.0;
        const std::vector<double> u_coeffs =
            backend->forward(backend->make_grid_function(trace.snapshots[it])).coeffs;
        for (std::size_t k = 0; k < n; ++k) {
            const double D = eval_D(t, lam[k]);
            const double Dp = eval_dtD(t, lam[k]);
            const double lin = D * (trace.c0[k] + trace.c1[k]) + Dp * trace.c0[k];
            const double e = u_coeffs[k] - lin - acc[k];
            resid += e * e;
        }
        worst = std::max(worst, std::sqrt(resid));
    }
    return worst;
}

}  // namespace specwave
