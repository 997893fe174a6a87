#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "specwave/backend.hpp"

namespace specwave {

struct CauchyData {
    GridFunction u0;  // H1 datum
    GridFunction u1;  // L2 datum
};

/// Pointwise forcing F(u) = sign * |u|^p or sign * |u|^{p-1} u.
struct Nonlinearity {
    enum class Form { AbsPow, NegAbsPow, SignedPow, NegSignedPow, None };

    double p = 2.0;
    Form form = Form::None;

    static Nonlinearity none() { return Nonlinearity{2.0, Form::None}; }
    static Nonlinearity make(double p, Form form);
    static Nonlinearity parse(double p, const std::string& form_text);

    double operator()(double u) const {
        switch (form) {
            case Form::AbsPow: return std::pow(std::abs(u), p);
            case Form::NegAbsPow: return -std::pow(std::abs(u), p);
            case Form::SignedPow: return std::pow(std::abs(u), p - 1.0) * u;
            case Form::NegSignedPow: return -std::pow(std::abs(u), p - 1.0) * u;
            case Form::None: return 0.0;
        }
        return 0.0;
    }
    bool active() const { return form != Form::None; }
    const char* form_name() const;
};

struct TraceRow {
    double t = 0.0;
    double l1 = 0.0;
    double lq = 0.0;  // at the trace's lq_q exponent
    double l2 = 0.0;
    double linf = 0.0;
    double h1dot = 0.0;  // ||A^{1/2} u||_{L2}
    double ut_l2 = 0.0;
    double hs = std::numeric_limits<double>::quiet_NaN();     // optional H^s channel
    double f_l2 = std::numeric_limits<double>::quiet_NaN();   // ||F(u)||_{L2}
    double f_lsig = std::numeric_limits<double>::quiet_NaN(); // ||F(u)||_{L^sigma}
};

struct BlowupRecord {
    double t = 0.0;
    std::string reason;
};

/// Norm time series for one run; snapshots (physical samples) are kept only
/// when requested. Immutable once returned.
struct EvolutionTrace {
    std::vector<TraceRow> rows;
    double lq_q = 2.0;
    double sobolev_s = std::numeric_limits<double>::quiet_NaN();
    double sigma = std::numeric_limits<double>::quiet_NaN();  // L^sigma used for f_lsig
    std::optional<BlowupRecord> blowup;
    std::vector<double> snapshot_times;
    std::vector<std::vector<double>> snapshots;  // physical samples per time
    std::vector<double> c0, c1;                  // initial spectral data
    BackendPtr backend;

    std::vector<double> times() const;
    std::vector<double> series(const std::string& which) const;  // by column name
};

struct TraceOptions {
    double lq_q = 1.0;
    double sobolev_s = std::numeric_limits<double>::quiet_NaN();  // NaN: skip channel
};

/// Exact-in-time linear flow through the multiplier family:
/// u(t) = D(t,A)(u0+u1) + dtD(t,A) u0.
EvolutionTrace linear_solve(const CauchyData& data, const std::vector<double>& times,
                            const TraceOptions& opts = {});

/// Heat comparison flow e^{-tA} f.
EvolutionTrace heat_solve(const GridFunction& f, const std::vector<double>& times,
                          const TraceOptions& opts = {});

enum class StepperMode { ExponentialEuler, ExponentialMidpoint };

struct EvolveOptions {
    double step = 0.05;
    double horizon = 400.0;
    StepperMode mode = StepperMode::ExponentialEuler;
    double linf_cap = 1e6;
    std::size_t record_stride = 1;    // record norms every k-th step
    std::size_t snapshot_stride = 0;  // 0: keep no snapshots
    double lq_q = 1.0;
    double sobolev_s = std::numeric_limits<double>::quiet_NaN();
    double f_sigma = std::numeric_limits<double>::quiet_NaN();  // NaN: max(1, 2/p)
};

/// Variation-of-constants stepper whose linear part is exact; the frozen
/// nonlinearity enters through I(h,A) = int_0^h D. Blow-up (cap or
/// non-finite) terminates the trace with a flag rather than throwing.
EvolutionTrace nonlinear_evolve(const CauchyData& data, const Nonlinearity& F,
                                const EvolveOptions& opts);

/// A posteriori Duhamel check: max over sample times of
/// || u(t) - u_L(t) - trapezoid(int_0^t D(t-tau,A) F(u(tau)) dtau) ||_{L2}.
/// Sample times must coincide with stored snapshot times.
double duhamel_residual(const EvolutionTrace& trace, const Nonlinearity& F,
                        const std::vector<double>& sample_times);

}  // namespace specwave
