#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specwave/backend.hpp"
#include "specwave/evolution.hpp"
#include "specwave/fit.hpp"

namespace specwave {

/// Fit the decay exponent of one recorded norm channel over [t_lo, t_hi].
DecayFit fit_decay(const EvolutionTrace& trace, const std::string& which_norm, double t_lo,
                   double t_hi);

enum class DecayTarget { Linf, L2, DiffLinf, DiffL2 };

DecayTarget parse_decay_target(const std::string& text);
const char* to_string(DecayTarget target);

/// Predicted time-decay exponent of ||dt^k A^{s/2} D(t,A) f|| with L^q data:
/// 2 alpha/q + k + s/2 in L^inf, 2 alpha(1/q - 1/2) + k + s/2 in L^2; the
/// difference against the heat flow gains one more power.
struct ExponentPrediction {
    double alpha = 0.0;
    double q = 1.0;
    int k = 0;
    double s = 0.0;
    DecayTarget target = DecayTarget::L2;
    double predicted = 0.0;
};

ExponentPrediction predict_exponent(double alpha, double q, int k, double s, DecayTarget target);

/// Admissibility of (p, q, alpha) for the small-data global theory:
/// p above the critical exponent p_F = 1 + q/(2 alpha), q inside
/// [max{1, 2/p}, min{2, 2 alpha(p-1)}], and p <= 2 alpha/(2 alpha - 1)
/// when alpha > 1/2. delta = 1 exactly on the boundary q = 2 alpha(p-1).
struct CriticalityRecord {
    double p = 0.0;
    double q = 0.0;
    double alpha = 0.0;
    double p_fujita = 0.0;  // 1 + q/(2 alpha)
    bool admissible = false;
    int delta = 0;
    double sigma = 1.0;  // max{1, 2/p}
    double q_lo = 0.0, q_hi = 0.0;
    std::string reason;  // first violated condition when inadmissible
};

CriticalityRecord criticality(double p, double q, double alpha);

/// sup_t of <t>^{2a(1/q-1/2)+1} (log(2+t))^{-delta} ||u_t||_2
///        + <t>^{2a(1/q-1/2)+1/2} ||A^{1/2}u||_2
///        + <t>^{2a(1/q-1/2)} ||u||_2 over the recorded rows.
double weighted_X_norm(const EvolutionTrace& trace, double q, double alpha, int delta);

/// sup_t of <t>^{2a(1/q-1/(2p))p} ||F(u)||_2 + <t>^{2a(1/q-1/(sp))p} ||F(u)||_s
/// using the trace's recorded forcing channels.
double weighted_Y_norm(const EvolutionTrace& trace, double p, double q, double alpha,
                       double sigma);

struct KernelScanGrid {
    double t_lo = 0.05, t_hi = 100.0;
    std::size_t t_count = 2000;
    bool t_log = false;
    double lambda_lo = 0.0, lambda_hi = 100.0;
    std::size_t lambda_count = 2000;
    // diff-symbol rows: log-spaced t, lambda in [0, 1/8)
    double diff_t_lo = 10.0, diff_t_hi = 1e4;
    std::size_t diff_t_count = 25;
    std::size_t diff_lambda_count = 4000;
};

struct DiffSymbolRow {
    double t = 0.0;
    double sup_abs = 0.0;       // sup_lambda |diff symbol|
    double weighted_sup = 0.0;  // <t> * sup
};

struct KernelBoundsReport {
    double sup_D = 0.0, sup_D_t = 0.0, sup_D_lambda = 0.0;
    double sup_dtD = 0.0, sup_dtD_t = 0.0, sup_dtD_lambda = 0.0;
    std::vector<DiffSymbolRow> diff_rows;
    double diff_constant = 0.0;  // max over rows of weighted_sup
    KernelScanGrid grid;
};

/// Grid supremum scan behind the Lemma-style kernel bounds; parallelizes
/// over t rows with per-row outputs (thread-count independent).
KernelBoundsReport scan_kernel_bounds(const KernelScanGrid& grid, int threads = 1);

struct InequalityOptions {
    std::size_t trials = 200;
    std::uint64_t seed = 0;
    /// Number of low modes carrying random data; 0 means mode_count/4.
    std::size_t band_modes = 0;
    double sobolev_s = 0.6;
    double gn_q = std::numeric_limits<double>::infinity();
};

struct InequalityResult {
    std::string name;
    bool applicable = true;
    std::string skip_reason;
    double max_ratio = 0.0;
    double exponent_a = 0.0;  // GN interpolation exponent / Sobolev s
};

struct InequalityReport {
    std::vector<InequalityResult> results;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::size_t band_modes = 0;
};

/// Max LHS/RHS ratios over random band-limited test functions for the
/// Sobolev, Gagliardo-Nirenberg, critical Sobolev (alpha > 1/2 only) and
/// heat-semigroup smoothing estimates.
InequalityReport check_inequalities(const SpectrumBackend& backend, const InequalityOptions& opts);

struct InequalityLevelRow {
    std::size_t modes = 0;
    std::vector<InequalityResult> results;
};

struct InequalityScanReport {
    std::vector<InequalityLevelRow> levels;
    /// Per inequality: max relative step between consecutive levels.
    std::vector<std::pair<std::string, double>> max_step;
    bool stable = false;  // every step within the given tolerance
    double tolerance = 0.2;
};

/// Refinement study over Dirichlet backends of increasing mode count with
/// the random band fixed at band fraction of the smallest level, so the test
/// function class does not change across levels.
InequalityScanReport check_inequalities_levels(double length, const std::vector<std::size_t>& levels,
                                               const InequalityOptions& opts,
                                               double band_fraction = 0.25,
                                               double tolerance = 0.2);

}  // namespace specwave
