#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "specwave/analysis.hpp"
#include "specwave/backend.hpp"
#include "specwave/evolution.hpp"

namespace specwave {

struct BackendSpec {
    std::string kind = "dirichlet-1d";
    double length = 200.0 * 3.14159265358979323846;
    std::size_t modes = 4096;
    double nu = 1.0;                         // fractional-of-base
    std::shared_ptr<BackendSpec> base;       // fractional-of-base; defaults to dirichlet
    std::string matrix_path;                 // dense-matrix
    std::string weights_path;                // dense-matrix, optional
    std::optional<double> alpha_hint;
};

BackendPtr build_backend(const BackendSpec& spec);

struct DataSpec {
    std::string kind = "bump";  // bump | eigen-mix | random
    double amplitude = 1e-2;
    double width = 2.0;                  // bump
    std::optional<double> center;        // bump; defaults to L/2
    double u1_scale = 1.0;               // u1 = u1_scale * (same profile)
    std::string u1_form = "scaled";      // scaled | minus-A-u0
    std::vector<std::size_t> modes;      // eigen-mix: mode indices (1-based)
    std::vector<double> mode_weights;    // eigen-mix: per-mode coefficients
    double band_fraction = 0.25;         // random
};

CauchyData make_data(const BackendPtr& backend, const DataSpec& spec, std::uint64_t seed);

/// I0 = ||u0||_{Lq} + ||u0||_{H1(A)} + ||u1||_{Lq} + ||u1||_{L2}.
double initial_size(const CauchyData& data, double q);

struct FitWindow {
    double t_lo = 10.0;
    double t_hi = 200.0;
};

struct Tolerances {
    double l2 = 0.05;
    double linf = 0.1;
    double ut = 0.1;
    double h1dot = 0.1;
    double diff_l2 = 0.1;
    double diff_linf = 0.1;
    double x_ratio_cap = 50.0;
    double smalldata_exp = 0.07;
};

struct ExperimentConfig {
    BackendSpec backend;
    DataSpec data;
    double q = 1.0;
    double p = 4.0;
    std::string form = "+|u|^{p-1}u";
    EvolveOptions evolve;
    FitWindow fit;
    Tolerances tol;
    std::size_t n_fit_times = 25;
    std::uint64_t seed = 0;
    int threads = 1;
    bool exploratory = false;
};

struct CriterionResult {
    std::string name;
    double predicted = 0.0;
    double fitted = 0.0;
    double tolerance = 0.0;
    double r_squared = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    bool pass = false;
};

struct ExperimentReport {
    std::string experiment;
    std::vector<CriterionResult> criteria;
    std::vector<std::pair<std::string, double>> values;  // extra scalars
    std::vector<std::string> notes;
    std::optional<BlowupRecord> blowup;
    bool pass = false;

    double value(const std::string& key) const;
    const CriterionResult& criterion(const std::string& name) const;
};

/// Linear decay-rate study: fits ||u||_2, ||u||_inf, ||u_t||_2, ||A^{1/2}u||_2
/// against the predicted exponents for the configured (alpha, q).
ExperimentReport verify_matsumura(const ExperimentConfig& cfg);

/// Decay of the gap to the heat flow, u_lin(t) - e^{-tA}(u0+u1); rates gain
/// one power over the solution itself.
ExperimentReport verify_diffusion(const ExperimentConfig& cfg);

/// Small-data nonlinear run: no blow-up, bounded weighted X-norm relative to
/// I0, and the linear L2 rate. Refuses inadmissible (p,q,alpha) unless the
/// config is marked exploratory.
ExperimentReport smalldata_global(const ExperimentConfig& cfg);

struct SweepPoint {
    double p = 0.0;
    double q = 0.0;
    double eps = 0.0;
    std::string outcome;  // bounded | numerical-blowup | undecided
    double t_blowup = std::numeric_limits<double>::quiet_NaN();
    double final_linf = 0.0;
    double initial_linf = 0.0;
};

struct SweepReport {
    std::vector<SweepPoint> points;
    std::string form;
    double horizon = 0.0;
};

struct SweepConfig {
    ExperimentConfig base;
    std::vector<double> p_values{2.0, 2.5, 3.5, 4.0};
    std::vector<double> eps_values{1e-2, 0.25};
    std::vector<double> q_values{1.0};
    std::string form = "+|u|^p";
};

/// Phase classification around the critical exponent; points run in
/// parallel, outputs are ordered by grid index.
SweepReport critical_sweep(const SweepConfig& cfg);

}  // namespace specwave
