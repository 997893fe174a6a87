#include "specwave/backend.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

namespace specwave {

namespace {

// FFTW plan creation is not thread-safe; executing through the new-array
// interface is, provided the plan was made with FFTW_UNALIGNED.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

void check_same_backend(const SpectrumBackend* self, const BackendPtr& other,
                        const char* what) {
    if (other.get() != self) {
        throw std::invalid_argument(std::string(what) +
                                    ": value belongs to a different backend");
    }
}

void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument(std::string(what) + ": non-finite entry");
        }
    }
}

}  // namespace

const char* to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::Dirichlet1D: return "dirichlet-1d";
        case BackendKind::FractionalOfBase: return "fractional-of-base";
        case BackendKind::DenseMatrix: return "dense-matrix";
    }
    return "unknown";
}

SpectralCoeffs SpectrumBackend::forward(const GridFunction& f) const {
    check_same_backend(this, f.backend, "forward");
    if (f.samples.size() != mode_count()) {
        throw std::invalid_argument("forward: sample length " + std::to_string(f.samples.size()) +
                                    " != mode count " + std::to_string(mode_count()));
    }
    check_finite(f.samples, "forward");
    SpectralCoeffs c;
    c.backend = std::const_pointer_cast<SpectrumBackend>(shared_from_this());
    c.coeffs.resize(mode_count());
    forward_into(f.samples, c.coeffs);
    return c;
}

GridFunction SpectrumBackend::inverse(const SpectralCoeffs& c) const {
    check_same_backend(this, c.backend, "inverse");
    if (c.coeffs.size() != mode_count()) {
        throw std::invalid_argument("inverse: coeff length " + std::to_string(c.coeffs.size()) +
                                    " != mode count " + std::to_string(mode_count()));
    }
    check_finite(c.coeffs, "inverse");
    GridFunction f;
    f.backend = std::const_pointer_cast<SpectrumBackend>(shared_from_this());
    f.samples.resize(mode_count());
    inverse_into(c.coeffs, f.samples);
    return f;
}

void SpectrumBackend::forward_raw(const std::vector<double>& samples,
                                  std::vector<double>& coeffs) const {
    coeffs.resize(mode_count());
    forward_into(samples, coeffs);
}

void SpectrumBackend::inverse_raw(const std::vector<double>& coeffs,
                                  std::vector<double>& samples) const {
    samples.resize(mode_count());
    inverse_into(coeffs, samples);
}

double SpectrumBackend::lq_norm(const GridFunction& f, double q) const {
    check_same_backend(this, f.backend, "lq_norm");
    if (std::isinf(q)) {
        double m = 0.0;
        for (double x : f.samples) m = std::max(m, std::abs(x));
        return m;
    }
    if (!(q >= 1.0)) {
        throw std::invalid_argument("lq_norm: q must satisfy q >= 1 (or infinity), got " +
                                    std::to_string(q));
    }
    double sum = 0.0;
    if (q == 1.0) {
        for (std::size_t j = 0; j < f.samples.size(); ++j) sum += weights_[j] * std::abs(f.samples[j]);
        return sum;
    }
    if (q == 2.0) {
        for (std::size_t j = 0; j < f.samples.size(); ++j)
            sum += weights_[j] * f.samples[j] * f.samples[j];
        return std::sqrt(sum);
    }
    for (std::size_t j = 0; j < f.samples.size(); ++j) {
        sum += weights_[j] * std::pow(std::abs(f.samples[j]), q);
    }
    return std::pow(sum, 1.0 / q);
}

double SpectrumBackend::sobolev_norm(const SpectralCoeffs& c, double s) const {
    check_same_backend(this, c.backend, "sobolev_norm");
    double sum = 0.0;
    for (std::size_t k = 0; k < c.coeffs.size(); ++k) {
        sum += std::pow(1.0 + eigenvalues_[k], s) * c.coeffs[k] * c.coeffs[k];
    }
    return std::sqrt(sum);
}

double SpectrumBackend::sobolev_norm(const GridFunction& f, double s) const {
    return sobolev_norm(forward(f), s);
}

double SpectrumBackend::heat_l2_to_linf_norm(double t) const {
    if (!(t >= 0.0)) throw std::invalid_argument("heat_l2_to_linf_norm: t must be >= 0");
    const std::size_t n = mode_count();
    std::vector<double> decay(n);
    for (std::size_t k = 0; k < n; ++k) decay[k] = std::exp(-2.0 * t * eigenvalues_[k]);
    double best = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double row = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double phi = eigenfunction(k, j);
            row += decay[k] * phi * phi;
        }
        best = std::max(best, row);
    }
    return std::sqrt(best);
}

double SpectrumBackend::power_law_time_guard() const {
    if (kind_ == BackendKind::Dirichlet1D) {
        return 0.05 * domain_length_ * domain_length_;
    }
    const double pi = 3.14159265358979323846;
    for (double lam : eigenvalues_) {
        if (lam > 0.0) return 0.05 * pi * pi / lam;
    }
    return std::numeric_limits<double>::infinity();
}

GridFunction SpectrumBackend::make_grid_function(std::vector<double> samples) const {
    if (samples.size() != mode_count()) {
        throw std::invalid_argument("make_grid_function: length " + std::to_string(samples.size()) +
                                    " != mode count " + std::to_string(mode_count()));
    }
    check_finite(samples, "make_grid_function");
    return GridFunction{std::move(samples), std::const_pointer_cast<SpectrumBackend>(shared_from_this())};
}

SpectralCoeffs SpectrumBackend::make_coeffs(std::vector<double> coeffs) const {
    if (coeffs.size() != mode_count()) {
        throw std::invalid_argument("make_coeffs: length mismatch");
    }
    check_finite(coeffs, "make_coeffs");
    return SpectralCoeffs{std::move(coeffs), std::const_pointer_cast<SpectrumBackend>(shared_from_this())};
}

// ---------------------------------------------------------------------------
// Dirichlet interval backend (DST-I under the hood)

namespace {

class DstPlan {
public:
    explicit DstPlan(std::size_t n) : n_(n) {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        buf_in_.resize(n);
        buf_out_.resize(n);
        plan_ = fftw_plan_r2r_1d(static_cast<int>(n), buf_in_.data(), buf_out_.data(),
                                 FFTW_RODFT00, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (plan_ == nullptr) throw std::runtime_error("fftw: DST-I plan creation failed");
    }
    ~DstPlan() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }
    DstPlan(const DstPlan&) = delete;
    DstPlan& operator=(const DstPlan&) = delete;

    // out_k = 2 sum_j in_j sin(pi (j+1)(k+1)/(n+1)); thread-safe.
    void execute(const double* in, double* out) const {
        fftw_execute_r2r(plan_, const_cast<double*>(in), out);
    }

private:
    std::size_t n_;
    std::vector<double> buf_in_, buf_out_;
    fftw_plan plan_;
};

class DirichletBackend final : public SpectrumBackend {
public:
    DirichletBackend(double length, std::size_t modes) : dst_(modes) {
        kind_ = BackendKind::Dirichlet1D;
        domain_length_ = length;
        alpha_ = 0.25;  // d/4 with d = 1
        const double pi = 3.14159265358979323846;
        eigenvalues_.resize(modes);
        for (std::size_t k = 0; k < modes; ++k) {
            const double kk = static_cast<double>(k + 1) * pi / length;
            eigenvalues_[k] = kk * kk;
        }
        weights_.assign(modes, length / static_cast<double>(modes + 1));
        // DST-I is orthogonal up to 2(N+1); split the factor so that
        // forward . inverse = id and the map is unitary under the weights.
        fwd_scale_ = std::sqrt(2.0 / length) * length / (2.0 * static_cast<double>(modes + 1));
        inv_scale_ = std::sqrt(2.0 / length) * 0.5;
        // sin(pi j k/(N+1)) lookup by (j k) mod 2(N+1)
        sin_table_.resize(2 * (modes + 1));
        for (std::size_t m = 0; m < sin_table_.size(); ++m) {
            sin_table_[m] = std::sin(pi * static_cast<double>(m) / static_cast<double>(modes + 1));
        }
    }

    double eigenfunction(std::size_t k, std::size_t j) const override {
        const std::size_t period = sin_table_.size();
        const std::size_t idx = ((k + 1) * (j + 1)) % period;
        return std::sqrt(2.0 / domain_length_) * sin_table_[idx];
    }

protected:
    void forward_into(const std::vector<double>& samples,
                      std::vector<double>& coeffs) const override {
        dst_.execute(samples.data(), coeffs.data());
        for (double& c : coeffs) c *= fwd_scale_;
    }
    void inverse_into(const std::vector<double>& coeffs,
                      std::vector<double>& samples) const override {
        dst_.execute(coeffs.data(), samples.data());
        for (double& s : samples) s *= inv_scale_;
    }

private:
    DstPlan dst_;
    double fwd_scale_ = 0.0, inv_scale_ = 0.0;
    std::vector<double> sin_table_;
};

// Same transform as the base, re-labelled spectrum.
class FractionalBackend final : public SpectrumBackend {
public:
    FractionalBackend(BackendPtr base, double nu) : base_(std::move(base)) {
        kind_ = BackendKind::FractionalOfBase;
        domain_length_ = base_->domain_length();
        alpha_ = base_->alpha() * 2.0 / nu;
        fractional_power_ = nu;
        weights_ = base_->quadrature_weights();
        eigenvalues_.resize(base_->mode_count());
        for (std::size_t k = 0; k < eigenvalues_.size(); ++k) {
            eigenvalues_[k] = std::pow(base_->eigenvalues()[k], 0.5 * nu);
        }
        clamped_magnitude_ = base_->clamped_magnitude();
    }

    double eigenfunction(std::size_t k, std::size_t j) const override {
        return base_->eigenfunction(k, j);
    }

protected:
    void forward_into(const std::vector<double>& samples,
                      std::vector<double>& coeffs) const override {
        GridFunction f{samples, base_};
        coeffs = base_->forward(f).coeffs;
    }
    void inverse_into(const std::vector<double>& coeffs,
                      std::vector<double>& samples) const override {
        SpectralCoeffs c{coeffs, base_};
        samples = base_->inverse(c).samples;
    }

private:
    BackendPtr base_;
};

class DenseBackend final : public SpectrumBackend {
public:
    DenseBackend(const std::vector<std::vector<double>>& matrix, const std::vector<double>& weights,
                 std::optional<double> alpha_hint) {
        kind_ = BackendKind::DenseMatrix;
        const std::size_t n = matrix.size();
        if (n == 0) throw std::invalid_argument("matrix backend: empty matrix");
        for (const auto& row : matrix) {
            if (row.size() != n) throw std::invalid_argument("matrix backend: matrix not square");
        }
        if (weights.size() != n) {
            throw std::invalid_argument("matrix backend: weights length != matrix size");
        }
        for (double w : weights) {
            if (!(w > 0.0)) throw std::invalid_argument("matrix backend: weights must be positive");
        }
        weights_ = weights;

        // Self-adjointness under the weights is symmetry of
        // S = W^{1/2} A W^{-1/2}; for uniform weights this is plain symmetry.
        Eigen::MatrixXd S(n, n);
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                S(i, j) = std::sqrt(weights[i] / weights[j]) * matrix[i][j];
                scale = std::max(scale, std::abs(S(i, j)));
            }
        }
        double asym = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                asym = std::max(asym, std::abs(S(i, j) - S(j, i)));
            }
        }
        if (asym > 1e-10 * std::max(1.0, scale)) {
            throw std::invalid_argument(
                "matrix backend: matrix is not self-adjoint under the given weights "
                "(max asymmetry " + std::to_string(asym) + ")");
        }
        S = 0.5 * (S + S.transpose()).eval();

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
        if (solver.info() != Eigen::Success) {
            throw std::runtime_error("matrix backend: eigendecomposition failed");
        }
        Eigen::VectorXd evals = solver.eigenvalues();
        const double clamp_tol = 1e-10 * std::max(1.0, std::abs(evals(n - 1)));
        if (evals(0) < -clamp_tol) {
            throw std::invalid_argument("matrix backend: matrix is indefinite (smallest eigenvalue " +
                                        std::to_string(evals(0)) + ")");
        }
        eigenvalues_.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            if (evals(k) < 0.0) {
                clamped_magnitude_ = std::max(clamped_magnitude_, -evals(k));
                evals(k) = 0.0;
            }
            eigenvalues_[k] = evals(k);
        }
        // Physical eigenvectors phi = W^{-1/2} q are w-orthonormal; the
        // forward map is c = Q^T W^{1/2} f.
        phi_ = solver.eigenvectors();
        for (std::size_t j = 0; j < n; ++j) {
            phi_.row(j) /= std::sqrt(weights[j]);
        }
        sqrt_w_.resize(n);
        for (std::size_t j = 0; j < n; ++j) sqrt_w_[j] = std::sqrt(weights[j]);
        alpha_ = alpha_hint.value_or(0.0);
    }

    double eigenfunction(std::size_t k, std::size_t j) const override {
        return phi_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
    }

protected:
    void forward_into(const std::vector<double>& samples,
                      std::vector<double>& coeffs) const override {
        const std::size_t n = samples.size();
        Eigen::VectorXd v(n);
        for (std::size_t j = 0; j < n; ++j) v(j) = samples[j] * sqrt_w_[j] * sqrt_w_[j];
        // c_k = sum_j w_j phi_k(x_j) f_j
        Eigen::VectorXd c = phi_.transpose() * v;
        for (std::size_t k = 0; k < n; ++k) coeffs[k] = c(k);
    }
    void inverse_into(const std::vector<double>& coeffs,
                      std::vector<double>& samples) const override {
        const std::size_t n = coeffs.size();
        Eigen::VectorXd c(n);
        for (std::size_t k = 0; k < n; ++k) c(k) = coeffs[k];
        Eigen::VectorXd v = phi_ * c;
        for (std::size_t j = 0; j < n; ++j) samples[j] = v(j);
    }

private:
    Eigen::MatrixXd phi_;  // column k = eigenfunction k on the grid
    std::vector<double> sqrt_w_;
};

}  // namespace

BackendPtr build_dirichlet_1d(double length, std::size_t modes) {
    if (!(length > 0.0)) {
        throw std::invalid_argument("build_dirichlet_1d: length must be positive, got " +
                                    std::to_string(length));
    }
    if (modes < 2) {
        throw std::invalid_argument("build_dirichlet_1d: need at least 2 modes, got " +
                                    std::to_string(modes));
    }
    return std::make_shared<DirichletBackend>(length, modes);
}

BackendPtr build_fractional(BackendPtr base, double nu) {
    if (!base) throw std::invalid_argument("build_fractional: null base backend");
    if (!(nu > 0.0)) {
        throw std::invalid_argument("build_fractional: nu must be positive, got " +
                                    std::to_string(nu));
    }
    return std::make_shared<FractionalBackend>(std::move(base), nu);
}

BackendPtr build_matrix_backend(const std::vector<std::vector<double>>& matrix,
                                const std::vector<double>& weights,
                                std::optional<double> alpha_hint) {
    return std::make_shared<DenseBackend>(matrix, weights, alpha_hint);
}

DecayFit measure_alpha(const SpectrumBackend& backend, double t_lo, double t_hi,
                       std::size_t n_samples) {
    if (n_samples < 8) {
        throw std::invalid_argument("measure_alpha: need at least 8 sample times");
    }
    if (!(t_lo > 0.0) || !(t_hi > t_lo)) {
        throw std::invalid_argument("measure_alpha: need 0 < t_lo < t_hi");
    }
    const std::vector<double> ts = log_spaced(t_lo, t_hi, n_samples);
    std::vector<double> norms(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        norms[i] = backend.heat_l2_to_linf_norm(ts[i]);
    }
    return fit_powerlaw(ts, norms, t_lo, t_hi);
}

}  // namespace specwave
