#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "specwave/fit.hpp"

namespace specwave {

class SpectrumBackend;
using BackendPtr = std::shared_ptr<SpectrumBackend>;

/// Real-valued state sampled on the backend's grid.
struct GridFunction {
    std::vector<double> samples;
    BackendPtr backend;
};

/// Coefficients against the backend's orthonormal eigenbasis.
struct SpectralCoeffs {
    std::vector<double> coeffs;
    BackendPtr backend;
};

enum class BackendKind { Dirichlet1D, FractionalOfBase, DenseMatrix };

const char* to_string(BackendKind kind);

/// A discretized non-negative self-adjoint operator: ascending eigenvalues,
/// a transform that is unitary with respect to the weighted inner product
/// <f,g> = sum_j w_j f_j g_j, and the analytic decay index alpha of the heat
/// semigroup bound ||e^{-tA}||_{L2->Linf} <~ t^{-alpha}.
///
/// Immutable after construction; all operations are const and thread-safe.
class SpectrumBackend : public std::enable_shared_from_this<SpectrumBackend> {
public:
    virtual ~SpectrumBackend() = default;

    BackendKind kind() const { return kind_; }
    std::size_t mode_count() const { return eigenvalues_.size(); }
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }
    const std::vector<double>& quadrature_weights() const { return weights_; }
    double domain_length() const { return domain_length_; }  // 0 for matrix backends
    double alpha() const { return alpha_; }
    std::optional<double> fractional_power() const { return fractional_power_; }
    /// Largest negative eigenvalue magnitude clamped to zero at construction.
    double clamped_magnitude() const { return clamped_magnitude_; }

    SpectralCoeffs forward(const GridFunction& f) const;
    GridFunction inverse(const SpectralCoeffs& c) const;

    /// Unchecked transform entry points for steppers (caller owns buffers;
    /// lengths must equal mode_count, non-finite values pass through).
    void forward_raw(const std::vector<double>& samples, std::vector<double>& coeffs) const;
    void inverse_raw(const std::vector<double>& coeffs, std::vector<double>& samples) const;

    /// (sum_j w_j |f_j|^q)^{1/q}; max_j |f_j| for q = infinity.
    double lq_norm(const GridFunction& f, double q) const;
    /// ||(I+A)^{s/2} f||_{L2} via the spectral sum.
    double sobolev_norm(const GridFunction& f, double s) const;
    double sobolev_norm(const SpectralCoeffs& c, double s) const;

    /// Exact ||e^{-tA}||_{L2(w)->Linf}: max over grid points of the weighted
    /// l2 norm of the heat kernel row.
    double heat_l2_to_linf_norm(double t) const;

    /// Largest time at which power-law decay fits are still meaningful:
    /// 0.05 L^2 for the interval backend (boundary interaction), otherwise
    /// 0.05 pi^2 / lambda_1 with lambda_1 the smallest positive eigenvalue.
    double power_law_time_guard() const;

    GridFunction make_grid_function(std::vector<double> samples) const;
    SpectralCoeffs make_coeffs(std::vector<double> coeffs) const;

    /// Physical-space value of eigenfunction k at grid point j (w-orthonormal).
    virtual double eigenfunction(std::size_t k, std::size_t j) const = 0;

protected:
    virtual void forward_into(const std::vector<double>& samples,
                              std::vector<double>& coeffs) const = 0;
    virtual void inverse_into(const std::vector<double>& coeffs,
                              std::vector<double>& samples) const = 0;

    BackendKind kind_ = BackendKind::DenseMatrix;
    std::vector<double> eigenvalues_;
    std::vector<double> weights_;
    double domain_length_ = 0.0;
    double alpha_ = 0.0;
    std::optional<double> fractional_power_;
    double clamped_magnitude_ = 0.0;
};

/// Dirichlet Laplacian on (0,L): eigenvalues (k pi/L)^2, sine eigenfunctions
/// sampled at x_j = j L/(N+1), uniform weights L/(N+1); alpha = 1/4.
BackendPtr build_dirichlet_1d(double length, std::size_t modes);

/// Spectral power A^{nu/2} of a base backend: eigenvalues lambda^{nu/2},
/// same transform and weights; alpha = base.alpha * 2/nu (Gaussian-kernel
/// bases have alpha = d/(2 nu)).
BackendPtr build_fractional(BackendPtr base, double nu);

/// Dense symmetric PSD operator under the given weights. The matrix must be
/// self-adjoint in the weighted inner product (plain symmetry when weights
/// are uniform) within 1e-10; eigenvalues down to -1e-10 are clamped to 0.
/// alpha falls back to measure_alpha when no hint is given (stored as 0).
BackendPtr build_matrix_backend(const std::vector<std::vector<double>>& matrix,
                                const std::vector<double>& weights,
                                std::optional<double> alpha_hint = std::nullopt);

/// Empirical fit of alpha in ||e^{-tA}||_{L2->Linf} ~ t^{-alpha} over
/// [t_lo, t_hi] sampled at n_samples log-spaced times (>= 8).
DecayFit measure_alpha(const SpectrumBackend& backend, double t_lo, double t_hi,
                       std::size_t n_samples = 16);

}  // namespace specwave
