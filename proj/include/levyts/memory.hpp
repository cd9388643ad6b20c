#pragma once

#include <span>
#include <string>
#include <vector>

namespace levyts {

struct ArmaFit {
    int p = 0;
    int q = 0;
    /// Fractional differencing order (0 for ARMA), with its nearest-integer split.
    double d = 0.0;
    int d_integer = 0;
    double d_fraction = 0.0;
    std::vector<double> phi; // x_t = sum phi_i x_{t-i} + e_t + sum psi_j e_{t-j}
    std::vector<double> psi;
    double sigma2 = 0.0;
    double log_likelihood = 0.0;
    double bic = 0.0;
    /// Standard deviation of the one-step-ahead prediction errors (data units).
    double fit_error = 0.0;
    std::size_t n = 0;
    bool converged = false;

    int n_params() const noexcept { return p + q + 1; }
};

/// Autocovariances gamma(0..maxlag) of an ARFIMA process by adaptive oscillatory
/// quadrature of its spectral density. Requires |d| < 0.5, stationary AR and
/// invertible MA parts. Throws NumericalError when the quadrature fails.
std::vector<double> arfima_autocov(std::span<const double> phi, std::span<const double> psi, double d,
                                   double sigma2, std::size_t maxlag);

struct GaussianLikelihood {
    double log_likelihood = 0.0;
    double sigma2 = 0.0;
    std::vector<double> innovations;
};

/// Exact ARMA likelihood by a state-space Kalman filter. With sigma2 <= 0 the
/// innovation variance is profiled out and returned.
GaussianLikelihood arma_likelihood(std::span<const double> x, std::span<const double> phi,
                                   std::span<const double> psi, double sigma2 = 0.0);

/// Exact Gaussian likelihood of x given its autocovariance (Durbin-Levinson).
GaussianLikelihood levinson_likelihood(std::span<const double> x, std::span<const double> autocov);

/// Type-II fractional difference (1 - B)^d of x, starting from zero pre-sample.
std::vector<double> frac_diff(std::span<const double> x, double d);

/// Maps unconstrained values to coefficients of a stationary polynomial through
/// partial autocorrelations tanh(z).
std::vector<double> pacf_to_coeffs(std::span<const double> z);
/// Inverse map: the unconstrained values z of a stationary coefficient vector.
std::vector<double> coeffs_to_pacf(std::span<const double> coeffs);

/// Smallest modulus among the roots of 1 - sum c_i B^i (infinity when empty).
double min_root_modulus(std::span<const double> coeffs);

/// Gaussian maximum likelihood ARMA(p, q) of (1 - B)^d x after removing the mean.
ArmaFit fit_arma(std::span<const double> x, int p, int q, double d = 0.0);

struct ModelSelection {
    ArmaFit arma;
    ArmaFit farima;
    std::string winner; // "ARMA" or "FARIMA"
    std::vector<ArmaFit> arma_grid;
    std::vector<ArmaFit> farima_grid;
};

/// BIC search over p, q in [0, max_order] for d = 0 and d = d_candidate. Ties go to
/// fewer parameters, then to ARMA.
ModelSelection select_bic(std::span<const double> x, double d_candidate, unsigned jobs = 1, int max_order = 5);

} // namespace levyts
