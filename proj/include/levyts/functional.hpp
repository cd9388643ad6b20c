#pragma once

#include "levyts/series.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace levyts {

/// Deterministic part of the series: trend + seasonal harmonics + step offsets.
struct FunctionalConfig {
    int n_harmonics = 2;
    OffsetCatalog offsets;
    double period_days = kDaysPerYear;
};

/// Functional parameters. Trend in mm/yr with t in years from the window's first
/// epoch; harmonic j has angular frequency 2*pi*j / period_days per day.
struct FunctionalParams {
    double trend = 0.0;
    double intercept = 0.0;
    std::vector<double> cos_amp;
    std::vector<double> sin_amp;
    std::vector<double> offset_epochs;
    std::vector<double> offset_amp;

    int n_harmonics() const noexcept { return static_cast<int>(cos_amp.size()); }
    /// Layout [trend, intercept, c1, e1, ..., cN, eN, g1, ..., g_ng].
    std::vector<double> as_vector() const;
    std::vector<std::string> names() const;
    static FunctionalParams from_vector(const Eigen::VectorXd& v, int n_harmonics,
                                        std::vector<double> offset_epochs);
    /// Model value at an epoch given the time origin.
    double evaluate(double epoch, double origin, double period_days = kDaysPerYear) const;
};

struct DesignMatrix {
    Eigen::MatrixXd matrix;
    std::vector<std::string> names;
    std::vector<double> offset_epochs;
};

/// Columns [t, 1, cos(d1 t), sin(d1 t), ..., H(t - T1), ...], t in years from `origin`.
/// n_harmonics must be in [1, 7]; offsets must fall inside (first, last] epoch.
DesignMatrix build_design(std::span<const double> epochs, double origin, int n_harmonics,
                          const OffsetCatalog& offsets, double period_days = kDaysPerYear);

struct GlsFit {
    FunctionalParams params;
    TimeSeries residuals;
    Eigen::MatrixXd covariance;
};

/// Weighted solution of whitened system A theta ~ z (A = L^-1 X, z = L^-1 s).
/// Throws RankDeficientError naming the dependent columns.
struct WhitenedSolution {
    Eigen::VectorXd theta;
    Eigen::MatrixXd normal_inverse; // (A^T A)^{-1}
    Eigen::VectorXd whitened_residual;
};
WhitenedSolution solve_whitened(const Eigen::MatrixXd& a, const Eigen::VectorXd& z,
                                const std::vector<std::string>& names);

/// Generalized least squares of the series on its design with covariance C over the
/// observed epochs. Throws NumericalError if C is not positive definite.
GlsFit gls_fit(const TimeSeries& ts, const Eigen::MatrixXd& covariance, const FunctionalConfig& config);

} // namespace levyts
