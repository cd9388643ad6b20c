#pragma once

#include "levyts/series.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace levyts {

enum class LikelihoodMethod { Auto, Fast, Dense };

/// Profiled Gaussian quantities for covariance C = w^2 I + c^2 T T^T on the observed
/// epochs, T the lower-triangular Toeplitz matrix of pl_filter(beta).
struct GridLikelihood {
    double log_det = 0.0;          // ln det C restricted to observed epochs
    double rss = 0.0;              // min over theta of (s - X theta)^T C^-1 (s - X theta)
    Eigen::VectorXd theta;         // GLS estimate (empty when X has no columns)
    Eigen::MatrixXd normal_inverse; // (X^T C^-1 X)^-1
    std::size_t n_obs = 0;

    /// -1/2 [n ln 2 pi + ln det C + rss].
    double log_likelihood() const;
};

/// Evaluates GLS-profiled likelihood terms for one series and design.
///
/// The fast route factors the full-grid covariance with a generalized Schur
/// recursion on its rank-two displacement, O(n^2) time and O(n) memory, and
/// accounts for gaps by treating missing values as nuisance parameters. The dense
/// route forms C on observed epochs and uses a Cholesky factorization.
class GridWhitener {
public:
    GridWhitener(const TimeSeries& ts, Eigen::MatrixXd design, std::vector<std::string> names);

    /// Throws NumericalError if C is not positive definite.
    GridLikelihood evaluate(double w, double c, double beta, LikelihoodMethod method = LikelihoodMethod::Auto) const;

    std::size_t observed() const noexcept { return static_cast<std::size_t>(y_.size()); }
    std::size_t grid_length() const noexcept { return grid_length_; }
    const Eigen::MatrixXd& design() const noexcept { return x_; }
    /// Which route Auto resolves to for this problem size.
    LikelihoodMethod preferred() const noexcept;

private:
    GridLikelihood fast(double w, double c, double beta) const;
    GridLikelihood dense(double w, double c, double beta) const;

    std::size_t grid_length_;
    std::vector<std::size_t> index_;
    std::vector<std::size_t> gaps_;
    Eigen::VectorXd y_;
    Eigen::MatrixXd x_;
    std::vector<std::string> names_;
};

} // namespace levyts
