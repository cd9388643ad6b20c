#pragma once

#include "levyts/functional.hpp"
#include "levyts/noise.hpp"
#include "levyts/series.hpp"
#include "levyts/whitening.hpp"

#include <optional>

namespace levyts {

struct StochasticFit {
    NoiseKind kind = NoiseKind::PowerLawWhite;
    double a_wh = 0.0;
    double b_cl = 0.0;
    double beta = 1.0;
    /// Formal sigmas from the numerical Hessian of the profile likelihood; NaN when
    /// the Hessian is not negative definite (see hessian_ok).
    double sigma_a_wh = 0.0;
    double sigma_b_cl = 0.0;
    double sigma_beta = 0.0;
    double log_likelihood = 0.0;
    std::size_t n_obs = 0;
    bool converged = false;
    bool hessian_ok = false;
    int iterations = 0;

    NoiseModelSpec spec() const { return {kind, a_wh, b_cl, beta}; }
    /// [a_wh, b_cl, beta] (beta omitted for flicker + white).
    std::vector<double> as_vector() const;
};

struct FitOptions {
    int max_outer = 50;
    double tolerance = 1e-6;
    /// Start from this solution instead of the default multi-start.
    std::optional<StochasticFit> warm_start;
    bool compute_sigmas = true;
    LikelihoodMethod method = LikelihoodMethod::Auto;
};

struct StochasticResult {
    StochasticFit stochastic;
    FunctionalParams functional;
    Eigen::MatrixXd functional_covariance;
    TimeSeries residuals;
};

/// Exact Gaussian log-likelihood of a residual series under the noise model.
double log_likelihood(const TimeSeries& residuals, const NoiseModelSpec& spec,
                      LikelihoodMethod method = LikelihoodMethod::Auto);

/// Joint maximum likelihood of the functional and noise parameters. The functional
/// part is solved by GLS inside every likelihood evaluation and the noise scale is
/// profiled out, leaving a search over (ln b/a, beta in [0.2, 3]). Non-convergence is
/// reported through the flags, not thrown.
StochasticResult fit_stochastic(const TimeSeries& ts, NoiseKind kind, const FunctionalConfig& config,
                                const FitOptions& options = {});

} // namespace levyts
