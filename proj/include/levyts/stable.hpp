#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace levyts {

/// X = scale * Z + location with Z following the standard characteristic function
///   exp(-|u|^a [1 - i k tan(pi a/2) sign u])   (a != 1)
///   exp(-|u|   [1 + i k (2/pi) sign u])         (a == 1)
/// Note that a = 2 gives a Gaussian with variance 2 scale^2.
struct StableParams {
    double alpha = 2.0;
    double k = 0.0;
    double scale = 1.0;
    double location = 0.0;

    /// Throws DomainError outside 0 < alpha <= 2, |k| <= 1, scale > 0.
    void validate() const;
};

std::complex<double> stable_charfn(double u, double alpha, double k);

struct UniformGrid {
    double start = 0.0;
    double step = 1.0;
    std::size_t count = 0;
    double at(std::size_t i) const noexcept { return start + step * static_cast<double>(i); }
};

/// Density on a uniform grid by trapezoidal Fourier inversion of the characteristic
/// function over 2^14 frequencies (|phi| < 1e-12 beyond the last one), evaluated with
/// a chirp-z transform. Negative ringing is clamped at zero.
/// Throws DomainError for alpha < 0.3 where the inversion is unreliable.
std::vector<double> stable_pdf(const UniformGrid& grid, const StableParams& params);

/// Fast pointwise density for likelihood work: inversion on a dense grid over
/// location +- 40 scale with cubic interpolation, Pareto tail asymptotics beyond.
class StableDensity {
public:
    explicit StableDensity(const StableParams& params, std::size_t grid_points = 4096,
                           std::size_t frequencies = 8192);
    double operator()(double x) const;
    double log_pdf(double x) const;
    const StableParams& params() const noexcept { return params_; }

private:
    double standard(double z) const;
    StableParams params_;
    double z0_ = 0.0, dz_ = 0.0;
    std::vector<double> values_;
    double tail_coef_ = 0.0;
};

/// Chambers-Mallows-Stuck draw from the standard (scale 1, location 0) law above.
double sample_stable(std::mt19937_64& rng, double alpha, double k);

/// Quantile-based starting estimate (McCulloch-style ratios matched against tables
/// built from this library's own density).
StableParams mcculloch_estimate(std::span<const double> sample);

struct StableFitResult {
    StableParams params;
    double log_likelihood = 0.0;
    bool converged = false;
    int evaluations = 0;
};

/// Maximum likelihood over (alpha, k, scale, location); needs >= 200 values with spread.
StableFitResult fit_stable_ml(std::span<const double> sample);

struct NormalFit {
    double mean = 0.0;
    double std = 1.0;
    double pdf(double x) const;
};
NormalFit fit_normal(std::span<const double> sample);

/// Pearson correlation between the Freedman-Diaconis histogram density of the sample
/// and the model density at the bin centres. Throws DomainError with fewer than 5 bins
/// or fewer than 200 values.
double dist_correlation(std::span<const double> sample, const std::function<double(double)>& pdf);

} // namespace levyts
