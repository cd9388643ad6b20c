#pragma once

#include "levyts/functional.hpp"
#include "levyts/memory.hpp"
#include "levyts/mle.hpp"
#include "levyts/noise.hpp"
#include "levyts/series.hpp"
#include "levyts/stable.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace levyts {

enum class LevyClass { GaussianLevy, FractionalLevy, StableLevy };
std::string to_string(LevyClass c);

struct Thresholds {
    double gaussian_pct = 3.0;  // at or below: parameters "equal"
    double stable_pct = 20.0;   // above: parameters "different"
    double heavy_alpha = 1.9;   // fitted alpha below this suggests heavy tails
    double corr_margin = 0.02;  // ... when the stable fit also beats the normal fit by this

    /// Throws ValidationError unless 0 <= gaussian_pct <= stable_pct, 0 < heavy_alpha <= 2
    /// and 0 <= corr_margin <= 1.
    void validate() const;
};

/// 100 * sum |last - first| / sum |first| over entries with |first| >= 1e-12.
double variation_pct(std::span<const double> first, std::span<const double> last);

struct ClassificationInputs {
    std::optional<double> stochastic_pct;
    std::optional<double> functional_pct;
    std::optional<double> alpha;
    std::optional<double> corr_levy;
    std::optional<double> corr_normal;
};

/// True when the first-window residuals look heavy tailed.
bool heavy_tailed(double alpha, double corr_levy, double corr_normal, const Thresholds& t);

/// Decision table: StableLevy when max variation exceeds stable_pct or the residuals
/// are heavy tailed; GaussianLevy when max variation is within gaussian_pct and they
/// are not; FractionalLevy otherwise. Throws ValidationError listing missing inputs.
LevyClass classify(const ClassificationInputs& in, const Thresholds& t = {});

struct ResidualSummary {
    std::size_t n = 0;
    double std = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

struct DistributionFit {
    NormalFit normal;
    StableFitResult stable;
    double corr_normal = 0.0;
    double corr_levy = 0.0;
};

/// Normal and stable fits plus their histogram correlations.
DistributionFit fit_distribution(std::span<const double> residuals);

struct WindowFitRecord {
    double end_offset_days = 0.0;
    std::size_t n_obs = 0;
    std::size_t gaps = 0;
    double first_epoch = 0.0;
    double last_epoch = 0.0;
    FunctionalParams functional;
    std::vector<double> functional_sigma;
    StochasticFit stochastic;
    ResidualSummary residual;
    std::optional<DistributionFit> distribution;
    std::optional<ModelSelection> memory;
    bool ok = false;
    std::vector<std::string> flags;
};

enum class AnalysisScope { AllWindows, FirstWindow, None };

struct NStepConfig {
    std::vector<double> steps_years{0.0, 0.3, 0.5, 0.7, 0.8, 1.0};
    NoiseKind kind = NoiseKind::PowerLawWhite;
    FunctionalConfig functional;
    Thresholds thresholds;
    /// Windows on which distribution and ARMA/FARIMA fits run.
    AnalysisScope analysis = AnalysisScope::AllWindows;
    int max_order = 5;
    unsigned jobs = 1;

    void validate() const;
};

struct ClassificationReport {
    std::size_t n_obs = 0;
    std::size_t gaps = 0;
    double dt = 1.0;
    double first_epoch = 0.0;
    double last_epoch = 0.0;
    std::vector<std::string> header;
    NoiseKind kind = NoiseKind::PowerLawWhite;
    int n_harmonics = 2;
    Thresholds thresholds;

    std::vector<WindowFitRecord> steps;
    /// Variation of each window against the first one, per step.
    std::vector<double> functional_curve;
    std::vector<double> stochastic_curve;
    /// Per-parameter percentage changes against the first window, per step.
    std::vector<std::vector<double>> functional_param_curves;
    std::vector<std::vector<double>> stochastic_param_curves;
    std::vector<std::string> functional_names;
    std::vector<std::string> stochastic_names;

    std::optional<double> functional_pct;
    std::optional<double> stochastic_pct;
    bool heavy_tail = false;
    std::string distribution_verdict; // "Gaussian" or "Levy alpha-stable"
    std::string memory_verdict;       // "ARMA" or "FARIMA"
    std::optional<LevyClass> levy_class;
    bool degraded = false;
    std::vector<std::string> flags;
};

/// Nested-window analysis: fit every window, compare first and last, classify.
/// Output depends only on the inputs, not on the job count.
ClassificationReport run_nstep(const TimeSeries& ts, const NStepConfig& config);

} // namespace levyts
