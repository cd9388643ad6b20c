#pragma once

#include "levyts/noise.hpp"
#include "levyts/nstep.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace levyts {

struct EnsembleConfig {
    Scenario scenario = Scenario::A;
    double beta = 1.1;
    std::size_t replicates = 50;
    std::size_t length = 3650;
    std::uint64_t seed = 1;
    NStepConfig nstep;
    unsigned jobs = 1;
};

struct ReplicateResult {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    ScenarioTruth truth;
    ClassificationReport report;
};

struct CurveStats {
    std::vector<double> mean;
    std::vector<double> std;
};

/// Mean and standard deviation per step over the replicates with a value there.
CurveStats curve_stats(const std::vector<std::vector<double>>& curves);

struct EnsembleSummary {
    std::vector<double> steps_years;
    CurveStats functional;
    CurveStats stochastic;
    std::size_t replicates = 0;
    std::size_t classified = 0;
    std::size_t gaussian = 0, fractional = 0, stable = 0;
    // First-window means over replicates that have them.
    double arma_error = 0.0;
    double farima_error = 0.0;
    double corr_normal = 0.0;
    double corr_levy = 0.0;
    double alpha = 0.0;
    std::size_t farima_wins = 0;
};

/// Simulates and analyses every replicate; replicate i uses derive_seed(seed, i).
std::vector<ReplicateResult> run_ensemble(const EnsembleConfig& config);

EnsembleSummary summarize(const std::vector<ClassificationReport>& reports, const std::vector<double>& steps_years);

/// step_offset_yr, functional_pct_mean, functional_pct_std, stochastic_pct_mean, stochastic_pct_std
std::string curves_csv(const EnsembleSummary& summary);

} // namespace levyts
