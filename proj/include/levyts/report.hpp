#pragma once

#include "levyts/ensemble.hpp"
#include "levyts/mle.hpp"
#include "levyts/noise.hpp"
#include "levyts/nstep.hpp"

#include <optional>
#include <string>
#include <vector>

namespace levyts {

/// Classification report as pretty-printed JSON with sorted keys. Output depends only
/// on the report contents.
std::string report_json(const ClassificationReport& report, const std::optional<ScenarioTruth>& truth = {});

struct ManifestEntry {
    std::string file;
    std::uint64_t seed = 0;
    ScenarioTruth truth;
};
std::string manifest_json(const std::vector<ManifestEntry>& entries, double beta, std::size_t length,
                          std::uint64_t master_seed);

std::string fit_json(const StochasticResult& fit, const TimeSeries& series);
std::string ensemble_json(const EnsembleSummary& summary);

/// Re-emits the variation curves (summed and per parameter) from a report JSON text.
/// Throws ParseError on malformed input.
std::string report_curves_csv(const std::string& report_text);
std::string report_parameter_curves_csv(const std::string& report_text);
/// One-paragraph text summary of a report JSON.
std::string report_summary(const std::string& report_text);

} // namespace levyts
