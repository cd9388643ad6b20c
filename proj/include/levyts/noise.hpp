#pragma once

#include "levyts/functional.hpp"
#include "levyts/series.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace levyts {

inline constexpr double kDefaultStartMjd = 51544.0; // 2000-01-01

/// Power-law spectral index with its Hurst and fractional-difference equivalents:
/// beta = 2H - 1, H = d + 1/2.
class SpectralIndex {
public:
    explicit SpectralIndex(double beta);
    static SpectralIndex from_hurst(double hurst) { return SpectralIndex(2.0 * hurst - 1.0); }
    static SpectralIndex from_fractional_d(double d) { return SpectralIndex(2.0 * d); }
    double beta() const noexcept { return beta_; }
    double hurst() const noexcept { return (beta_ + 1.0) / 2.0; }
    double fractional_d() const noexcept { return hurst() - 0.5; }

private:
    double beta_;
};

enum class NoiseKind { PowerLawWhite, FlickerWhite };

std::string to_string(NoiseKind kind);
/// Accepts "pl+wn" / "fn+wn" (case-insensitive).
NoiseKind parse_noise_kind(const std::string& text);

/// White + coloured noise model. a_wh in mm, b_cl in mm/yr^(beta/4).
struct NoiseModelSpec {
    NoiseKind kind = NoiseKind::PowerLawWhite;
    double a_wh = 0.0;
    double b_cl = 0.0;
    double beta = 1.0;

    /// Throws DomainError on negative amplitudes, both zero, or beta outside [0, 3].
    void validate() const;
    /// beta actually used: exactly 1 for flicker + white.
    double effective_beta() const noexcept { return kind == NoiseKind::FlickerWhite ? 1.0 : beta; }
};

/// Fractional-integration impulse response: h0 = 1, h_i = h_{i-1} (beta/2 + i - 1) / i.
std::vector<double> pl_filter(double beta, std::size_t length);

/// Per-step amplitude factor (dt in years)^(beta/4) that gives b_cl units of mm/yr^(beta/4).
double colored_step_scale(double beta, double dt_days);

/// a_wh^2 I + b_cl^2 (dt_yr)^(beta/2) U U^T restricted to the observed epochs,
/// U the lower-triangular Toeplitz matrix of pl_filter.
Eigen::MatrixXd pl_covariance(const NoiseModelSpec& spec, const TimeSeries& ts);
/// Same, from raw epochs; throws DomainError unless the epochs sit on a uniform grid of step dt.
Eigen::MatrixXd pl_covariance(const NoiseModelSpec& spec, std::span<const double> epochs, double dt);

/// White plus filtered-white draw, deterministic for a given seed.
TimeSeries gen_noise(const NoiseModelSpec& spec, std::size_t length, std::uint64_t seed, double dt = 1.0,
                     double first_epoch = kDefaultStartMjd);

enum class Scenario { A, B, C };
std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& text);

struct ScenarioTruth {
    Scenario scenario = Scenario::A;
    FunctionalParams functional;
    NoiseModelSpec stochastic;
};

struct ScenarioSample {
    TimeSeries series;
    ScenarioTruth truth;
};

/// Simulated daily series: trend a ~ U[1,3] mm/yr, intercept 0, annual (0.4, 0.2) mm,
/// white 1.6 mm, coloured amplitude uniform in the scenario band
/// (A: [0.01,0.1], B: [0.1,1], C: [1,3] mm/yr^(beta/4)).
ScenarioSample gen_scenario(Scenario scenario, double beta, std::size_t length, std::uint64_t seed,
                            NoiseKind kind = NoiseKind::PowerLawWhite, int n_harmonics = 2);

/// Levy alpha-stable motion: cumulative sum of i.i.d. stable increments.
TimeSeries gen_stable_motion(double alpha, double skew, std::size_t length, std::uint64_t seed);

/// Fractional Levy stable motion by a midpoint Riemann sum of the moving-average kernel
/// (t-u)_+^(H-1/alpha) - (-u)_+^(H-1/alpha) over symmetric stable increments, truncated
/// `past` steps into the past (0 selects 10 * length).
TimeSeries gen_flsm(double alpha, double hurst, std::size_t length, std::uint64_t seed, std::size_t past = 0);

} // namespace levyts
