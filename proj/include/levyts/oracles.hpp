#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace levyts {

enum class OracleMode { Exact, Approx };
enum class ResidualKind { Trend, Seasonal, Offsets };

std::string to_string(ResidualKind kind);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Deterministic residual signal left in s1(t_i) = D(t_i) + n(t_i), t_i = i dt
/// (days, i = 1..L), plus the noise mean mu_c and the noise variance over the L
/// epochs sigma2_n (population convention, i.e. sigma^2 (L-1)/L for white noise).
struct ResidualSignalSpec {
    ResidualKind kind = ResidualKind::Trend;
    double dt = 1.0;
    // Trend: a_r mm/yr, b_r mm.
    double a_r = 0.0;
    double b_r = 0.0;
    // Seasonal: harmonic j has angular frequency 2 pi j / period_days; delta is the
    // assumed signal average used by the approximate formulas.
    std::vector<double> c_r;
    std::vector<double> e_r;
    double delta = 0.0;
    double period_days = 365.25;
    // Offsets: magnitudes g_k (mm) switching on at epoch index positions T_k in [1, L].
    std::vector<double> g;
    std::vector<double> t_k;
    // Noise.
    double mu_c = 0.0;
    double sigma2_n = 0.0;
};

/// Exact mode: closed forms of the sample mean and population variance (cross terms
/// with the noise have zero expectation). Approx mode: the large-L approximations.
Moments trend_moments(const ResidualSignalSpec& spec, std::size_t length, OracleMode mode);
Moments seasonal_moments(const ResidualSignalSpec& spec, std::size_t length, OracleMode mode);
Moments offset_moments(const ResidualSignalSpec& spec, std::size_t length, OracleMode mode);
Moments residual_moments(const ResidualSignalSpec& spec, std::size_t length, OracleMode mode);

/// Second line of the trend variance as printed in the source literature:
/// a^2 (L+1)(2L+1)/6 - a^2 (L+1)^2/4 + b^2 + sigma2_n - mu_c (mu_c + a (L+1)).
double trend_variance_printed(const ResidualSignalSpec& spec, std::size_t length);

/// Direct epoch-by-epoch summation of the deterministic part plus noise moments.
Moments brute_force_moments(const ResidualSignalSpec& spec, std::size_t length);

/// Average over `draws` realizations with Gaussian white noise of the sample mean
/// and population variance.
Moments monte_carlo_moments(const ResidualSignalSpec& spec, std::size_t length, std::size_t draws,
                            std::uint64_t seed);

struct OracleRow {
    ResidualKind kind;
    std::size_t length;
    Moments exact;
    Moments approx;
    Moments brute;
    double printed_variance; // NaN except for the trend kind
    double growth_ratio_2l;  // exact variance at 2L over exact variance at L
};

/// Default inputs for each kind as used by the oracle-check command.
ResidualSignalSpec default_oracle_spec(ResidualKind kind, std::size_t length);
std::vector<OracleRow> oracle_table(const std::vector<std::size_t>& lengths);
/// CSV with one row per (kind, L).
std::string oracle_csv(const std::vector<OracleRow>& rows);

} // namespace levyts
