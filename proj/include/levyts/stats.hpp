#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace levyts::stats {

double mean(std::span<const double> x);
/// Unbiased (n-1) variance.
double variance(std::span<const double> x);
double stddev(std::span<const double> x);
double skewness(std::span<const double> x);
double excess_kurtosis(std::span<const double> x);
/// Linear-interpolation quantile (Hyndman-Fan type 7) of unsorted data.
double quantile(std::span<const double> x, double prob);
double quantile_sorted(std::span<const double> sorted, double prob);
double median(std::span<const double> x);
/// Median absolute deviation scaled to be consistent with a Gaussian sigma.
double mad_sigma(std::span<const double> x);
double pearson(std::span<const double> x, std::span<const double> y);

struct LineFit {
    double slope;
    double intercept;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Jarque-Bera normality statistic.
double jarque_bera(std::span<const double> x);

/// Raw periodogram |X(f_k)|^2 / n at k = 1 .. n/2 (mean removed).
std::vector<double> periodogram(std::span<const double> x);

std::uint64_t splitmix64(std::uint64_t x);
/// Independent seed for stream `stream` derived from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

} // namespace levyts::stats
