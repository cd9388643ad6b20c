#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace levyts {

inline constexpr double kDaysPerYear = 365.25;
/// Minimum number of observed epochs for a functional + stochastic fit (two years).
inline constexpr std::size_t kMinFitLength = 730;

/// Displacement series (mm) on a uniform sampling grid with optional gaps.
///
/// Observed epochs are stored as integer offsets on the grid t0 + i*dt, so a
/// missing epoch is simply an index that does not appear. Values are immutable
/// once constructed.
class TimeSeries {
public:
    /// Validates and places epochs on the grid anchored at epochs.front().
    /// Throws ValidationError for non-increasing or off-grid epochs, non-finite
    /// values, fewer than two epochs or dt <= 0.
    static TimeSeries from_epochs(std::span<const double> epochs, std::vector<double> values, double dt = 1.0,
                                  std::vector<std::string> header = {});
    /// Gap-free series starting at first_epoch.
    static TimeSeries uniform(double first_epoch, double dt, std::vector<double> values,
                              std::vector<std::string> header = {});

    std::size_t size() const noexcept { return values_.size(); }
    double dt() const noexcept { return dt_; }
    double first_epoch() const noexcept { return t0_; }
    double last_epoch() const noexcept { return epoch(size() - 1); }
    double epoch(std::size_t i) const noexcept { return t0_ + static_cast<double>(grid_[i]) * dt_; }
    std::vector<double> epochs() const;
    std::span<const double> values() const noexcept { return values_; }
    /// Grid offset of each observed epoch; grid_index()[0] == 0.
    std::span<const std::size_t> grid_index() const noexcept { return grid_; }
    /// Number of grid slots spanned, first to last epoch inclusive.
    std::size_t grid_length() const noexcept { return grid_.back() + 1; }
    std::size_t gap_count() const noexcept { return grid_length() - size(); }
    std::vector<double> gap_epochs() const;
    const std::vector<std::string>& header() const noexcept { return header_; }

    /// Same epochs, new values (e.g. residuals).
    TimeSeries with_values(std::vector<double> values) const;
    /// First n observed epochs.
    TimeSeries prefix(std::size_t n) const;

private:
    TimeSeries() = default;
    double t0_ = 0.0;
    double dt_ = 1.0;
    std::vector<std::size_t> grid_;
    std::vector<double> values_;
    std::vector<std::string> header_;
};

/// Epochs of step discontinuities, with optional known magnitudes (mm).
struct OffsetCatalog {
    std::vector<double> epochs;
    std::vector<std::optional<double>> magnitudes;

    std::size_t size() const noexcept { return epochs.size(); }
    bool empty() const noexcept { return epochs.empty(); }
    /// Throws ValidationError unless epochs strictly increase and every epoch lies
    /// within [first - dt, last + dt] of the series.
    void validate_against(const TimeSeries& ts) const;
    /// Offsets strictly after `first` and at or before `last`.
    OffsetCatalog within(double first, double last) const;
};

/// Reads the two/three column text format: "MJD value [sigma]" with '#' header lines.
/// A header line "# sampling period <days>" sets dt.
TimeSeries parse_series(std::istream& in, double default_dt = 1.0);
TimeSeries read_series_file(const std::string& path);
/// Writes header lines, a sampling period line when missing, then one line per
/// observed epoch in shortest round-trip decimal form.
void write_series(std::ostream& out, const TimeSeries& ts);
void write_series_file(const std::string& path, const TimeSeries& ts);

OffsetCatalog parse_offsets(std::istream& in);
OffsetCatalog read_offsets_file(const std::string& path);

/// Prefix window whose last epoch is the largest epoch <= last_epoch - 365 + end_offset_days.
/// end_offset_days must be in [0, 365]; the window must keep at least min_length epochs.
TimeSeries slice_window(const TimeSeries& ts, double end_offset_days, std::size_t min_length = kMinFitLength);

} // namespace levyts
