#include "levyts/series.hpp"

#include "levyts/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace levyts {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& tok, double& out) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// "# sampling period 1.0" (Hector convention); returns dt if the line matches.
std::optional<double> sampling_period(const std::string& header_line) {
    auto toks = split_ws(header_line.substr(1));
    if (toks.size() >= 3 && toks[0] == "sampling" && toks[1] == "period") {
        double dt;
        if (parse_double(toks[2], dt)) return dt;
    }
    return std::nullopt;
}

} // namespace

TimeSeries TimeSeries::from_epochs(std::span<const double> epochs, std::vector<double> values, double dt,
                                   std::vector<std::string> header) {
    if (epochs.size() != values.size()) throw ValidationError("epoch and value counts differ");
    if (epochs.size() < 2) throw ValidationError("series needs at least two epochs");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("sampling interval must be positive");
    TimeSeries ts;
    ts.t0_ = epochs.front();
    ts.dt_ = dt;
    ts.grid_.reserve(epochs.size());
    for (std::size_t i = 0; i < epochs.size(); ++i) {
        if (!std::isfinite(epochs[i])) throw ValidationError("non-finite epoch at index " + std::to_string(i));
        if (!std::isfinite(values[i])) throw ValidationError("non-finite value at epoch " + format_double(epochs[i]));
        if (i > 0 && !(epochs[i] > epochs[i - 1]))
            throw ValidationError("epochs not strictly increasing at " + format_double(epochs[i]));
        const double k = std::round((epochs[i] - ts.t0_) / dt);
        if (std::abs(epochs[i] - (ts.t0_ + k * dt)) > 1e-4 * dt)
            throw ValidationError("epoch " + format_double(epochs[i]) + " is not on the sampling grid");
        const auto idx = static_cast<std::size_t>(k);
        if (i > 0 && idx <= ts.grid_.back())
            throw ValidationError("two epochs share grid slot near " + format_double(epochs[i]));
        ts.grid_.push_back(idx);
    }
    ts.values_ = std::move(values);
    ts.header_ = std::move(header);
    return ts;
}

TimeSeries TimeSeries::uniform(double first_epoch, double dt, std::vector<double> values,
                               std::vector<std::string> header) {
    if (values.size() < 2) throw ValidationError("series needs at least two epochs");
    if (!(dt > 0.0)) throw ValidationError("sampling interval must be positive");
    for (double v : values)
        if (!std::isfinite(v)) throw ValidationError("non-finite value");
    TimeSeries ts;
    ts.t0_ = first_epoch;
    ts.dt_ = dt;
    ts.grid_.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) ts.grid_[i] = i;
    ts.values_ = std::move(values);
    ts.header_ = std::move(header);
    return ts;
}

std::vector<double> TimeSeries::epochs() const {
    std::vector<double> e(size());
    for (std::size_t i = 0; i < size(); ++i) e[i] = epoch(i);
    return e;
}

std::vector<double> TimeSeries::gap_epochs() const {
    std::vector<double> gaps;
    for (std::size_t i = 1; i < grid_.size(); ++i)
        for (std::size_t g = grid_[i - 1] + 1; g < grid_[i]; ++g) gaps.push_back(t0_ + static_cast<double>(g) * dt_);
    return gaps;
}

TimeSeries TimeSeries::with_values(std::vector<double> values) const {
    if (values.size() != size()) throw ValidationError("with_values: length mismatch");
    for (double v : values)
        if (!std::isfinite(v)) throw ValidationError("non-finite value");
    TimeSeries ts = *this;
    ts.values_ = std::move(values);
    return ts;
}

TimeSeries TimeSeries::prefix(std::size_t n) const {
    if (n < 2 || n > size()) throw ValidationError("prefix length out of range");
    TimeSeries ts;
    ts.t0_ = t0_;
    ts.dt_ = dt_;
    ts.grid_.assign(grid_.begin(), grid_.begin() + static_cast<std::ptrdiff_t>(n));
    ts.values_.assign(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(n));
    ts.header_ = header_;
    return ts;
}

void OffsetCatalog::validate_against(const TimeSeries& ts) const {
    if (!magnitudes.empty() && magnitudes.size() != epochs.size())
        throw ValidationError("offset magnitudes and epochs differ in count");
    for (std::size_t k = 0; k < epochs.size(); ++k) {
        if (k > 0 && !(epochs[k] > epochs[k - 1])) throw ValidationError("offset epochs not strictly increasing");
        if (epochs[k] < ts.first_epoch() - ts.dt() || epochs[k] > ts.last_epoch() + ts.dt())
            throw ValidationError("offset epoch " + format_double(epochs[k]) + " outside the series span");
    }
}

OffsetCatalog OffsetCatalog::within(double first, double last) const {
    OffsetCatalog out;
    for (std::size_t k = 0; k < epochs.size(); ++k) {
        if (epochs[k] > first && epochs[k] <= last) {
            out.epochs.push_back(epochs[k]);
            out.magnitudes.push_back(magnitudes.empty() ? std::nullopt : magnitudes[k]);
        }
    }
    return out;
}

TimeSeries parse_series(std::istream& in, double default_dt) {
    std::vector<std::string> header;
    std::vector<double> epochs, values;
    double dt = default_dt;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            header.push_back(t);
            if (auto p = sampling_period(t)) dt = *p;
            continue;
        }
        auto toks = split_ws(t);
        if (toks.size() < 2 || toks.size() > 3)
            throw ParseError(lineno, "expected 'MJD value [sigma]', got " + std::to_string(toks.size()) + " fields");
        double e, v, s;
        if (!parse_double(toks[0], e)) throw ParseError(lineno, "bad epoch '" + toks[0] + "'");
        if (!parse_double(toks[1], v)) throw ParseError(lineno, "bad value '" + toks[1] + "'");
        if (toks.size() == 3 && !parse_double(toks[2], s)) throw ParseError(lineno, "bad sigma '" + toks[2] + "'");
        if (!epochs.empty() && !(e > epochs.back()))
            throw ValidationError("line " + std::to_string(lineno) + ": epochs not strictly increasing");
        epochs.push_back(e);
        values.push_back(v);
    }
    return TimeSeries::from_epochs(epochs, std::move(values), dt, std::move(header));
}

TimeSeries read_series_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open series file '" + path + "'");
    return parse_series(in);
}

void write_series(std::ostream& out, const TimeSeries& ts) {
    bool has_period = false;
    for (const auto& h : ts.header()) {
        out << h << '\n';
        has_period = has_period || sampling_period(h).has_value();
    }
    if (!has_period) out << "# sampling period " << format_double(ts.dt()) << '\n';
    const auto v = ts.values();
    for (std::size_t i = 0; i < ts.size(); ++i) out << format_double(ts.epoch(i)) << ' ' << format_double(v[i]) << '\n';
}

void write_series_file(const std::string& path, const TimeSeries& ts) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write series file '" + path + "'");
    write_series(out, ts);
    if (!out) throw IoError("write failed for '" + path + "'");
}

OffsetCatalog parse_offsets(std::istream& in) {
    OffsetCatalog cat;
    std::string line;
    std::size_t lineno = 0;
    bool any_magnitude = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto toks = split_ws(t);
        if (toks.size() > 2) throw ParseError(lineno, "expected 'MJD [magnitude]'");
        double e;
        if (!parse_double(toks[0], e)) throw ParseError(lineno, "bad offset epoch '" + toks[0] + "'");
        std::optional<double> g;
        if (toks.size() == 2) {
            double m;
            if (!parse_double(toks[1], m)) throw ParseError(lineno, "bad magnitude '" + toks[1] + "'");
            g = m;
            any_magnitude = true;
        }
        if (!cat.epochs.empty() && !(e > cat.epochs.back()))
            throw ValidationError("line " + std::to_string(lineno) + ": offset epochs not strictly increasing");
        cat.epochs.push_back(e);
        cat.magnitudes.push_back(g);
    }
    if (!any_magnitude) cat.magnitudes.assign(cat.epochs.size(), std::nullopt);
    return cat;
}

OffsetCatalog read_offsets_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open offset file '" + path + "'");
    return parse_offsets(in);
}

TimeSeries slice_window(const TimeSeries& ts, double end_offset_days, std::size_t min_length) {
    if (!(end_offset_days >= 0.0 && end_offset_days <= 365.0))
        throw DomainError("window end offset must be within [0, 365] days");
    const double cutoff = ts.last_epoch() - 365.0 + end_offset_days;
    std::size_t n = 0;
    while (n < ts.size() && ts.epoch(n) <= cutoff + 1e-6 * ts.dt()) ++n;
    if (n < min_length || n < 2)
        throw ValidationError("window ending at offset " + std::to_string(end_offset_days) + " d keeps " +
                              std::to_string(n) + " epochs; need " + std::to_string(min_length));
    return ts.prefix(n);
}

} // namespace levyts
