#include "levyts/cli.hpp"

#include "levyts/ensemble.hpp"
#include "levyts/error.hpp"
#include "levyts/mle.hpp"
#include "levyts/oracles.hpp"
#include "levyts/parallel.hpp"
#include "levyts/report.hpp"
#include "levyts/series.hpp"
#include "levyts/stats.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace levyts {

namespace fs = std::filesystem;

namespace {

/// Thrown for flag combinations CLI11 cannot express.
struct UsageError : Error {
    using Error::Error;
};

struct Options {
    std::string input;
    std::string output_dir;
    std::uint64_t seed = 1;
    unsigned jobs = 0;

    std::string scenario;
    double beta = 1.1;
    std::size_t replicates = 50;
    std::size_t length = 3650;

    std::string noise_model = "pl+wn";
    std::string steps = "0,0.3,0.5,0.7,0.8,1";
    int harmonics = 2;
    std::string offsets;
    Thresholds thresholds;
    std::string analysis;
    int max_order = 5;

    std::string lengths = "10,100,1000";
    std::string config;
};

std::vector<double> parse_list(const std::string& text, const char* flag) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok.erase(0, tok.find_first_not_of(" \t"));
        tok.erase(tok.find_last_not_of(" \t") + 1);
        double x = 0.0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
        if (tok.empty() || ec != std::errc() || p != tok.data() + tok.size())
            throw UsageError(std::string(flag) + ": bad number '" + tok + "'");
        v.push_back(x);
    }
    if (v.empty()) throw UsageError(std::string(flag) + ": empty list");
    return v;
}

unsigned jobs_of(const Options& o) { return o.jobs == 0 ? default_jobs() : o.jobs; }

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write '" + path.string() + "'");
    f << text;
    if (!f) throw IoError("write failed for '" + path.string() + "'");
}

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

/// Writes to output_dir/name, or to `out` when no directory was given.
void emit(const Options& o, const std::string& name, const std::string& text, std::ostream& out) {
    if (o.output_dir.empty()) {
        out << text;
        return;
    }
    ensure_dir(o.output_dir);
    write_text(fs::path(o.output_dir) / name, text);
}

std::string replicate_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "replicate_%03zu", i);
    return buf;
}

FunctionalConfig functional_config(const Options& o) {
    FunctionalConfig fc;
    fc.n_harmonics = o.harmonics;
    if (!o.offsets.empty()) fc.offsets = read_offsets_file(o.offsets);
    return fc;
}

NStepConfig nstep_config(const Options& o, AnalysisScope fallback) {
    NStepConfig c;
    c.steps_years = parse_list(o.steps, "--steps");
    c.kind = parse_noise_kind(o.noise_model);
    c.functional = functional_config(o);
    c.thresholds = o.thresholds;
    c.max_order = o.max_order;
    c.jobs = jobs_of(o);
    if (o.analysis.empty())
        c.analysis = fallback;
    else
        c.analysis = o.analysis == "first" ? AnalysisScope::FirstWindow : AnalysisScope::AllWindows;
    c.validate();
    return c;
}

void require_output_dir(const Options& o, const char* cmd) {
    if (o.output_dir.empty()) throw UsageError(std::string(cmd) + " requires --output-dir");
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Options& o, std::ostream& out) {
    require_output_dir(o, "simulate");
    const Scenario sc = parse_scenario(o.scenario.empty() ? "A" : o.scenario);
    const NoiseKind kind = parse_noise_kind(o.noise_model);
    ensure_dir(o.output_dir);

    std::vector<ManifestEntry> entries(o.replicates);
    std::vector<std::optional<TimeSeries>> series(o.replicates);
    parallel_for(o.replicates, jobs_of(o), [&](std::size_t i) {
        const auto seed = stats::derive_seed(o.seed, i);
        auto sample = gen_scenario(sc, o.beta, o.length, seed, kind, o.harmonics);
        entries[i] = {replicate_name(i) + ".txt", seed, sample.truth};
        series[i] = std::move(sample.series);
    });
    for (std::size_t i = 0; i < o.replicates; ++i)
        write_series_file((fs::path(o.output_dir) / entries[i].file).string(), *series[i]);
    write_text(fs::path(o.output_dir) / "manifest.json", manifest_json(entries, o.beta, o.length, o.seed));
    out << "wrote " << o.replicates << " series to " << o.output_dir << '\n';
    return kExitOk;
}

int cmd_fit(const Options& o, std::ostream& out) {
    if (o.input.empty()) throw UsageError("fit requires --input");
    const auto ts = read_series_file(o.input);
    const auto fc = functional_config(o);
    FitOptions fo;
    const auto fit = fit_stochastic(ts, parse_noise_kind(o.noise_model), fc, fo);
    emit(o, "fit.json", fit_json(fit, ts), out);
    return kExitOk;
}

std::vector<std::string> list_series(const std::string& dir) {
    std::vector<std::string> files;
    std::error_code ec;
    for (fs::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) {
        if (!it->is_regular_file()) continue;
        const auto ext = it->path().extension().string();
        if (ext == ".txt" || ext == ".dat" || ext == ".tenv" || ext == ".neu") files.push_back(it->path().string());
    }
    if (ec) throw IoError("cannot list '" + dir + "': " + ec.message());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError("no series files in '" + dir + "'");
    return files;
}

int cmd_classify(const Options& o, std::ostream& out) {
    const bool ensemble = !o.scenario.empty();
    if (ensemble == !o.input.empty()) throw UsageError("classify takes exactly one of --input or --scenario");

    if (ensemble) {
        require_output_dir(o, "classify --scenario");
        EnsembleConfig ec;
        ec.scenario = parse_scenario(o.scenario);
        ec.beta = o.beta;
        ec.replicates = o.replicates;
        ec.length = o.length;
        ec.seed = o.seed;
        ec.nstep = nstep_config(o, AnalysisScope::FirstWindow);
        ec.jobs = jobs_of(o);
        const auto reps = run_ensemble(ec);
        ensure_dir(o.output_dir);
        std::vector<ClassificationReport> reports;
        for (const auto& r : reps) {
            write_text(fs::path(o.output_dir) / (replicate_name(r.index) + ".json"), report_json(r.report, r.truth));
            reports.push_back(r.report);
        }
        const auto summary = summarize(reports, ec.nstep.steps_years);
        write_text(fs::path(o.output_dir) / "curves.csv", curves_csv(summary));
        write_text(fs::path(o.output_dir) / "summary.json", ensemble_json(summary));
        out << "classified " << summary.classified << " of " << summary.replicates << " replicates: Gaussian "
            << summary.gaussian << ", Fractional " << summary.fractional << ", Stable " << summary.stable << '\n';
        return kExitOk;
    }

    std::error_code ec;
    if (fs::is_directory(o.input, ec)) {
        require_output_dir(o, "classify on a directory");
        const auto files = list_series(o.input);
        std::vector<TimeSeries> series;
        for (const auto& f : files) series.push_back(read_series_file(f));
        auto cfg = nstep_config(o, AnalysisScope::AllWindows);
        cfg.jobs = 1;
        std::vector<ClassificationReport> reports(files.size());
        parallel_for(files.size(), jobs_of(o), [&](std::size_t i) { reports[i] = run_nstep(series[i], cfg); });
        ensure_dir(o.output_dir);
        for (std::size_t i = 0; i < files.size(); ++i)
            write_text(fs::path(o.output_dir) / (fs::path(files[i]).stem().string() + ".json"),
                       report_json(reports[i]));
        const auto summary = summarize(reports, cfg.steps_years);
        write_text(fs::path(o.output_dir) / "curves.csv", curves_csv(summary));
        write_text(fs::path(o.output_dir) / "summary.json", ensemble_json(summary));
        out << "classified " << summary.classified << " of " << files.size() << " series\n";
        return kExitOk;
    }

    const auto ts = read_series_file(o.input);
    const auto cfg = nstep_config(o, AnalysisScope::AllWindows);
    const auto report = run_nstep(ts, cfg);
    const auto text = report_json(report);
    if (o.output_dir.empty()) {
        out << text;
    } else {
        ensure_dir(o.output_dir);
        write_text(fs::path(o.output_dir) / "report.json", text);
        write_text(fs::path(o.output_dir) / "curves.csv", report_curves_csv(text));
        write_text(fs::path(o.output_dir) / "parameters.csv", report_parameter_curves_csv(text));
        out << "levy_class: " << (report.levy_class ? to_string(*report.levy_class) : "undetermined") << '\n';
    }
    return kExitOk;
}

int cmd_oracle_check(const Options& o, std::ostream& out) {
    std::vector<std::size_t> lengths;
    for (double L : parse_list(o.lengths, "--lengths")) {
        if (!(L >= 2) || L != std::floor(L) || L > 1e7) throw UsageError("oracle lengths must be integers >= 2");
        lengths.push_back(static_cast<std::size_t>(L));
    }
    emit(o, "oracle.csv", oracle_csv(oracle_table(lengths)), out);
    return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out) {
    if (o.input.empty()) throw UsageError("report requires --input");
    const auto text = read_text(o.input);
    if (o.output_dir.empty()) {
        out << report_summary(text);
        return kExitOk;
    }
    const auto curves = report_curves_csv(text);
    const auto params = report_parameter_curves_csv(text);
    ensure_dir(o.output_dir);
    write_text(fs::path(o.output_dir) / "curves.csv", curves);
    write_text(fs::path(o.output_dir) / "parameters.csv", params);
    out << report_summary(text);
    return kExitOk;
}

// ---------------------------------------------------------------------------

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "flat 'key = value' file; flags given on the command line win");
    sub->add_option("--output-dir", o.output_dir, "directory for output files");
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--jobs", o.jobs, "worker threads (0 = all cores)");
}

void add_model(CLI::App* sub, Options& o) {
    sub->add_option("--noise-model", o.noise_model, "stochastic model")
        ->check(CLI::IsMember({"pl+wn", "fn+wn"}));
    sub->add_option("--harmonics", o.harmonics, "number of seasonal harmonics")->check(CLI::Range(1, 7));
    sub->add_option("--offsets", o.offsets, "offset catalogue file (MJD [magnitude] per line)");
}

void add_scenario(CLI::App* sub, Options& o) {
    sub->add_option("--beta", o.beta, "spectral index of the coloured noise")->check(CLI::Range(0.0, 3.0));
    sub->add_option("--replicates", o.replicates, "number of simulated series")->check(CLI::Range(1, 100000));
    sub->add_option("--length", o.length, "daily epochs per series")->check(CLI::Range(730, 10000000));
}

std::string trim(std::string s) {
    s.erase(0, s.find_first_not_of(" \t\r"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    return s;
}

/// Expands `--config FILE` into flags placed right after the subcommand name, so that
/// later command-line flags override them (options keep the last value).
std::vector<std::string> expand_config(const std::vector<std::string>& args, const CLI::App& app) {
    if (args.empty()) return args;
    const CLI::App* sub = nullptr;
    try {
        sub = app.get_subcommand(args[0]);
    } catch (const CLI::OptionNotFound&) {
        return args;
    }
    std::vector<std::string> rest;
    std::string path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a file name");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    std::vector<std::string> out{args[0]};
    if (!path.empty()) {
        std::ifstream f(path);
        if (!f) throw IoError("cannot open config file '" + path + "'");
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(f, line)) {
            ++lineno;
            if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw UsageError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
                value = value.substr(1, value.size() - 2);
            if (key.rfind("--", 0) == 0) key.erase(0, 2);
            if (key == "config" || sub->get_option_no_throw("--" + key) == nullptr)
                throw UsageError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "' for " +
                                 sub->get_name());
            out.push_back("--" + key);
            out.push_back(value);
        }
    }
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Mixed-spectrum time series fitting and Levy-driver classification", "levyts"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    auto* sim = app.add_subcommand("simulate", "write scenario replicates and a truth manifest");
    add_common(sim, o);
    add_scenario(sim, o);
    add_model(sim, o);
    sim->add_option("--scenario", o.scenario, "A, B or C")->check(CLI::IsMember({"A", "B", "C"}));

    auto* fit = app.add_subcommand("fit", "functional + stochastic maximum-likelihood fit of one series");
    add_common(fit, o);
    add_model(fit, o);
    fit->add_option("--input", o.input, "series file")->required();

    auto* cls = app.add_subcommand("classify", "N-step classification of a series, a directory or an ensemble");
    add_common(cls, o);
    add_model(cls, o);
    add_scenario(cls, o);
    cls->add_option("--input", o.input, "series file or directory");
    cls->add_option("--scenario", o.scenario, "simulate and classify an ensemble instead")
        ->check(CLI::IsMember({"A", "B", "C"}));
    cls->add_option("--steps", o.steps, "comma-separated window end offsets in years");
    cls->add_option("--gaussian-pct", o.thresholds.gaussian_pct, "variation at or below which parameters are equal");
    cls->add_option("--stable-pct", o.thresholds.stable_pct, "variation above which parameters differ");
    cls->add_option("--heavy-alpha", o.thresholds.heavy_alpha, "stable alpha below which tails count as heavy");
    cls->add_option("--corr-margin", o.thresholds.corr_margin, "required stable-over-normal correlation gain");
    cls->add_option("--analysis", o.analysis, "windows given distribution and memory fits")
        ->check(CLI::IsMember({"all", "first"}));
    cls->add_option("--max-order", o.max_order, "largest p and q in the BIC grid")->check(CLI::Range(0, 8));

    auto* orc = app.add_subcommand("oracle-check", "closed-form residual moments against brute force");
    add_common(orc, o);
    orc->add_option("--lengths", o.lengths, "comma-separated series lengths");

    auto* rep = app.add_subcommand("report", "summarise a report JSON and export its curves");
    add_common(rep, o);
    rep->add_option("--input", o.input, "report JSON")->required();

    std::vector<std::string> expanded;
    try {
        expanded = expand_config(args, app);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(o, out);
        if (fit->parsed()) return cmd_fit(o, out);
        if (cls->parsed()) return cmd_classify(o, out);
        if (orc->parsed()) return cmd_oracle_check(o, out);
        return cmd_report(o, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

} // namespace levyts
