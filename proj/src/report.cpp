#include "levyts/report.hpp"

#include "levyts/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <sstream>

namespace levyts {

using nlohmann::json;

namespace {

json functional_json(const FunctionalParams& p) {
    return {{"trend_mm_per_yr", p.trend},     {"intercept_mm", p.intercept}, {"cos_mm", p.cos_amp},
            {"sin_mm", p.sin_amp},            {"offset_epochs", p.offset_epochs},
            {"offset_mm", p.offset_amp}};
}

json stochastic_json(const StochasticFit& f) {
    return {{"model", to_string(f.kind)},
            {"a_wh", f.a_wh},
            {"b_cl", f.b_cl},
            {"beta", f.beta},
            {"sigma_a_wh", f.sigma_a_wh},
            {"sigma_b_cl", f.sigma_b_cl},
            {"sigma_beta", f.sigma_beta},
            {"log_likelihood", f.log_likelihood},
            {"n_obs", f.n_obs},
            {"converged", f.converged},
            {"hessian_ok", f.hessian_ok},
            {"iterations", f.iterations}};
}

json truth_json(const ScenarioTruth& t) {
    return {{"scenario", to_string(t.scenario)},
            {"functional", functional_json(t.functional)},
            {"stochastic",
             {{"model", to_string(t.stochastic.kind)},
              {"a_wh", t.stochastic.a_wh},
              {"b_cl", t.stochastic.b_cl},
              {"beta", t.stochastic.beta}}}};
}

json arma_json(const ArmaFit& f) {
    return {{"p", f.p},
            {"q", f.q},
            {"d", f.d},
            {"d_integer", f.d_integer},
            {"d_fraction", f.d_fraction},
            {"phi", f.phi},
            {"psi", f.psi},
            {"sigma2", f.sigma2},
            {"log_likelihood", f.log_likelihood},
            {"bic", f.bic},
            {"fit_error_mm", f.fit_error},
            {"converged", f.converged}};
}

json stable_json(const StableFitResult& s) {
    return {{"alpha", s.params.alpha},
            {"k", s.params.k},
            {"scale", s.params.scale},
            {"location", s.params.location},
            {"log_likelihood", s.log_likelihood},
            {"converged", s.converged}};
}

json distribution_json(const DistributionFit& d) {
    return {{"normal", {{"mean", d.normal.mean}, {"std", d.normal.std}}},
            {"stable", stable_json(d.stable)},
            {"correlations", {{"normal", d.corr_normal}, {"levy", d.corr_levy}}}};
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

} // namespace

std::string report_json(const ClassificationReport& r, const std::optional<ScenarioTruth>& truth) {
    json meta = {{"n_obs", r.n_obs},
                 {"missing_epochs", r.gaps},
                 {"dt_days", r.dt},
                 {"first_epoch", r.first_epoch},
                 {"last_epoch", r.last_epoch},
                 {"header", r.header},
                 {"noise_model", to_string(r.kind)},
                 {"harmonics", r.n_harmonics}};
    json steps = json::array();
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        const auto& w = r.steps[i];
        json s = {{"end_offset_days", w.end_offset_days},
                  {"end_offset_yr", w.end_offset_days / 365.0},
                  {"n_obs", w.n_obs},
                  {"missing_epochs", w.gaps},
                  {"first_epoch", w.first_epoch},
                  {"last_epoch", w.last_epoch},
                  {"ok", w.ok},
                  {"flags", w.flags}};
        if (w.ok || w.stochastic.n_obs > 0) {
            s["functional"] = functional_json(w.functional);
            s["functional"]["sigma"] = w.functional_sigma;
            s["stochastic"] = stochastic_json(w.stochastic);
            s["residual"] = {{"n", w.residual.n},
                             {"std", w.residual.std},
                             {"skewness", w.residual.skewness},
                             {"excess_kurtosis", w.residual.excess_kurtosis}};
        }
        if (i < r.functional_curve.size()) {
            s["functional_pct"] = r.functional_curve[i];
            s["stochastic_pct"] = r.stochastic_curve[i];
            s["functional_param_pct"] = r.functional_param_curves[i];
            s["stochastic_param_pct"] = r.stochastic_param_curves[i];
        }
        if (w.distribution) s["distribution"] = distribution_json(*w.distribution);
        if (w.memory)
            s["memory_model"] = {{"arma", arma_json(w.memory->arma)},
                                 {"farima", arma_json(w.memory->farima)},
                                 {"winner", w.memory->winner}};
        steps.push_back(std::move(s));
    }

    json j;
    j["series_meta"] = meta;
    j["steps"] = steps;
    j["variations"] = {{"functional_pct", optional_number(r.functional_pct)},
                       {"stochastic_pct", optional_number(r.stochastic_pct)},
                       {"functional_parameters", r.functional_names},
                       {"stochastic_parameters", r.stochastic_names},
                       {"rule", "max of functional and stochastic"}};
    const auto& w0 = r.steps.front();
    j["distribution"] = w0.distribution ? distribution_json(*w0.distribution) : json(nullptr);
    if (w0.distribution) j["distribution"]["verdict"] = r.distribution_verdict;
    j["memory_model"] = w0.memory ? json{{"arma", arma_json(w0.memory->arma)},
                                         {"farima", arma_json(w0.memory->farima)},
                                         {"winner", w0.memory->winner}}
                                  : json(nullptr);
    j["levy_class"] = r.levy_class ? json(to_string(*r.levy_class)) : json(nullptr);
    j["heavy_tail"] = r.heavy_tail;
    j["degraded"] = r.degraded;
    j["thresholds"] = {{"gaussian_pct", r.thresholds.gaussian_pct},
                       {"stable_pct", r.thresholds.stable_pct},
                       {"heavy_alpha", r.thresholds.heavy_alpha},
                       {"corr_margin", r.thresholds.corr_margin}};
    j["flags"] = r.flags;
    if (truth) j["truth"] = truth_json(*truth);
    return dump(j);
}

std::string manifest_json(const std::vector<ManifestEntry>& entries, double beta, std::size_t length,
                          std::uint64_t master_seed) {
    json j;
    j["seed"] = master_seed;
    j["beta"] = beta;
    j["length"] = length;
    j["replicates"] = json::array();
    for (const auto& e : entries)
        j["replicates"].push_back({{"file", e.file}, {"seed", e.seed}, {"truth", truth_json(e.truth)}});
    return dump(j);
}

std::string fit_json(const StochasticResult& fit, const TimeSeries& series) {
    json j;
    j["series_meta"] = {{"n_obs", series.size()},
                        {"missing_epochs", series.gap_count()},
                        {"first_epoch", series.first_epoch()},
                        {"last_epoch", series.last_epoch()},
                        {"dt_days", series.dt()}};
    j["functional"] = functional_json(fit.functional);
    std::vector<double> sig;
    for (Eigen::Index i = 0; i < fit.functional_covariance.rows(); ++i)
        sig.push_back(std::sqrt(fit.functional_covariance(i, i)));
    j["functional"]["sigma"] = sig;
    j["stochastic"] = stochastic_json(fit.stochastic);
    return dump(j);
}

std::string ensemble_json(const EnsembleSummary& s) {
    json j = {{"replicates", s.replicates},
              {"classified", s.classified},
              {"class_counts",
               {{"GaussianLevy", s.gaussian}, {"FractionalLevy", s.fractional}, {"StableLevy", s.stable}}},
              {"steps_yr", s.steps_years},
              {"functional_pct_mean", s.functional.mean},
              {"functional_pct_std", s.functional.std},
              {"stochastic_pct_mean", s.stochastic.mean},
              {"stochastic_pct_std", s.stochastic.std},
              {"arma_fit_error_mean", s.arma_error},
              {"farima_fit_error_mean", s.farima_error},
              {"farima_wins", s.farima_wins},
              {"corr_normal_mean", s.corr_normal},
              {"corr_levy_mean", s.corr_levy},
              {"alpha_mean", s.alpha}};
    return dump(j);
}

namespace {

json parse_report(const std::string& text) {
    try {
        auto j = json::parse(text);
        if (!j.is_object() || !j.contains("steps") || !j["steps"].is_array())
            throw ParseError(0, "report has no steps array");
        return j;
    } catch (const json::parse_error& e) {
        throw ParseError(0, std::string("malformed report JSON: ") + e.what());
    }
}

std::string num(const json& v) {
    if (!v.is_number()) return "";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v.get<double>());
    return std::string(buf, p);
}

} // namespace

std::string report_curves_csv(const std::string& text) {
    const auto j = parse_report(text);
    std::ostringstream os;
    os << "step_offset_yr,functional_pct_mean,functional_pct_std,stochastic_pct_mean,stochastic_pct_std\n";
    for (const auto& s : j["steps"])
        os << num(s.value("end_offset_yr", json())) << ',' << num(s.value("functional_pct", json())) << ",0,"
           << num(s.value("stochastic_pct", json())) << ",0\n";
    return os.str();
}

std::string report_parameter_curves_csv(const std::string& text) {
    const auto j = parse_report(text);
    std::ostringstream os;
    os << "step_offset_yr,model,parameter,pct\n";
    const auto& var = j.value("variations", json::object());
    const auto fnames = var.value("functional_parameters", json::array());
    const auto snames = var.value("stochastic_parameters", json::array());
    for (const auto& s : j["steps"]) {
        const auto yr = num(s.value("end_offset_yr", json()));
        const auto fp = s.value("functional_param_pct", json::array());
        const auto sp = s.value("stochastic_param_pct", json::array());
        for (std::size_t i = 0; i < fp.size() && i < fnames.size(); ++i)
            os << yr << ",functional," << fnames[i].get<std::string>() << ',' << num(fp[i]) << '\n';
        for (std::size_t i = 0; i < sp.size() && i < snames.size(); ++i)
            os << yr << ",stochastic," << snames[i].get<std::string>() << ',' << num(sp[i]) << '\n';
    }
    return os.str();
}

std::string report_summary(const std::string& text) {
    const auto j = parse_report(text);
    std::ostringstream os;
    const auto& meta = j.value("series_meta", json::object());
    os << "epochs: " << meta.value("n_obs", 0) << " (missing " << meta.value("missing_epochs", 0) << ")\n";
    const auto& var = j.value("variations", json::object());
    os << "functional variation: " << num(var.value("functional_pct", json())) << " %\n";
    os << "stochastic variation: " << num(var.value("stochastic_pct", json())) << " %\n";
    if (j.contains("distribution") && j["distribution"].is_object()) {
        const auto& d = j["distribution"];
        os << "stable alpha: " << num(d["stable"]["alpha"]) << ", corr normal " << num(d["correlations"]["normal"])
           << ", corr levy " << num(d["correlations"]["levy"]) << '\n';
    }
    if (j.contains("memory_model") && j["memory_model"].is_object())
        os << "memory model: " << j["memory_model"].value("winner", std::string("?")) << '\n';
    const auto cls = j.value("levy_class", json());
    os << "levy class: " << (cls.is_string() ? cls.get<std::string>() : std::string("undetermined")) << '\n';
    for (const auto& f : j.value("flags", json::array())) os << "flag: " << f.get<std::string>() << '\n';
    return os.str();
}

} // namespace levyts
