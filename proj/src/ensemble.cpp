#include "levyts/ensemble.hpp"

#include "levyts/error.hpp"
#include "levyts/parallel.hpp"
#include "levyts/stats.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace levyts {

CurveStats curve_stats(const std::vector<std::vector<double>>& curves) {
    CurveStats out;
    std::size_t width = 0;
    for (const auto& c : curves) width = std::max(width, c.size());
    for (std::size_t s = 0; s < width; ++s) {
        std::vector<double> vals;
        for (const auto& c : curves)
            if (s < c.size() && std::isfinite(c[s])) vals.push_back(c[s]);
        out.mean.push_back(vals.empty() ? std::nan("") : stats::mean(vals));
        out.std.push_back(vals.size() < 2 ? 0.0 : stats::stddev(vals));
    }
    return out;
}

std::vector<ReplicateResult> run_ensemble(const EnsembleConfig& config) {
    if (config.replicates < 1) throw ValidationError("replicate count must be at least 1");
    config.nstep.validate();
    std::vector<ReplicateResult> out(config.replicates);
    NStepConfig inner = config.nstep;
    inner.jobs = 1;
    parallel_for(config.replicates, config.jobs, [&](std::size_t i) {
        auto& r = out[i];
        r.index = i;
        r.seed = stats::derive_seed(config.seed, i);
        auto sample = gen_scenario(config.scenario, config.beta, config.length, r.seed, config.nstep.kind,
                                   config.nstep.functional.n_harmonics);
        r.truth = sample.truth;
        r.report = run_nstep(sample.series, inner);
    });
    return out;
}

EnsembleSummary summarize(const std::vector<ClassificationReport>& reports, const std::vector<double>& steps_years) {
    EnsembleSummary s;
    s.steps_years = steps_years;
    s.replicates = reports.size();
    std::vector<std::vector<double>> fc, sc;
    std::vector<double> arma, farima, cn, cl, al;
    for (const auto& r : reports) {
        fc.push_back(r.functional_curve);
        sc.push_back(r.stochastic_curve);
        if (r.levy_class) {
            ++s.classified;
            if (*r.levy_class == LevyClass::GaussianLevy) ++s.gaussian;
            if (*r.levy_class == LevyClass::FractionalLevy) ++s.fractional;
            if (*r.levy_class == LevyClass::StableLevy) ++s.stable;
        }
        if (r.steps.empty()) continue;
        const auto& w = r.steps.front();
        if (w.memory) {
            arma.push_back(w.memory->arma.fit_error);
            farima.push_back(w.memory->farima.fit_error);
            if (w.memory->winner == "FARIMA") ++s.farima_wins;
        }
        if (w.distribution) {
            cn.push_back(w.distribution->corr_normal);
            cl.push_back(w.distribution->corr_levy);
            al.push_back(w.distribution->stable.params.alpha);
        }
    }
    s.functional = curve_stats(fc);
    s.stochastic = curve_stats(sc);
    auto avg = [](const std::vector<double>& v) { return v.empty() ? std::nan("") : stats::mean(v); };
    s.arma_error = avg(arma);
    s.farima_error = avg(farima);
    s.corr_normal = avg(cn);
    s.corr_levy = avg(cl);
    s.alpha = avg(al);
    return s;
}

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

} // namespace

std::string curves_csv(const EnsembleSummary& s) {
    std::ostringstream os;
    os << "step_offset_yr,functional_pct_mean,functional_pct_std,stochastic_pct_mean,stochastic_pct_std\n";
    for (std::size_t i = 0; i < s.steps_years.size(); ++i) {
        auto at = [i](const std::vector<double>& v) { return i < v.size() ? v[i] : std::nan(""); };
        os << num(s.steps_years[i]) << ',' << num(at(s.functional.mean)) << ',' << num(at(s.functional.std)) << ','
           << num(at(s.stochastic.mean)) << ',' << num(at(s.stochastic.std)) << '\n';
    }
    return os.str();
}

} // namespace levyts
