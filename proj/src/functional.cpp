#include "levyts/functional.hpp"

#include "levyts/error.hpp"

#include <cmath>
#include <numbers>

namespace levyts {

std::vector<double> FunctionalParams::as_vector() const {
    std::vector<double> v{trend, intercept};
    for (std::size_t j = 0; j < cos_amp.size(); ++j) {
        v.push_back(cos_amp[j]);
        v.push_back(sin_amp[j]);
    }
    v.insert(v.end(), offset_amp.begin(), offset_amp.end());
    return v;
}

std::vector<std::string> FunctionalParams::names() const {
    std::vector<std::string> out{"trend", "intercept"};
    for (std::size_t j = 1; j <= cos_amp.size(); ++j) {
        out.push_back("cos" + std::to_string(j));
        out.push_back("sin" + std::to_string(j));
    }
    for (std::size_t k = 1; k <= offset_amp.size(); ++k) out.push_back("offset" + std::to_string(k));
    return out;
}

FunctionalParams FunctionalParams::from_vector(const Eigen::VectorXd& v, int n_harmonics,
                                               std::vector<double> offset_epochs) {
    const auto nh = static_cast<std::size_t>(n_harmonics);
    if (static_cast<std::size_t>(v.size()) != 2 + 2 * nh + offset_epochs.size())
        throw ValidationError("parameter vector length does not match the model layout");
    FunctionalParams p;
    p.trend = v[0];
    p.intercept = v[1];
    for (std::size_t j = 0; j < nh; ++j) {
        p.cos_amp.push_back(v[static_cast<Eigen::Index>(2 + 2 * j)]);
        p.sin_amp.push_back(v[static_cast<Eigen::Index>(3 + 2 * j)]);
    }
    for (std::size_t k = 0; k < offset_epochs.size(); ++k)
        p.offset_amp.push_back(v[static_cast<Eigen::Index>(2 + 2 * nh + k)]);
    p.offset_epochs = std::move(offset_epochs);
    return p;
}

double FunctionalParams::evaluate(double epoch, double origin, double period_days) const {
    const double dt = epoch - origin;
    double y = trend * dt / kDaysPerYear + intercept;
    const double w = 2.0 * std::numbers::pi / period_days;
    for (std::size_t j = 0; j < cos_amp.size(); ++j) {
        const double arg = w * static_cast<double>(j + 1) * dt;
        y += cos_amp[j] * std::cos(arg) + sin_amp[j] * std::sin(arg);
    }
    for (std::size_t k = 0; k < offset_amp.size(); ++k)
        if (epoch >= offset_epochs[k]) y += offset_amp[k];
    return y;
}

DesignMatrix build_design(std::span<const double> epochs, double origin, int n_harmonics,
                          const OffsetCatalog& offsets, double period_days) {
    if (n_harmonics < 1 || n_harmonics > 7) throw DomainError("harmonic count must be in [1, 7]");
    if (epochs.empty()) throw DomainError("no epochs");
    for (double t : offsets.epochs)
        if (!(t > epochs.front() && t <= epochs.back()))
            throw DomainError("offset epoch " + std::to_string(t) + " lies outside the series span");

    const auto nh = static_cast<std::size_t>(n_harmonics);
    const std::size_t n = epochs.size();
    const std::size_t p = 2 + 2 * nh + offsets.size();
    DesignMatrix d;
    d.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    d.offset_epochs = offsets.epochs;
    const double w = 2.0 * std::numbers::pi / period_days;
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        const double dt = epochs[i] - origin;
        d.matrix(r, 0) = dt / kDaysPerYear;
        d.matrix(r, 1) = 1.0;
        for (std::size_t j = 0; j < nh; ++j) {
            const double arg = w * static_cast<double>(j + 1) * dt;
            d.matrix(r, static_cast<Eigen::Index>(2 + 2 * j)) = std::cos(arg);
            d.matrix(r, static_cast<Eigen::Index>(3 + 2 * j)) = std::sin(arg);
        }
        for (std::size_t k = 0; k < offsets.size(); ++k)
            d.matrix(r, static_cast<Eigen::Index>(2 + 2 * nh + k)) = epochs[i] >= offsets.epochs[k] ? 1.0 : 0.0;
    }
    d.names = {"trend", "intercept"};
    for (std::size_t j = 1; j <= nh; ++j) {
        d.names.push_back("cos" + std::to_string(j));
        d.names.push_back("sin" + std::to_string(j));
    }
    for (std::size_t k = 1; k <= offsets.size(); ++k) d.names.push_back("offset" + std::to_string(k));
    return d;
}

namespace {

[[noreturn]] void report_collinear(const Eigen::MatrixXd& a, const std::vector<std::string>& names) {
    Eigen::MatrixXd scaled = a;
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        const double nrm = a.col(c).norm();
        if (nrm > 0) scaled.col(c) /= nrm;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    std::vector<std::string> involved;
    std::vector<bool> seen(static_cast<std::size_t>(a.cols()), false);
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (sv[k] > 1e-8 * sv[0]) continue;
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            if (std::abs(svd.matrixV()(c, k)) > 1e-6) seen[static_cast<std::size_t>(c)] = true;
    }
    for (std::size_t c = 0; c < seen.size(); ++c)
        if (seen[c]) involved.push_back(c < names.size() ? names[c] : "column" + std::to_string(c));
    std::string msg = "design matrix is rank deficient; collinear columns:";
    for (const auto& s : involved) msg += " " + s;
    throw RankDeficientError(msg, involved);
}

} // namespace

WhitenedSolution solve_whitened(const Eigen::MatrixXd& a, const Eigen::VectorXd& z,
                                const std::vector<std::string>& names) {
    const Eigen::Index p = a.cols();
    if (a.rows() < p) throw RankDeficientError("fewer observations than parameters", names);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) report_collinear(a, names);

    WhitenedSolution out;
    out.theta = qr.solve(z);
    out.whitened_residual = z - a * out.theta;
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd rinv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::MatrixXd permuted = rinv * rinv.transpose();
    const auto& perm = qr.colsPermutation();
    out.normal_inverse = perm * permuted * perm.transpose();
    return out;
}

GlsFit gls_fit(const TimeSeries& ts, const Eigen::MatrixXd& covariance, const FunctionalConfig& config) {
    const auto n = static_cast<Eigen::Index>(ts.size());
    if (covariance.rows() != n || covariance.cols() != n)
        throw ValidationError("covariance size does not match the series");
    const auto epochs = ts.epochs();
    const double origin = ts.first_epoch();
    const auto design = build_design(epochs, origin, config.n_harmonics, config.offsets, config.period_days);

    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success) throw NumericalError("covariance matrix is not positive definite");
    const Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(ts.values().data(), n);
    const Eigen::MatrixXd a = llt.matrixL().solve(design.matrix);
    const Eigen::VectorXd z = llt.matrixL().solve(s);
    const auto sol = solve_whitened(a, z, design.names);

    const Eigen::VectorXd r = s - design.matrix * sol.theta;
    return GlsFit{FunctionalParams::from_vector(sol.theta, config.n_harmonics, design.offset_epochs),
                  ts.with_values(std::vector<double>(r.data(), r.data() + r.size())), sol.normal_inverse};
}

} // namespace levyts
