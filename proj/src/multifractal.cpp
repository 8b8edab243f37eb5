#include "dicke/multifractal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "dicke/errors.hpp"

namespace dicke {

double ipr_q(std::span<const double> coeffs_sq, double q) {
    if (!(q > 0.0)) throw std::invalid_argument("ipr_q: q must be positive");
    double sum = 0.0;
    if (q == 1.0) {
        for (double c : coeffs_sq) sum += c;
        return sum;
    }
    for (double c : coeffs_sq) {
        if (c > 0.0) sum += std::pow(c, q);
    }
    return sum;
}

double ipr_q(const EigenExpansion& expansion, double q) { return ipr_q(expansion.coeffs_sq, q); }

double effective_dim(double j) {
    if (!(j > 0.0)) throw std::invalid_argument("effective_dim: j must be positive");
    return std::pow(j, 1.5);
}

std::vector<double> make_q_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(lo > 0.0) || hi < lo) throw ConfigError("invalid q grid");
    std::vector<double> grid;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) {
        // Round to the step's decimal resolution so q = 1 is hit exactly.
        const double q = lo + step * static_cast<double>(i);
        grid.push_back(std::round(q * 1e10) / 1e10);
    }
    return grid;
}

IPRSeries::IPRSeries(std::vector<double> q, std::vector<double> j)
    : q_grid(std::move(q)), j_list(std::move(j)) {
    if (!std::is_sorted(j_list.begin(), j_list.end())) throw std::invalid_argument("IPRSeries: j_list must ascend");
    ipr.assign(q_grid.size(), std::vector<double>(j_list.size(), 0.0));
    converged.assign(q_grid.size(), std::vector<std::uint8_t>(j_list.size(), 0));
}

std::vector<double> IPRSeries::aleph_eff() const {
    std::vector<double> out;
    out.reserve(j_list.size());
    for (double j : j_list) out.push_back(effective_dim(j));
    return out;
}

void IPRSeries::set_column(std::size_t j_index, const EigenExpansion& expansion) {
    for (std::size_t i = 0; i < q_grid.size(); ++i) {
        ipr[i][j_index] = ipr_q(expansion, q_grid[i]);
        converged[i][j_index] = expansion.converged ? 1 : 0;
    }
}

LinearRegression linear_regression(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw InsufficientDataError("linear_regression: need two or more points");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw InsufficientDataError("linear_regression: abscissae are identical");
    LinearRegression r;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - r.intercept - r.slope * x[i];
        ssr += e * e;
    }
    r.slope_stderr = x.size() > 2 ? std::sqrt(ssr / (n - 2.0) / sxx) : 0.0;
    r.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    return r;
}

MassExponentCurve mass_exponents(const IPRSeries& series, const MassExponentOptions& opts) {
    std::vector<std::size_t> retained;
    for (std::size_t k = 0; k < series.j_list.size(); ++k) {
        if (series.j_list[k] >= opts.j_exclude_below - 1e-12) retained.push_back(k);
    }
    if (retained.size() < opts.min_points) {
        throw InsufficientDataError("mass_exponents: " + std::to_string(retained.size()) +
                                    " j values retained, need " + std::to_string(opts.min_points));
    }
    const auto aleph = series.aleph_eff();

    MassExponentCurve curve;
    curve.q_grid = series.q_grid;
    curve.tau.resize(series.q_grid.size());
    curve.stderr_.resize(series.q_grid.size());
    for (std::size_t i = 0; i < series.q_grid.size(); ++i) {
        std::vector<double> lx, ly;
        for (auto k : retained) {
            if (!series.converged[i][k] || !(series.ipr[i][k] > 0.0)) continue;
            lx.push_back(std::log(aleph[k]));
            ly.push_back(std::log(series.ipr[i][k]));
        }
        if (lx.empty()) {
            throw InsufficientDataError("mass_exponents: every retained cell at q=" +
                                        std::to_string(series.q_grid[i]) + " is unconverged");
        }
        if (lx.size() < opts.min_points) {
            throw InsufficientDataError("mass_exponents: only " + std::to_string(lx.size()) +
                                        " converged j values at q=" + std::to_string(series.q_grid[i]));
        }
        const auto fit = linear_regression(lx, ly);
        curve.tau[i] = -fit.slope;
        curve.stderr_[i] = fit.slope_stderr;
    }
    apply_curvature_scan(curve, opts.curvature_slack);
    return curve;
}

std::pair<double, double> curvature_scan(std::span<const double> q, std::span<const double> tau, double slack) {
    const std::size_t n = q.size();
    if (n != tau.size()) throw std::invalid_argument("curvature_scan: size mismatch");
    if (n < 3) throw InsufficientDataError("curvature_scan: need at least three q points");

    std::size_t centre = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(q[i] - 1.0) < std::abs(q[centre] - 1.0)) centre = i;
    }
    auto bad_curvature = [&](std::size_t i) {
        if (i == 0 || i + 1 >= n) return false;
        const double h1 = q[i] - q[i - 1];
        const double h2 = q[i + 1] - q[i];
        const double d2 = 2.0 * ((tau[i + 1] - tau[i]) / h2 - (tau[i] - tau[i - 1]) / h1) / (h1 + h2);
        return d2 > slack;
    };
    constexpr double kMonotoneSlack = 1e-12;

    std::size_t hi = centre;
    while (hi + 1 < n && !bad_curvature(hi + 1) && tau[hi + 1] >= tau[hi] - kMonotoneSlack) ++hi;
    std::size_t lo = centre;
    while (lo > 0 && !bad_curvature(lo - 1) && tau[lo - 1] <= tau[lo] + kMonotoneSlack) --lo;
    return {q[lo], q[hi]};
}

void apply_curvature_scan(MassExponentCurve& curve, double slack) {
    curve.trusted_range = curvature_scan(curve.q_grid, curve.tau, slack);
    curve.trusted.assign(curve.q_grid.size(), 0);
    for (std::size_t i = 0; i < curve.q_grid.size(); ++i) {
        const double q = curve.q_grid[i];
        curve.trusted[i] = (q >= curve.trusted_range.first && q <= curve.trusted_range.second) ? 1 : 0;
    }
}

std::string to_string(FitModel m) {
    switch (m) {
        case FitModel::linear: return "linear";
        case FitModel::parabolic: return "parabolic";
        case FitModel::sqrt: return "sqrt";
    }
    return "linear";
}

std::string to_string(StateClass c) {
    switch (c) {
        case StateClass::ergodic: return "ergodic";
        case StateClass::regular: return "regular";
        case StateClass::localized: return "localized";
        case StateClass::intermediate: return "intermediate";
        case StateClass::discard: return "discard";
    }
    return "intermediate";
}

FitModel fit_model_from_string(const std::string& s) {
    if (s == "linear") return FitModel::linear;
    if (s == "parabolic" || s == "quadratic") return FitModel::parabolic;
    if (s == "sqrt") return FitModel::sqrt;
    throw ConfigError("unknown fit model '" + s + "'");
}

StateClass classify(FitModel model, double d1, double d2, const ClassifyThresholds& t) {
    // Positive curvature of tau is unphysical.
    if (model == FitModel::parabolic && d2 > t.positive) return StateClass::discard;
    if (model == FitModel::sqrt && -d2 > t.positive) return StateClass::discard;
    if (std::abs(d1 - 1.0) <= t.band) return StateClass::ergodic;
    if (std::abs(d1 - 1.0 / 3.0) <= t.band) return StateClass::regular;
    if (d1 <= t.localized) return StateClass::localized;
    return StateClass::intermediate;
}

FitReport fit_tau_points(std::span<const double> q, std::span<const double> tau, FitModel model,
                         const ClassifyThresholds& thresholds) {
    const std::size_t n_coef = model == FitModel::linear ? 2 : 3;
    if (q.size() != tau.size()) throw std::invalid_argument("fit_tau: size mismatch");
    if (q.size() < n_coef) {
        throw InsufficientDataError("fit_tau: " + std::to_string(q.size()) + " q points for " +
                                    std::to_string(n_coef) + " coefficients");
    }
    const auto rows = static_cast<Eigen::Index>(q.size());
    Eigen::MatrixXd a(rows, static_cast<Eigen::Index>(n_coef));
    Eigen::VectorXd b(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double qi = q[static_cast<std::size_t>(i)];
        a(i, 0) = 1.0;
        a(i, 1) = qi - 1.0;
        if (model == FitModel::parabolic) a(i, 2) = qi * qi;
        if (model == FitModel::sqrt) a(i, 2) = std::sqrt(qi);
        b(i) = tau[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
    FitReport r;
    r.model = model;
    r.d0 = coef(0);
    r.d1 = coef(1);
    r.d2 = n_coef == 3 ? coef(2) : 0.0;
    r.q_range = {*std::min_element(q.begin(), q.end()), *std::max_element(q.begin(), q.end())};
    r.n_points = q.size();
    r.rms = std::sqrt((a * coef - b).squaredNorm() / static_cast<double>(rows));
    r.classification = classify(model, r.d1, r.d2, thresholds);
    return r;
}

FitReport fit_tau(const MassExponentCurve& curve, std::pair<double, double> q_range, FitModel model,
                  const ClassifyThresholds& thresholds) {
    constexpr double kEdge = 1e-9;
    std::vector<double> q, tau;
    for (std::size_t i = 0; i < curve.q_grid.size(); ++i) {
        const double qi = curve.q_grid[i];
        if (qi < q_range.first - kEdge || qi > q_range.second + kEdge) continue;
        if (!curve.trusted.empty() && !curve.trusted[i]) continue;
        q.push_back(qi);
        tau.push_back(curve.tau[i]);
    }
    return fit_tau_points(q, tau, model, thresholds);
}

AnomalousExponent anomalous_exponent(const MassExponentCurve& curve, double d_linear, bool fit_weak) {
    AnomalousExponent out;
    for (std::size_t i = 0; i < curve.q_grid.size(); ++i) {
        if (!curve.trusted.empty() && !curve.trusted[i]) continue;
        out.q.push_back(curve.q_grid[i]);
        out.delta.push_back(curve.tau[i] - d_linear * (curve.q_grid[i] - 1.0));
    }
    if (fit_weak) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < out.q.size(); ++i) {
            const double g = out.q[i] * (1.0 - out.q[i]);
            num += out.delta[i] * g;
            den += g * g;
        }
        if (den > 0.0) out.weak_delta = num / den;
    }
    double worst = -1.0;
    for (std::size_t i = 0; i < out.q.size(); ++i) {
        for (std::size_t k = 0; k < out.q.size(); ++k) {
            if (std::abs(out.q[k] - (1.0 - out.q[i])) < 1e-9) {
                worst = std::max(worst, std::abs(out.delta[i] - out.delta[k]));
            }
        }
    }
    if (worst >= 0.0) out.reciprocity_residual = worst;
    return out;
}

double PDoSHistogram::total() const {
    double s = 0.0;
    for (double m : mass) s += m;
    return s;
}

PDoSHistogram pdos_q(const EigenExpansion& expansion, double q, std::size_t n_bins) {
    if (!(q > 0.0)) throw std::invalid_argument("pdos_q: q must be positive");
    if (n_bins == 0) throw std::invalid_argument("pdos_q: need at least one bin");
    const auto& eps = expansion.scaled_energies;
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        if (!expansion.level_converged.empty() && !expansion.level_converged[k]) continue;
        lo = any ? std::min(lo, eps[k]) : eps[k];
        hi = any ? std::max(hi, eps[k]) : eps[k];
        any = true;
    }
    if (!any) throw std::invalid_argument("pdos_q: expansion has no converged levels");
    if (hi <= lo) hi = lo + 1.0;

    PDoSHistogram h;
    h.q = q;
    h.mean_energy = expansion.norm > 0.0 ? expansion.mean_energy / expansion.norm : 0.0;
    h.mass.assign(n_bins, 0.0);
    h.bin_edges.resize(n_bins + 1);
    const double width = (hi - lo) / static_cast<double>(n_bins);
    for (std::size_t b = 0; b <= n_bins; ++b) h.bin_edges[b] = lo + width * static_cast<double>(b);
    h.bin_edges.back() = hi;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        if (eps[k] < lo || eps[k] > hi) continue;
        const double c = expansion.coeffs_sq[k];
        if (!(c > 0.0)) continue;
        auto b = static_cast<std::size_t>((eps[k] - lo) / width);
        b = std::min(b, n_bins - 1);
        h.mass[b] += q == 1.0 ? c : std::pow(c, q);
    }
    return h;
}

}  // namespace dicke
