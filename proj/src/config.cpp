#include "dicke/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "dicke/errors.hpp"

namespace dicke {

using nlohmann::json;

ModelParams ExperimentConfig::model(double j, int cutoff) const {
    return make_params(omega, omega0, coupling, j, cutoff);
}

int ExperimentConfig::n_max_for(double eps0) const {
    if (n_max > 0) return n_max;
    return eps0 <= -1.1 + 1e-12 ? 120 : 160;
}

std::vector<double> ExperimentConfig::q_grid() const { return make_q_grid(q_lo, q_hi, q_step); }

void ExperimentConfig::validate() const {
    make_params(omega, omega0, coupling, 1.0, 1);
    if (j_list.empty()) throw ConfigError("j_list is empty");
    if (!std::is_sorted(j_list.begin(), j_list.end()) ||
        std::adjacent_find(j_list.begin(), j_list.end()) != j_list.end()) {
        throw ConfigError("j_list must be strictly ascending");
    }
    for (double j : j_list) make_params(omega, omega0, coupling, j, 1);
    if (n_max < 0 || n_max_alt < 0) throw ConfigError("cutoffs must be non-negative");
    ModelParams probe = make_params(omega, omega0, coupling, 1.0, 1);
    const double floor = classical_ground_energy(probe);
    for (double e : energies) {
        if (e < floor) throw ConfigError("energy " + std::to_string(e) + " lies below the classical minimum");
    }
    for (const auto& p : points) {
        if (p.eps0 < floor) throw ConfigError("point energy below the classical minimum");
        if (std::abs(p.jz) > 1.0) throw ConfigError("point jz outside [-1, 1]");
    }
    if (!(q_lo > 0.0) || !(q_step > 0.0) || q_hi < q_lo) throw ConfigError("invalid q grid");
    if (fit_high.first > fit_high.second || fit_low.first > fit_low.second) throw ConfigError("invalid fit range");
    if (threads == 0) throw ConfigError("threads must be at least 1");
    if (!(tail_budget >= 0.0)) throw ConfigError("tail_budget must be non-negative");
    if (pdos_bins == 0) throw ConfigError("pdos bins must be positive");
    for (double q : pdos_q) {
        if (!(q > 0.0)) throw ConfigError("pdos q values must be positive");
    }
    if (oracle_j_list.size() < 2) throw ConfigError("oracle j list needs two or more sizes");
}

namespace {

std::pair<double, double> range_from(const json& j, std::pair<double, double> fallback) {
    if (j.is_null()) return fallback;
    if (!j.is_array() || j.size() != 2) throw ConfigError("fit range must be a two-element array");
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

std::string weights_name(WeightDistribution w) { return w == WeightDistribution::unit ? "unit" : "exponential"; }

WeightDistribution weights_from(const std::string& s) {
    if (s == "unit") return WeightDistribution::unit;
    if (s == "exponential") return WeightDistribution::exponential;
    throw ConfigError("unknown weight distribution '" + s + "'");
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    try {
        if (j.contains("model")) {
            const auto& m = j.at("model");
            c.omega = m.value("omega", c.omega);
            c.omega0 = m.value("omega0", c.omega0);
            c.coupling = m.value("coupling", c.coupling);
        }
        c.j_list = j.value("j_list", c.j_list);
        c.n_max = j.value("n_max", c.n_max);
        c.n_max_alt = j.value("n_max_alt", c.n_max_alt);
        c.energies = j.value("energies", c.energies);
        if (j.contains("jz_grid")) {
            const auto& g = j.at("jz_grid");
            c.jz_points = g.value("count", c.jz_points);
            c.jz_values = g.value("values", c.jz_values);
        }
        if (j.contains("points")) {
            for (const auto& p : j.at("points")) {
                SurfacePoint sp;
                sp.eps0 = p.at("eps0").get<double>();
                sp.jz = p.at("jz").get<double>();
                sp.phi = p.value("phi", 0.0);
                sp.label = p.value("label", std::string{});
                c.points.push_back(sp);
            }
        }
        if (j.contains("q_grid")) {
            const auto& q = j.at("q_grid");
            c.q_lo = q.value("lo", c.q_lo);
            c.q_hi = q.value("hi", c.q_hi);
            c.q_step = q.value("step", c.q_step);
        }
        if (j.contains("fit_ranges")) {
            const auto& f = j.at("fit_ranges");
            c.fit_high = range_from(f.value("high", json()), c.fit_high);
            c.fit_low = range_from(f.value("low", json()), c.fit_low);
        }
        c.mass.j_exclude_below = j.value("j_exclude_below", c.mass.j_exclude_below);
        c.mass.min_points = j.value("min_j_points", c.mass.min_points);
        if (j.contains("thresholds")) {
            const auto& t = j.at("thresholds");
            c.mass.curvature_slack = t.value("curvature", c.mass.curvature_slack);
            c.thresholds.positive = t.value("positive_d2", c.thresholds.positive);
            c.thresholds.band = t.value("class_band", c.thresholds.band);
            c.thresholds.localized = t.value("localized", c.thresholds.localized);
        }
        if (j.contains("convergence")) {
            const auto& v = j.at("convergence");
            c.convergence.probe_delta = v.value("probe_delta", c.convergence.probe_delta);
            c.convergence.tol = v.value("tol", c.convergence.tol);
            c.tail_budget = v.value("tail_budget", c.tail_budget);
            c.exclude_unconverged = v.value("exclude_unconverged", c.exclude_unconverged);
        }
        c.max_block_dim = j.value("max_block_dim", c.max_block_dim);
        if (j.contains("pdos")) {
            c.pdos_q = j.at("pdos").value("q", c.pdos_q);
            c.pdos_bins = j.at("pdos").value("bins", c.pdos_bins);
        }
        if (j.contains("poincare")) {
            const auto& p = j.at("poincare");
            c.t_max = p.value("t_max", c.t_max);
            c.integrator.step_tol = p.value("step_tol", c.integrator.step_tol);
            c.section_bins = p.value("bins", c.section_bins);
        }
        if (j.contains("oracle")) {
            const auto& o = j.at("oracle");
            c.oracle_j_list = o.value("j_list", c.oracle_j_list);
            c.random_oracle.sigma0 = o.value("sigma0", c.random_oracle.sigma0);
            c.random_oracle.nu0 = o.value("nu0", c.random_oracle.nu0);
            c.random_oracle.weights = weights_from(o.value("weights", weights_name(c.random_oracle.weights)));
            c.sequence_oracle.sigma0 = o.value("sequence_sigma0", c.sequence_oracle.sigma0);
            c.sequence_oracle.omega_cl = o.value("omega_cl", c.sequence_oracle.omega_cl);
        }
        c.sweep_visible_tol = j.value("sweep_visible_tol", c.sweep_visible_tol);
        if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("cache_dir")) c.cache_dir = j.at("cache_dir").get<std::string>();
        c.seed = j.value("seed", c.seed);
        c.threads = j.value("threads", c.threads);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    }
    c.random_oracle.seed = c.seed;
    c.validate();
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["model"] = {{"omega", c.omega}, {"omega0", c.omega0}, {"coupling", c.coupling}};
    j["j_list"] = c.j_list;
    j["n_max"] = c.n_max;
    j["n_max_alt"] = c.n_max_alt;
    j["energies"] = c.energies;
    j["jz_grid"] = {{"count", c.jz_points}, {"values", c.jz_values}};
    json pts = json::array();
    for (const auto& p : c.points) pts.push_back({{"eps0", p.eps0}, {"jz", p.jz}, {"phi", p.phi}, {"label", p.label}});
    j["points"] = pts;
    j["q_grid"] = {{"lo", c.q_lo}, {"hi", c.q_hi}, {"step", c.q_step}};
    j["fit_ranges"] = {{"high", {c.fit_high.first, c.fit_high.second}}, {"low", {c.fit_low.first, c.fit_low.second}}};
    j["j_exclude_below"] = c.mass.j_exclude_below;
    j["min_j_points"] = c.mass.min_points;
    j["thresholds"] = {{"curvature", c.mass.curvature_slack},
                       {"positive_d2", c.thresholds.positive},
                       {"class_band", c.thresholds.band},
                       {"localized", c.thresholds.localized}};
    j["convergence"] = {{"probe_delta", c.convergence.probe_delta},
                        {"tol", c.convergence.tol},
                        {"tail_budget", c.tail_budget},
                        {"exclude_unconverged", c.exclude_unconverged}};
    j["max_block_dim"] = c.max_block_dim;
    j["pdos"] = {{"q", c.pdos_q}, {"bins", c.pdos_bins}};
    j["poincare"] = {{"t_max", c.t_max}, {"step_tol", c.integrator.step_tol}, {"bins", c.section_bins}};
    j["oracle"] = {{"j_list", c.oracle_j_list},
                   {"sigma0", c.random_oracle.sigma0},
                   {"nu0", c.random_oracle.nu0},
                   {"weights", weights_name(c.random_oracle.weights)},
                   {"sequence_sigma0", c.sequence_oracle.sigma0},
                   {"omega_cl", c.sequence_oracle.omega_cl}};
    j["sweep_visible_tol"] = c.sweep_visible_tol;
    j["seed"] = c.seed;
    // Output location, cache and thread count do not change results and stay out of the digest.
    return j;
}

std::string ExperimentConfig::digest() const { return sha256(config_to_json(*this).dump()).hex(); }

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

}  // namespace dicke
