#include "dicke/oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace dicke {

double weight_moment(WeightDistribution d, double q) {
    // Exp(1): E[r^q] = Gamma(q + 1)
    return d == WeightDistribution::exponential ? std::tgamma(q + 1.0) : 1.0;
}

double gaussian_ipr_closed_form(double q, double sigma_nu, double moment) {
    return std::sqrt(std::pow(2.0 * std::numbers::pi, 1.0 - q) / q) * moment * std::pow(sigma_nu, 1.0 - q);
}

double SyntheticState::predicted_ipr(double q) const {
    return gaussian_ipr_closed_form(q, sigma * nu, weight_moment(weights, q));
}

namespace {

// Gaussian weights on E_k = mean + (k - K) spacing, normalized to one.
EigenExpansion gaussian_picket(double j, double mean, double sigma, double spacing, double span,
                               const std::vector<double>* factors) {
    const auto half = static_cast<long>(std::ceil(span * sigma / spacing));
    EigenExpansion e;
    e.two_j = static_cast<int>(std::lround(2.0 * j));
    e.parity = Parity::both;
    const std::size_t n = static_cast<std::size_t>(2 * half + 1);
    e.coeffs_sq.resize(n);
    e.scaled_energies.resize(n);
    e.level_converged.assign(n, 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double energy = mean + (static_cast<double>(i) - static_cast<double>(half)) * spacing;
        const double d = (energy - mean) / sigma;
        double w = std::exp(-0.5 * d * d);
        if (factors) w *= (*factors)[i];
        e.coeffs_sq[i] = w;
        e.scaled_energies[i] = energy / j;
        sum += w;
    }
    for (std::size_t i = 0; i < n; ++i) {
        e.coeffs_sq[i] /= sum;
        e.norm += e.coeffs_sq[i];
        e.mean_energy += e.coeffs_sq[i] * e.scaled_energies[i];
    }
    e.converged = true;
    return e;
}

}  // namespace

SyntheticState synth_random_gaussian(double j, const RandomGaussianOracle& cfg) {
    if (!(j > 0.0)) throw std::invalid_argument("synth_random_gaussian: j must be positive");
    SyntheticState s;
    s.sigma = cfg.sigma0 * std::sqrt(j);
    s.nu = cfg.nu0 * j;
    s.weights = cfg.weights;
    const double spacing = 1.0 / s.nu;
    const auto half = static_cast<long>(std::ceil(cfg.span_sigmas * s.sigma / spacing));
    std::vector<double> factors(static_cast<std::size_t>(2 * half + 1), 1.0);
    if (cfg.weights == WeightDistribution::exponential) {
        // Seed mixes in j so every size gets an independent draw.
        std::seed_seq seq{cfg.seed, static_cast<std::uint64_t>(std::llround(2.0 * j))};
        std::mt19937_64 rng(seq);
        std::exponential_distribution<double> dist(1.0);
        for (auto& f : factors) f = dist(rng);
    }
    s.expansion = gaussian_picket(j, cfg.mean_energy, s.sigma, spacing, cfg.span_sigmas, &factors);
    return s;
}

SyntheticState synth_sequence_state(double j, const SequenceOracle& cfg) {
    if (!(j > 0.0)) throw std::invalid_argument("synth_sequence_state: j must be positive");
    if (!(cfg.omega_cl > 0.0)) throw std::invalid_argument("synth_sequence_state: omega_cl must be positive");
    SyntheticState s;
    s.sigma = cfg.sigma0 * std::sqrt(j);
    s.nu = 1.0 / cfg.omega_cl;
    s.weights = WeightDistribution::unit;
    s.expansion = gaussian_picket(j, cfg.mean_energy, s.sigma, cfg.omega_cl, cfg.span_sigmas, nullptr);
    return s;
}

}  // namespace dicke
