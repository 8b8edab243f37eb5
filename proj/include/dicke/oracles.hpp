#pragma once

// Synthetic expansions with closed-form IPR scaling:
//
//   random Gaussian   |c_k|^2 ~ r_k exp(-(E_k - E)^2 / 2 sigma^2), level density nu ~ j
//   regular sequence  Gaussian weights on one picket fence of spacing omega_cl
//
// Both give IPR_q = sqrt((2 pi)^{1-q} / q) <r^q> (sigma nu)^{1-q} for large sigma nu.

#include <cstdint>

#include "dicke/coherent.hpp"

namespace dicke {

enum class WeightDistribution { unit, exponential };

struct RandomGaussianOracle {
    double sigma0{1.0};      // sigma = sigma0 sqrt(j), unscaled energy
    double nu0{20.0};        // nu = nu0 j
    double mean_energy{0.0};
    double span_sigmas{12.0};
    WeightDistribution weights{WeightDistribution::exponential};
    std::uint64_t seed{20240501};
};

struct SequenceOracle {
    double sigma0{1.0};      // sigma_c = sigma0 sqrt(j)
    double omega_cl{0.05};   // sequence spacing; nu_c = 1 / omega_cl
    double mean_energy{0.0};
    double span_sigmas{12.0};
};

struct SyntheticState {
    EigenExpansion expansion;
    double sigma{0.0};
    double nu{0.0};
    WeightDistribution weights{WeightDistribution::unit};

    // Closed-form IPR_q for this sigma * nu.
    double predicted_ipr(double q) const;
};

// <r^q> of the weight distribution (unit mean).
double weight_moment(WeightDistribution d, double q);

// Closed form sqrt((2 pi)^{1-q} / q) moment (sigma nu)^{1-q}.
double gaussian_ipr_closed_form(double q, double sigma_nu, double moment = 1.0);

SyntheticState synth_random_gaussian(double j, const RandomGaussianOracle& cfg = {});
SyntheticState synth_sequence_state(double j, const SequenceOracle& cfg = {});

}  // namespace dicke
