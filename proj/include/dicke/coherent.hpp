#pragma once

// Glauber x Bloch coherent states |x, p; phi, jz> and their expansion in the
// Dicke eigenbasis.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dicke/model.hpp"

namespace dicke {

struct PhaseSpacePoint {
    double x{0.0};     // field quadrature
    double p{0.0};     // conjugate quadrature
    double phi{0.0};   // azimuthal Bloch angle
    double jz{0.0};    // scaled J_z in [-1, 1]
};

struct CoherentLabel {
    std::complex<double> beta;
    std::complex<double> w;
};

inline constexpr double kPoleGuard = 1e-12;

// beta = sqrt(j/2)(x + i p), w = tan(theta/2) e^{i phi} with jz = -cos(theta).
// Throws std::domain_error within `pole_guard` of the north pole (w diverges);
// at the south pole w = 0.
CoherentLabel canonical_to_complex(const PhaseSpacePoint& point, double j, double pole_guard = kPoleGuard);

// Scaled classical energy h_D = <z|H|z>/j.
double classical_energy(const PhaseSpacePoint& point, const ModelParams& params);

// Minimum of h_D over phase space.
double classical_ground_energy(const ModelParams& params);

struct BasisCoefficients {
    // Product basis, n-major / m-minor, size (n_max+1)(2j+1).
    std::vector<std::complex<double>> values;
    double deficit{0.0};   // 1 - sum |values|^2 from the Fock cutoff
    PhaseSpacePoint point;
    ModelParams params;
};

// Coherent-state amplitudes <n, m|z>, evaluated in log space.
BasisCoefficients basis_coeffs(const PhaseSpacePoint& point, const ModelParams& params);

inline constexpr double kDefaultTailBudget = 1e-6;

struct EigenExpansion {
    std::vector<double> coeffs_sq;          // |c_k|^2, aligned with scaled_energies
    std::vector<double> scaled_energies;    // E_k / j, ascending
    std::vector<std::uint8_t> level_converged;
    double norm{0.0};                       // sum |c_k|^2
    double mean_energy{0.0};                // sum |c_k|^2 eps_k
    double tail_weight{0.0};                // weight on uncertified levels
    double deficit{0.0};                    // Fock truncation deficit of the input
    bool converged{false};
    PhaseSpacePoint source_point;
    int two_j{0};
    Parity parity{Parity::both};

    std::size_t size() const { return coeffs_sq.size(); }
    double j() const { return 0.5 * two_j; }
    // Standard deviation of the scaled energy under |c_k|^2.
    double energy_width() const;
};

// c_k = <E_k|z> over each supplied parity block. With two blocks the result
// is merged into one ascending energy list.
EigenExpansion eigen_expansion(const BasisCoefficients& coeffs, std::span<const SpectralData* const> blocks,
                               double tail_budget = kDefaultTailBudget);
EigenExpansion eigen_expansion(const BasisCoefficients& coeffs, const SpectralData& block,
                               double tail_budget = kDefaultTailBudget);
EigenExpansion eigen_expansion(const BasisCoefficients& coeffs, const SpectralData& positive,
                               const SpectralData& negative, double tail_budget = kDefaultTailBudget);

// Batched form: one matrix product per block for all points.
std::vector<EigenExpansion> eigen_expansions(std::span<const BasisCoefficients> coeffs,
                                             std::span<const SpectralData* const> blocks,
                                             double tail_budget = kDefaultTailBudget);

// Positive branch of h_D(x, p=0; phi, jz) = eps0, or nullopt off the surface.
std::optional<double> solve_xplus(double eps0, double phi, double jz, const ModelParams& params);

// jz interval on which solve_xplus has a real root at the given phi.
std::optional<std::pair<double, double>> allowed_jz_interval(double eps0, const ModelParams& params, double phi = 0.0);

struct SurfaceSample {
    std::vector<PhaseSpacePoint> points;
    std::vector<std::pair<double, std::string>> skipped;   // (jz, reason)
};

SurfaceSample surface_sample(double eps0, std::span<const double> jz_grid, const ModelParams& params,
                             double phi = 0.0);

// `count` uniform jz values spanning the allowed interval at phi.
std::vector<double> uniform_jz_grid(double eps0, const ModelParams& params, std::size_t count, double phi = 0.0);

}  // namespace dicke
