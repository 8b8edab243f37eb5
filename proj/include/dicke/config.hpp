#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dicke/classical.hpp"
#include "dicke/multifractal.hpp"
#include "dicke/oracles.hpp"

namespace dicke {

// A coherent-state centre given by its energy surface and (phi, jz); x is the
// positive root and p = 0.
struct SurfacePoint {
    double eps0{-1.8};
    double jz{0.0};
    double phi{0.0};
    std::string label;
};

struct ExperimentConfig {
    double omega{1.0};
    double omega0{1.0};
    double coupling{2.0};

    std::vector<double> j_list{5, 10, 15, 20, 25, 30, 35, 40};
    int n_max{0};       // 0 selects by energy: 120 up to eps0 = -1.1, 160 above
    int n_max_alt{0};   // second cutoff for convergence sweeps

    std::vector<double> energies{-1.8};
    std::size_t jz_points{101};
    std::vector<double> jz_values;      // explicit grid; overrides jz_points
    std::vector<SurfacePoint> points;

    double q_lo{0.10};
    double q_hi{4.00};
    double q_step{0.05};
    std::pair<double, double> fit_high{1.0, 2.0};
    std::pair<double, double> fit_low{0.3, 1.0};
    MassExponentOptions mass{};
    ClassifyThresholds thresholds{};

    ConvergenceOptions convergence{};
    bool exclude_unconverged{true};     // false keeps uncertified sizes in fits (diagnostic use)
    double tail_budget{kDefaultTailBudget};
    std::size_t max_block_dim{kDefaultMaxBlockDim};

    std::vector<double> pdos_q{0.5, 1.0, 2.0};
    std::size_t pdos_bins{kDefaultPdosBins};

    // Poincare sections
    double t_max{10000.0};
    IntegratorOptions integrator{};
    std::size_t section_bins{50};

    // Synthetic oracles
    std::vector<double> oracle_j_list{10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 110, 120};
    RandomGaussianOracle random_oracle{};
    SequenceOracle sequence_oracle{};
    double sweep_visible_tol{0.01};

    std::filesystem::path output_dir{"out"};
    std::filesystem::path cache_dir;    // empty: no spectrum cache
    std::uint64_t seed{20240501};
    unsigned threads{1};

    ModelParams model(double j, int n_max) const;
    int n_max_for(double eps0) const;
    std::vector<double> q_grid() const;

    // Throws ConfigError.
    void validate() const;
    // SHA-256 hex of the canonical JSON form.
    std::string digest() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace dicke
