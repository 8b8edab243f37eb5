#pragma once

// Generalized inverse participation ratios and mass-exponent analysis.
//
// IPR_q = sum_k |c_k|^{2q} scales as aleph_eff^{-tau_q} with aleph_eff = j^{3/2}.
// tau_q is fitted per q from a log-log regression over a ladder of j values and
// then described by linear, parabolic or square-root models in q.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dicke/coherent.hpp"

namespace dicke {

double ipr_q(std::span<const double> coeffs_sq, double q);
double ipr_q(const EigenExpansion& expansion, double q);

// aleph_eff = j^{3/2}
double effective_dim(double j);

// Default grid 0.10, 0.15, ..., 4.00.
std::vector<double> make_q_grid(double lo = 0.10, double hi = 4.00, double step = 0.05);

struct IPRSeries {
    std::vector<double> q_grid;
    std::vector<double> j_list;                        // ascending
    std::vector<std::vector<double>> ipr;              // [q][j]
    std::vector<std::vector<std::uint8_t>> converged;  // [q][j]

    IPRSeries() = default;
    IPRSeries(std::vector<double> q_grid, std::vector<double> j_list);

    std::vector<double> aleph_eff() const;
    // Fill column `j_index` from one expansion.
    void set_column(std::size_t j_index, const EigenExpansion& expansion);
};

inline constexpr double kDefaultCurvatureSlack = 0.01;
inline constexpr double kDefaultPositiveSlack = 0.005;

struct MassExponentCurve {
    std::vector<double> q_grid;
    std::vector<double> tau;
    std::vector<double> stderr_;
    std::vector<std::uint8_t> trusted;
    std::pair<double, double> trusted_range{0.0, 0.0};
};

struct MassExponentOptions {
    double j_exclude_below{20.0};
    std::size_t min_points{4};
    double curvature_slack{kDefaultCurvatureSlack};
};

// tau_q = -slope of log IPR_q against log aleph_eff over the retained j values.
MassExponentCurve mass_exponents(const IPRSeries& series, const MassExponentOptions& opts = {});

// Largest contiguous q interval around q = 1 where tau is nondecreasing and its
// second derivative (centered differences) stays below `slack`.
std::pair<double, double> curvature_scan(std::span<const double> q_grid, std::span<const double> tau,
                                         double slack = kDefaultCurvatureSlack);
// Applies curvature_scan and updates the curve's trusted flags and range.
void apply_curvature_scan(MassExponentCurve& curve, double slack = kDefaultCurvatureSlack);

enum class FitModel { linear, parabolic, sqrt };
enum class StateClass { ergodic, regular, localized, intermediate, discard };

std::string to_string(FitModel m);
std::string to_string(StateClass c);
FitModel fit_model_from_string(const std::string& s);

struct ClassifyThresholds {
    double band{0.1};          // |D1 - 1| and |D1 - 1/3| acceptance
    double localized{0.05};    // D1 at or below this
    double positive{kDefaultPositiveSlack};
};

struct FitReport {
    FitModel model{FitModel::linear};
    double d0{0.0};
    double d1{0.0};
    double d2{0.0};   // q^2 coefficient (parabolic) or q^{1/2} coefficient (sqrt)
    std::pair<double, double> q_range{0.0, 0.0};
    std::size_t n_points{0};
    double rms{0.0};
    StateClass classification{StateClass::intermediate};
};

// Least-squares fit of tau over the grid points inside q_range that are also
// trusted. Models:
//   linear     tau = D0 + D1 (q-1)
//   parabolic  tau = D0 + D1 (q-1) + D2 q^2
//   sqrt       tau = D0 + D1 (q-1) + D2 q^{1/2}
FitReport fit_tau(const MassExponentCurve& curve, std::pair<double, double> q_range, FitModel model,
                  const ClassifyThresholds& thresholds = {});

// Least squares on raw (q, tau) samples, without the trusted-range filter.
FitReport fit_tau_points(std::span<const double> q, std::span<const double> tau, FitModel model,
                         const ClassifyThresholds& thresholds = {});

StateClass classify(FitModel model, double d1, double d2, const ClassifyThresholds& thresholds = {});

struct AnomalousExponent {
    std::vector<double> q;
    std::vector<double> delta;                  // tau_q - D (q - 1) on trusted points
    std::optional<double> weak_delta;           // fitted Delta in Delta_q = Delta q (1 - q)
    std::optional<double> reciprocity_residual; // max |Delta_q - Delta_{1-q}| over pairs on the grid
};

AnomalousExponent anomalous_exponent(const MassExponentCurve& curve, double d_linear, bool fit_weak = true);

struct PDoSHistogram {
    double q{1.0};
    std::vector<double> bin_edges;   // size n_bins + 1, scaled energy
    std::vector<double> mass;        // sum of |c_k|^{2q} per bin
    double mean_energy{0.0};

    double total() const;
};

inline constexpr std::size_t kDefaultPdosBins = 200;

// Uniform bins over the span of converged levels.
PDoSHistogram pdos_q(const EigenExpansion& expansion, double q, std::size_t n_bins = kDefaultPdosBins);

struct LinearRegression {
    double slope{0.0};
    double intercept{0.0};
    double slope_stderr{0.0};
    double r_squared{0.0};
};

LinearRegression linear_regression(std::span<const double> x, std::span<const double> y);

}  // namespace dicke
