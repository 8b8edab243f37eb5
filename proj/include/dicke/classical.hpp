#pragma once

// Classical limit of the Dicke model: canonical flow of h_D and Poincare
// sections at p = 0 on the positive x branch.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dicke/coherent.hpp"

namespace dicke {

struct PhaseVelocity {
    double dx{0.0};
    double dp{0.0};
    double dphi{0.0};
    double djz{0.0};
};

// Hamilton's equations in (x, p, phi, jz). Throws std::domain_error at the poles.
PhaseVelocity equations_of_motion(const PhaseSpacePoint& state, const ModelParams& params);

struct TrajectoryState {
    double t{0.0};
    PhaseSpacePoint point;
    double energy{0.0};
};

struct IntegratorOptions {
    double step_tol{1e-12};        // local error tolerance (absolute and relative)
    double initial_step{1e-2};
    double min_step{1e-14};
    double pole_margin{1e-10};     // steps ending at jz > 1 - margin are retried
    double sample_interval{0.0};   // 0 records every accepted step
    double drift_tol{1e-6};        // poincare_section drops trajectories drifting further
};

struct Trajectory {
    std::vector<TrajectoryState> samples;
    bool complete{true};
    std::string diagnostic;
    double max_energy_drift{0.0};
    std::size_t steps{0};
};

// Adaptive Runge-Kutta-Fehlberg 7(8) integration. Negative t_max integrates backwards.
Trajectory integrate_trajectory(const PhaseSpacePoint& initial, double t_max, const ModelParams& params,
                                const IntegratorOptions& opts = {});

struct SectionPoint {
    double phi{0.0};   // wrapped to (-pi, pi]
    double jz{0.0};
    double crossing_time{0.0};
    std::size_t trajectory_id{0};
};

struct SectionResult {
    std::vector<SectionPoint> points;
    std::vector<std::string> diagnostics;   // one entry per dropped trajectory
};

// Crossings of p = 0 with dp/dt < 0, which is where x equals the positive
// root x+ of h_D(x, 0; phi, jz) = eps0. Seeds must lie on the surface.
SectionResult poincare_section(double eps0, std::span<const PhaseSpacePoint> seeds, double t_max,
                               const ModelParams& params, const IntegratorOptions& opts = {});

struct Occupancy {
    std::size_t occupied{0};
    std::size_t allowed{0};
    double fraction() const { return allowed == 0 ? 0.0 : static_cast<double>(occupied) / allowed; }
};

// Cell count on a bins x bins (phi, jz) grid spanning phi in (-pi, pi] and
// the energetically allowed jz interval. Only allowed cells are counted.
Occupancy section_occupancy(std::span<const SectionPoint> points, double eps0, const ModelParams& params,
                            std::size_t bins = 50);

double wrap_angle(double phi);

}  // namespace dicke
