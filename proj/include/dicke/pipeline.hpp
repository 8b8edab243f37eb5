#pragma once

// End-to-end experiments: per-state analysis, energy-surface scans, oracle
// bound checks, cutoff sweeps and Poincare sections, with CSV writers.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dicke/classical.hpp"
#include "dicke/config.hpp"
#include "dicke/spectrum_cache.hpp"

namespace dicke {

using LogFn = std::function<void(const std::string&)>;

struct RunContext {
    const ExperimentConfig& config;
    SpectrumCache* cache{nullptr};   // optional
    LogFn log;

    void note(const std::string& msg) const {
        if (log) log(msg);
    }
};

// Positive and negative parity blocks for one (j, n_max).
struct BlockPair {
    SpectralData positive;
    SpectralData negative;
};

BlockPair solve_blocks(const RunContext& ctx, double j, int n_max);

// IPR data of one coherent state over the j ladder.
struct StateSeries {
    SurfacePoint point;
    PhaseSpacePoint phase_point;
    IPRSeries series;
    std::vector<double> tail_weight;       // per j
    std::vector<std::uint8_t> certified;   // per j, before any override
    double max_norm_error{0.0};            // max |IPR_1 - 1| over certified sizes
    std::optional<EigenExpansion> largest; // expansion at the largest certified j
};

// Phase-space point (x+, 0, phi, jz) for a surface point; ConfigError when off the surface.
PhaseSpacePoint resolve_point(const SurfacePoint& sp, const ModelParams& params);

// One diagonalization per (j, block) shared by all points; every point must use n_max.
std::vector<StateSeries> collect_series(const RunContext& ctx, const std::vector<SurfacePoint>& points, int n_max,
                                        bool keep_largest);

struct StateBundle {
    StateSeries data;
    std::optional<MassExponentCurve> curve;
    std::string curve_error;
    std::vector<FitReport> fits;          // up to three models x two ranges
    std::vector<std::string> fit_errors;
    std::optional<AnomalousExponent> anomalous;
    std::vector<PDoSHistogram> pdos;
};

StateBundle analyze_series(const RunContext& ctx, StateSeries data);
std::vector<StateBundle> run_state_analysis(const RunContext& ctx, const std::vector<SurfacePoint>& points);

struct SurfaceRow {
    double jz{0.0};
    double x{0.0};
    std::optional<FitReport> high;   // parabolic on fit_high
    std::optional<FitReport> low;    // parabolic on fit_low
    bool discard_high{true};
    bool discard_low{true};
    double tau1{0.0};
    double tau1_stderr{0.0};
    double max_norm_error{0.0};
    std::string note;

    bool retained() const { return high.has_value() && !discard_high; }
};

struct SurfaceScan {
    double eps0{0.0};
    int n_max{0};
    std::vector<SurfaceRow> rows;
    std::vector<std::pair<double, std::string>> skipped;
};

SurfaceScan run_surface_scan(const RunContext& ctx, double eps0);

struct OracleSlope {
    std::string name;
    double expected{1.0};
    MassExponentCurve curve;
    FitReport linear;                 // linear fit of tau on fit_high
    double max_ratio_deviation{0.0};  // max |tau_q / (q - 1) - expected| for q in (q_lo, q_hi]
};

struct ClosedFormRow {
    std::string oracle;
    double j{0.0};
    double q{0.0};
    double sigma_nu{0.0};
    double summed{0.0};
    double predicted{0.0};
    double rel_error{0.0};
};

struct BoundsReport {
    OracleSlope random;
    OracleSlope sequence;
    std::vector<ClosedFormRow> closed_form;
};

inline const std::vector<double> kClosedFormQ{0.5, 1.0, 2.0, 4.0};

BoundsReport run_bounds_check(const RunContext& ctx);

struct SweepRow {
    double q{0.0};
    double tau_lo{0.0};
    double tau_hi{0.0};
    double delta{0.0};
    double rel{0.0};   // |delta| / |tau_hi|, NaN when tau_hi is zero
};

struct SweepReport {
    SurfacePoint point;
    int n_lo{0};
    int n_hi{0};
    std::vector<SweepRow> rows;
    std::optional<double> q_star;   // first q below 1 with |delta| above the visible tolerance
    std::string error;
};

std::vector<SweepReport> run_convergence_sweep(const RunContext& ctx, const std::vector<SurfacePoint>& points);

struct PoincareRun {
    double eps0{0.0};
    std::vector<PhaseSpacePoint> seeds;
    SectionResult section;
    Occupancy occupancy;
};

PoincareRun run_poincare(const RunContext& ctx, double eps0, const std::vector<double>& seed_jz);

// CSV writers. Each returns the written paths.
std::vector<std::filesystem::path> write_spectrum_csv(const ExperimentConfig& cfg, const SpectralData& s,
                                                      const std::filesystem::path& dir);
std::vector<std::filesystem::path> write_state_outputs(const ExperimentConfig& cfg,
                                                       const std::vector<StateBundle>& bundles,
                                                       const std::filesystem::path& dir);
std::vector<std::filesystem::path> write_surface_csv(const ExperimentConfig& cfg, const SurfaceScan& scan,
                                                     const std::filesystem::path& dir);
std::vector<std::filesystem::path> write_bounds_csv(const ExperimentConfig& cfg, const BoundsReport& report,
                                                    const std::filesystem::path& dir);
std::vector<std::filesystem::path> write_sweep_csv(const ExperimentConfig& cfg,
                                                   const std::vector<SweepReport>& reports,
                                                   const std::filesystem::path& dir);
std::vector<std::filesystem::path> write_section_csv(const ExperimentConfig& cfg, const PoincareRun& run,
                                                     const std::filesystem::path& dir);

// Runs fn(i) for i in [0, n) on up to `threads` workers. Exceptions are rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace dicke
