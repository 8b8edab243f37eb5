#include "dicke/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <future>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "dicke/csv.hpp"
#include "dicke/errors.hpp"

namespace dicke {

namespace fs = std::filesystem;

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(err_mutex);
                    if (!first) first = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

BlockPair solve_blocks(const RunContext& ctx, double j, int n_max) {
    const auto& cfg = ctx.config;
    const ModelParams params = cfg.model(j, n_max);
    auto one = [&](Parity block) {
        if (ctx.cache) return ctx.cache->get_or_solve(params, block, cfg.convergence, cfg.max_block_dim);
        return solve_block(params, block, cfg.convergence, cfg.max_block_dim);
    };
    if (cfg.threads >= 2) {
        auto neg = std::async(std::launch::async, one, Parity::negative);
        SpectralData pos = one(Parity::positive);
        return {std::move(pos), neg.get()};
    }
    SpectralData pos = one(Parity::positive);
    return {std::move(pos), one(Parity::negative)};
}

PhaseSpacePoint resolve_point(const SurfacePoint& sp, const ModelParams& params) {
    const auto x = solve_xplus(sp.eps0, sp.phi, sp.jz, params);
    if (!x) {
        std::ostringstream os;
        os << "point (eps0=" << sp.eps0 << ", jz=" << sp.jz << ", phi=" << sp.phi << ") is off the energy surface";
        throw ConfigError(os.str());
    }
    return {*x, 0.0, sp.phi, sp.jz};
}

std::vector<StateSeries> collect_series(const RunContext& ctx, const std::vector<SurfacePoint>& points, int n_max,
                                        bool keep_largest) {
    const auto& cfg = ctx.config;
    const auto q_grid = cfg.q_grid();
    std::vector<StateSeries> out(points.size());
    const ModelParams shape = cfg.model(cfg.j_list.front(), n_max);
    for (std::size_t i = 0; i < points.size(); ++i) {
        out[i].point = points[i];
        out[i].phase_point = resolve_point(points[i], shape);
        out[i].series = IPRSeries(q_grid, cfg.j_list);
        out[i].tail_weight.assign(cfg.j_list.size(), 0.0);
        out[i].certified.assign(cfg.j_list.size(), 0);
    }

    for (std::size_t jk = 0; jk < cfg.j_list.size(); ++jk) {
        const double j = cfg.j_list[jk];
        const BlockPair blocks = solve_blocks(ctx, j, n_max);
        {
            std::ostringstream os;
            os << "j=" << j << " n_max=" << n_max << " dims " << blocks.positive.dim() << "+" << blocks.negative.dim()
               << " certified " << blocks.positive.n_converged << "+" << blocks.negative.n_converged;
            ctx.note(os.str());
        }
        const ModelParams params = cfg.model(j, n_max);
        std::vector<BasisCoefficients> coeffs(points.size());
        parallel_for(points.size(), cfg.threads,
                     [&](std::size_t i) { coeffs[i] = basis_coeffs(out[i].phase_point, params); });
        const SpectralData* ptrs[] = {&blocks.positive, &blocks.negative};
        auto expansions = eigen_expansions(coeffs, ptrs, cfg.tail_budget);
        coeffs.clear();

        for (std::size_t i = 0; i < points.size(); ++i) {
            auto& s = out[i];
            auto& e = expansions[i];
            s.tail_weight[jk] = e.tail_weight;
            s.certified[jk] = e.converged ? 1 : 0;
            if (e.converged) s.max_norm_error = std::max(s.max_norm_error, std::abs(ipr_q(e, 1.0) - 1.0));
            if (!e.converged) {
                std::ostringstream os;
                os << "point " << i << " (jz=" << s.point.jz << ") at j=" << j << " unconverged: tail weight "
                   << e.tail_weight << ", deficit " << e.deficit
                   << (cfg.exclude_unconverged ? " (excluded)" : " (kept)");
                ctx.note(os.str());
                if (!cfg.exclude_unconverged) {
                    e.converged = true;
                    std::fill(e.level_converged.begin(), e.level_converged.end(), std::uint8_t{1});
                }
            }
            s.series.set_column(jk, e);
            if (keep_largest && e.converged) s.largest = std::move(e);
        }
    }
    return out;
}

namespace {

constexpr FitModel kModels[] = {FitModel::linear, FitModel::parabolic, FitModel::sqrt};

std::map<int, std::vector<std::size_t>> group_by_cutoff(const ExperimentConfig& cfg,
                                                        const std::vector<SurfacePoint>& points) {
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < points.size(); ++i) groups[cfg.n_max_for(points[i].eps0)].push_back(i);
    return groups;
}

}  // namespace

StateBundle analyze_series(const RunContext& ctx, StateSeries data) {
    const auto& cfg = ctx.config;
    StateBundle b;
    b.data = std::move(data);
    try {
        b.curve = mass_exponents(b.data.series, cfg.mass);
    } catch (const InsufficientDataError& e) {
        b.curve_error = e.what();
        ctx.note("point jz=" + std::to_string(b.data.point.jz) + ": " + e.what());
    }
    if (b.curve) {
        for (const auto& range : {cfg.fit_high, cfg.fit_low}) {
            for (FitModel m : kModels) {
                try {
                    b.fits.push_back(fit_tau(*b.curve, range, m, cfg.thresholds));
                } catch (const InsufficientDataError& e) {
                    b.fit_errors.push_back(to_string(m) + " on [" + format_number(range.first) + ", " +
                                           format_number(range.second) + "]: " + e.what());
                }
            }
        }
        for (const auto& f : b.fits) {
            if (f.model == FitModel::linear && f.q_range.first >= cfg.fit_high.first - 1e-9) {
                b.anomalous = anomalous_exponent(*b.curve, f.d1);
                break;
            }
        }
    }
    if (b.data.largest) {
        for (double q : cfg.pdos_q) b.pdos.push_back(pdos_q(*b.data.largest, q, cfg.pdos_bins));
    }
    return b;
}

std::vector<StateBundle> run_state_analysis(const RunContext& ctx, const std::vector<SurfacePoint>& points) {
    const auto& cfg = ctx.config;
    std::vector<StateBundle> out(points.size());
    for (const auto& [n_max, idx] : group_by_cutoff(cfg, points)) {
        std::vector<SurfacePoint> group;
        for (auto i : idx) group.push_back(points[i]);
        auto series = collect_series(ctx, group, n_max, true);
        for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = analyze_series(ctx, std::move(series[k]));
    }
    return out;
}

SurfaceScan run_surface_scan(const RunContext& ctx, double eps0) {
    const auto& cfg = ctx.config;
    SurfaceScan scan;
    scan.eps0 = eps0;
    scan.n_max = cfg.n_max_for(eps0);
    const ModelParams shape = cfg.model(cfg.j_list.front(), scan.n_max);
    const std::vector<double> grid =
        cfg.jz_values.empty() ? uniform_jz_grid(eps0, shape, cfg.jz_points, 0.0) : cfg.jz_values;
    const auto sample = surface_sample(eps0, grid, shape, 0.0);
    scan.skipped = sample.skipped;
    if (sample.points.empty()) {
        throw ConfigError("energy surface eps0=" + format_number(eps0) + " has no points on the jz grid");
    }
    std::vector<SurfacePoint> points;
    for (const auto& p : sample.points) points.push_back({eps0, p.jz, 0.0, {}});

    auto series = collect_series(ctx, points, scan.n_max, false);
    scan.rows.resize(series.size());
    parallel_for(series.size(), cfg.threads, [&](std::size_t i) {
        SurfaceRow& row = scan.rows[i];
        row.jz = series[i].point.jz;
        row.x = series[i].phase_point.x;
        row.max_norm_error = series[i].max_norm_error;
        try {
            const auto curve = mass_exponents(series[i].series, cfg.mass);
            for (std::size_t k = 0; k < curve.q_grid.size(); ++k) {
                if (std::abs(curve.q_grid[k] - 1.0) < 1e-9) {
                    row.tau1 = curve.tau[k];
                    row.tau1_stderr = curve.stderr_[k];
                }
            }
            try {
                row.high = fit_tau(curve, cfg.fit_high, FitModel::parabolic, cfg.thresholds);
                row.discard_high = row.high->classification == StateClass::discard;
            } catch (const InsufficientDataError& e) {
                row.note += std::string("high fit: ") + e.what() + "; ";
            }
            try {
                row.low = fit_tau(curve, cfg.fit_low, FitModel::parabolic, cfg.thresholds);
                row.discard_low = row.low->classification == StateClass::discard;
            } catch (const InsufficientDataError& e) {
                row.note += std::string("low fit: ") + e.what() + "; ";
            }
        } catch (const InsufficientDataError& e) {
            row.note = e.what();
        }
    });
    return scan;
}

namespace {

OracleSlope oracle_slope(const RunContext& ctx, const std::string& name, double expected,
                         const std::function<SyntheticState(double)>& make) {
    const auto& cfg = ctx.config;
    IPRSeries series(cfg.q_grid(), cfg.oracle_j_list);
    for (std::size_t k = 0; k < cfg.oracle_j_list.size(); ++k) {
        auto s = make(cfg.oracle_j_list[k]);
        s.expansion.converged = true;
        series.set_column(k, s.expansion);
    }
    MassExponentOptions opts = cfg.mass;
    opts.j_exclude_below = 0.0;
    opts.min_points = 2;
    OracleSlope out;
    out.name = name;
    out.expected = expected;
    out.curve = mass_exponents(series, opts);
    out.linear = fit_tau(out.curve, cfg.fit_high, FitModel::linear, cfg.thresholds);
    for (std::size_t i = 0; i < out.curve.q_grid.size(); ++i) {
        const double q = out.curve.q_grid[i];
        if (q <= cfg.fit_high.first + 1e-9 || q > cfg.fit_high.second + 1e-9) continue;
        out.max_ratio_deviation =
            std::max(out.max_ratio_deviation, std::abs(out.curve.tau[i] / (q - 1.0) - expected));
    }
    return out;
}

}  // namespace

BoundsReport run_bounds_check(const RunContext& ctx) {
    const auto& cfg = ctx.config;
    BoundsReport r;
    r.random = oracle_slope(ctx, "random", 1.0, [&](double j) { return synth_random_gaussian(j, cfg.random_oracle); });
    r.sequence =
        oracle_slope(ctx, "sequence", 1.0 / 3.0, [&](double j) { return synth_sequence_state(j, cfg.sequence_oracle); });

    // Closed forms are checked with unit weights, where the sum is deterministic.
    RandomGaussianOracle unit = cfg.random_oracle;
    unit.weights = WeightDistribution::unit;
    for (double j : cfg.oracle_j_list) {
        const std::pair<std::string, SyntheticState> states[] = {{"random_unit", synth_random_gaussian(j, unit)},
                                                                 {"sequence", synth_sequence_state(j, cfg.sequence_oracle)}};
        for (const auto& [name, s] : states) {
            for (double q : kClosedFormQ) {
                ClosedFormRow row;
                row.oracle = name;
                row.j = j;
                row.q = q;
                row.sigma_nu = s.sigma * s.nu;
                row.summed = ipr_q(s.expansion, q);
                row.predicted = s.predicted_ipr(q);
                row.rel_error = std::abs(row.summed - row.predicted) / row.predicted;
                r.closed_form.push_back(row);
            }
        }
    }
    return r;
}

std::vector<SweepReport> run_convergence_sweep(const RunContext& ctx, const std::vector<SurfacePoint>& points) {
    const auto& cfg = ctx.config;
    std::vector<SweepReport> out(points.size());
    std::map<std::pair<int, int>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const int hi = cfg.n_max_for(points[i].eps0);
        const int lo = cfg.n_max_alt > 0 ? cfg.n_max_alt : (3 * hi) / 4;
        groups[{lo, hi}].push_back(i);
    }
    for (const auto& [cut, idx] : groups) {
        std::vector<SurfacePoint> group;
        for (auto i : idx) group.push_back(points[i]);
        auto series_lo = collect_series(ctx, group, cut.first, false);
        auto series_hi = cut.first == cut.second ? series_lo : collect_series(ctx, group, cut.second, false);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            SweepReport& rep = out[idx[k]];
            rep.point = group[k];
            rep.n_lo = cut.first;
            rep.n_hi = cut.second;
            try {
                const auto lo = mass_exponents(series_lo[k].series, cfg.mass);
                const auto hi = mass_exponents(series_hi[k].series, cfg.mass);
                for (std::size_t i = 0; i < lo.q_grid.size(); ++i) {
                    SweepRow row;
                    row.q = lo.q_grid[i];
                    row.tau_lo = lo.tau[i];
                    row.tau_hi = hi.tau[i];
                    row.delta = hi.tau[i] - lo.tau[i];
                    row.rel = hi.tau[i] != 0.0 ? std::abs(row.delta) / std::abs(hi.tau[i])
                                               : std::numeric_limits<double>::quiet_NaN();
                    rep.rows.push_back(row);
                }
                for (auto it = rep.rows.rbegin(); it != rep.rows.rend(); ++it) {
                    if (it->q >= 1.0 - 1e-9) continue;
                    if (std::abs(it->delta) > cfg.sweep_visible_tol) {
                        rep.q_star = it->q;
                        break;
                    }
                }
            } catch (const InsufficientDataError& e) {
                rep.error = e.what();
                ctx.note("sweep point jz=" + std::to_string(rep.point.jz) + ": " + e.what());
            }
        }
    }
    return out;
}

PoincareRun run_poincare(const RunContext& ctx, double eps0, const std::vector<double>& seed_jz) {
    const auto& cfg = ctx.config;
    PoincareRun run;
    run.eps0 = eps0;
    const ModelParams params = cfg.model(cfg.j_list.front(), 1);
    const auto sample = surface_sample(eps0, seed_jz, params, 0.0);
    for (const auto& [jz, why] : sample.skipped) ctx.note("seed jz=" + format_number(jz) + " skipped: " + why);
    if (sample.points.empty()) throw ConfigError("no Poincare seed lies on the surface eps0=" + format_number(eps0));
    run.seeds = sample.points;
    std::vector<SectionResult> parts(run.seeds.size());
    parallel_for(run.seeds.size(), cfg.threads, [&](std::size_t i) {
        parts[i] = poincare_section(eps0, std::span(&run.seeds[i], 1), cfg.t_max, params, cfg.integrator);
        for (auto& p : parts[i].points) p.trajectory_id = i;
    });
    for (auto& p : parts) {
        run.section.points.insert(run.section.points.end(), p.points.begin(), p.points.end());
        for (auto& d : p.diagnostics) {
            ctx.note(d);
            run.section.diagnostics.push_back(d);
        }
    }
    run.occupancy = section_occupancy(run.section.points, eps0, params, cfg.section_bins);
    return run;
}

// ---- CSV output ----

namespace {

CsvWriter::Metadata base_meta(const ExperimentConfig& cfg, const std::string& kind) {
    return {{"config_digest", cfg.digest()}, {"output", kind}};
}

std::string tag(double v) { return format_number(v); }

}  // namespace

std::vector<fs::path> write_spectrum_csv(const ExperimentConfig& cfg, const SpectralData& s, const fs::path& dir) {
    fs::create_directories(dir);
    const double j = s.params.j();
    const auto path = dir / ("spectrum_j" + tag(j) + "_n" + std::to_string(s.params.n_max) + "_" +
                             to_string(s.block()) + ".csv");
    auto meta = base_meta(cfg, "spectrum");
    meta.push_back({"params_digest", s.params_digest.hex()});
    meta.push_back({"j", tag(j)});
    meta.push_back({"n_max", std::to_string(s.params.n_max)});
    meta.push_back({"parity", to_string(s.block())});
    meta.push_back({"n_converged", std::to_string(s.n_converged)});
    CsvWriter w(path, meta, {"k", "E_k", "eps_k", "converged"});
    for (std::size_t k = 0; k < s.dim(); ++k) {
        const double e = s.eigenvalues(static_cast<Eigen::Index>(k));
        w.cell(k).cell(e).cell(e / j).cell(k < s.n_converged ? 1 : 0);
        w.end_row();
    }
    return {path};
}

std::vector<fs::path> write_state_outputs(const ExperimentConfig& cfg, const std::vector<StateBundle>& bundles,
                                          const fs::path& dir) {
    fs::create_directories(dir);
    std::vector<fs::path> written;
    const std::vector<std::string> fit_header{"state", "eps0", "jz", "phi", "x",   "q_lo",          "q_hi",
                                              "model", "D0",   "D1", "D2",  "rms", "classification"};
    CsvWriter fits(dir / "fits.csv", base_meta(cfg, "fits"), fit_header);
    written.push_back(fits.path());
    for (std::size_t i = 0; i < bundles.size(); ++i) {
        const auto& b = bundles[i];
        const auto& pt = b.data.point;
        const std::string id = "state" + std::to_string(i);
        auto meta = base_meta(cfg, "state");
        meta.push_back({"state", id});
        meta.push_back({"eps0", tag(pt.eps0)});
        meta.push_back({"jz", tag(pt.jz)});
        meta.push_back({"phi", tag(pt.phi)});
        meta.push_back({"x", tag(b.data.phase_point.x)});
        if (!pt.label.empty()) meta.push_back({"label", pt.label});

        for (const auto& f : b.fits) {
            fits.cell(id).cell(pt.eps0).cell(pt.jz).cell(pt.phi).cell(b.data.phase_point.x);
            fits.cell(f.q_range.first).cell(f.q_range.second).cell(to_string(f.model));
            fits.cell(f.d0).cell(f.d1).cell(f.d2).cell(f.rms).cell(to_string(f.classification));
            fits.end_row();
        }
        if (b.curve) {
            auto m = meta;
            m.push_back({"trusted_lo", tag(b.curve->trusted_range.first)});
            m.push_back({"trusted_hi", tag(b.curve->trusted_range.second)});
            CsvWriter w(dir / (id + "_tau.csv"), m, {"q", "tau", "stderr", "trusted"});
            for (std::size_t k = 0; k < b.curve->q_grid.size(); ++k) {
                w.cell(b.curve->q_grid[k]).cell(b.curve->tau[k]).cell(b.curve->stderr_[k]);
                w.cell(static_cast<int>(b.curve->trusted[k]));
                w.end_row();
            }
            written.push_back(w.path());
        }
        if (b.anomalous) {
            auto m = meta;
            if (b.anomalous->weak_delta) m.push_back({"weak_delta", tag(*b.anomalous->weak_delta)});
            if (b.anomalous->reciprocity_residual) {
                m.push_back({"reciprocity_residual", tag(*b.anomalous->reciprocity_residual)});
            }
            CsvWriter w(dir / (id + "_anomalous.csv"), m, {"q", "delta_q"});
            for (std::size_t k = 0; k < b.anomalous->q.size(); ++k) {
                w.cell(b.anomalous->q[k]).cell(b.anomalous->delta[k]);
                w.end_row();
            }
            written.push_back(w.path());
        }
        {
            CsvWriter w(dir / (id + "_ipr.csv"), meta, {"q", "j", "aleph_eff", "ipr", "converged"});
            const auto aleph = b.data.series.aleph_eff();
            for (std::size_t qi = 0; qi < b.data.series.q_grid.size(); ++qi) {
                for (std::size_t jk = 0; jk < b.data.series.j_list.size(); ++jk) {
                    w.cell(b.data.series.q_grid[qi]).cell(b.data.series.j_list[jk]).cell(aleph[jk]);
                    w.cell(b.data.series.ipr[qi][jk]).cell(static_cast<int>(b.data.series.converged[qi][jk]));
                    w.end_row();
                }
            }
            written.push_back(w.path());
        }
        if (b.data.largest) {
            const auto& e = *b.data.largest;
            auto m = meta;
            m.push_back({"j", tag(e.j())});
            m.push_back({"mean_energy", tag(e.mean_energy)});
            m.push_back({"tail_weight", tag(e.tail_weight)});
            CsvWriter w(dir / (id + "_expansion.csv"), m, {"k", "E_k", "eps_k", "ck_sq"});
            for (std::size_t k = 0; k < e.size(); ++k) {
                w.cell(k).cell(e.scaled_energies[k] * e.j()).cell(e.scaled_energies[k]).cell(e.coeffs_sq[k]);
                w.end_row();
            }
            written.push_back(w.path());
        }
        for (const auto& h : b.pdos) {
            auto m = meta;
            m.push_back({"q", tag(h.q)});
            m.push_back({"mean_energy", tag(h.mean_energy)});
            CsvWriter w(dir / (id + "_pdos_q" + tag(h.q) + ".csv"), m, {"eps_lo", "eps_hi", "mass"});
            for (std::size_t k = 0; k < h.mass.size(); ++k) {
                w.cell(h.bin_edges[k]).cell(h.bin_edges[k + 1]).cell(h.mass[k]);
                w.end_row();
            }
            written.push_back(w.path());
        }
    }
    return written;
}

std::vector<fs::path> write_surface_csv(const ExperimentConfig& cfg, const SurfaceScan& scan, const fs::path& dir) {
    fs::create_directories(dir);
    auto meta = base_meta(cfg, "surface");
    meta.push_back({"eps0", tag(scan.eps0)});
    meta.push_back({"n_max", std::to_string(scan.n_max)});
    const auto path = dir / ("surface_eps" + tag(scan.eps0) + ".csv");
    CsvWriter w(path, meta,
                {"jz", "x", "D0", "D1", "D2_high", "D1_low", "D2_low", "discard_high", "discard_low", "tau1",
                 "tau1_stderr", "note"});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : scan.rows) {
        w.cell(r.jz).cell(r.x);
        w.cell(r.high ? r.high->d0 : nan).cell(r.high ? r.high->d1 : nan).cell(r.high ? r.high->d2 : nan);
        w.cell(r.low ? r.low->d1 : nan).cell(r.low ? r.low->d2 : nan);
        w.cell(r.discard_high ? 1 : 0).cell(r.discard_low ? 1 : 0);
        w.cell(r.tau1).cell(r.tau1_stderr).cell(r.note);
        w.end_row();
    }
    return {path};
}

std::vector<fs::path> write_bounds_csv(const ExperimentConfig& cfg, const BoundsReport& report, const fs::path& dir) {
    fs::create_directories(dir);
    std::vector<fs::path> written;
    {
        CsvWriter w(dir / "bounds_slopes.csv", base_meta(cfg, "bounds"),
                    {"oracle", "expected", "D0", "D1", "rms", "max_ratio_deviation"});
        for (const auto* o : {&report.random, &report.sequence}) {
            w.cell(o->name).cell(o->expected).cell(o->linear.d0).cell(o->linear.d1).cell(o->linear.rms);
            w.cell(o->max_ratio_deviation);
            w.end_row();
        }
        written.push_back(w.path());
    }
    for (const auto* o : {&report.random, &report.sequence}) {
        CsvWriter w(dir / ("bounds_tau_" + o->name + ".csv"), base_meta(cfg, "bounds"),
                    {"q", "tau", "stderr", "trusted"});
        for (std::size_t k = 0; k < o->curve.q_grid.size(); ++k) {
            w.cell(o->curve.q_grid[k]).cell(o->curve.tau[k]).cell(o->curve.stderr_[k]);
            w.cell(static_cast<int>(o->curve.trusted[k]));
            w.end_row();
        }
        written.push_back(w.path());
    }
    {
        CsvWriter w(dir / "bounds_closed_form.csv", base_meta(cfg, "bounds"),
                    {"oracle", "j", "q", "sigma_nu", "summed", "predicted", "rel_error"});
        for (const auto& r : report.closed_form) {
            w.cell(r.oracle).cell(r.j).cell(r.q).cell(r.sigma_nu).cell(r.summed).cell(r.predicted).cell(r.rel_error);
            w.end_row();
        }
        written.push_back(w.path());
    }
    return written;
}

std::vector<fs::path> write_sweep_csv(const ExperimentConfig& cfg, const std::vector<SweepReport>& reports,
                                      const fs::path& dir) {
    fs::create_directories(dir);
    std::vector<fs::path> written;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        auto meta = base_meta(cfg, "sweep");
        meta.push_back({"eps0", tag(r.point.eps0)});
        meta.push_back({"jz", tag(r.point.jz)});
        meta.push_back({"n_lo", std::to_string(r.n_lo)});
        meta.push_back({"n_hi", std::to_string(r.n_hi)});
        meta.push_back({"q_star", r.q_star ? tag(*r.q_star) : std::string("none")});
        if (!r.error.empty()) meta.push_back({"error", r.error});
        CsvWriter w(dir / ("sweep_state" + std::to_string(i) + ".csv"), meta,
                    {"q", "tau_lo", "tau_hi", "delta", "rel"});
        for (const auto& row : r.rows) {
            w.cell(row.q).cell(row.tau_lo).cell(row.tau_hi).cell(row.delta).cell(row.rel);
            w.end_row();
        }
        written.push_back(w.path());
    }
    return written;
}

std::vector<fs::path> write_section_csv(const ExperimentConfig& cfg, const PoincareRun& run, const fs::path& dir) {
    fs::create_directories(dir);
    auto meta = base_meta(cfg, "poincare");
    meta.push_back({"eps0", tag(run.eps0)});
    meta.push_back({"t_max", tag(cfg.t_max)});
    meta.push_back({"occupied", std::to_string(run.occupancy.occupied)});
    meta.push_back({"allowed", std::to_string(run.occupancy.allowed)});
    const auto path = dir / ("section_eps" + tag(run.eps0) + ".csv");
    CsvWriter w(path, meta, {"trajectory_id", "t", "phi", "jz"});
    for (const auto& p : run.section.points) {
        w.cell(p.trajectory_id).cell(p.crossing_time).cell(p.phi).cell(p.jz);
        w.end_row();
    }
    return {path};
}

}  // namespace dicke
