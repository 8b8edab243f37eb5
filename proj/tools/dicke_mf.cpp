// dicke-mf: batch driver for the multifractality experiments.

#include <cstdio>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "dicke/csv.hpp"
#include "dicke/errors.hpp"
#include "dicke/pipeline.hpp"

using namespace dicke;

namespace {

SurfacePoint parse_point(const std::string& s) {
    // eps0:jz[:phi]
    std::vector<double> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("cannot parse point '" + s + "'; expected eps0:jz[:phi]");
        }
    }
    if (parts.size() < 2 || parts.size() > 3) throw ConfigError("point '" + s + "' needs eps0:jz[:phi]");
    return {parts[0], parts[1], parts.size() == 3 ? parts[2] : 0.0, s};
}

void print_fit(const FitReport& f) {
    std::printf("    %-9s q=[%.2f,%.2f] D0=%+.4f D1=%+.4f D2=%+.4f rms=%.2e -> %s\n", to_string(f.model).c_str(),
                f.q_range.first, f.q_range.second, f.d0, f.d1, f.d2, f.rms, to_string(f.classification).c_str());
}

void print_written(const std::vector<std::filesystem::path>& paths) {
    for (const auto& p : paths) std::printf("wrote %s\n", p.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multifractal analysis of Dicke-model coherent states"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir, cache_dir;
    unsigned threads = 0;
    long long seed = -1;
    bool quiet = false;
    app.add_option("--config", config_path, "JSON experiment configuration");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads");
    app.add_option("--seed", seed, "random seed for synthetic oracles");
    app.add_option("--cache", cache_dir, "spectrum cache directory");
    app.add_flag("--quiet", quiet, "suppress progress messages");

    auto* spectrum = app.add_subcommand("spectrum", "diagonalize one (j, n_max) and write the spectrum");
    double spec_j = 0.0;
    int spec_n = 0;
    std::string spec_parity = "both";
    spectrum->add_option("--j", spec_j, "pseudo-spin length")->required();
    spectrum->add_option("--n-max", spec_n, "bosonic cutoff (default from config)");
    spectrum->add_option("--parity", spec_parity, "positive, negative or both");

    auto* state = app.add_subcommand("state-analyze", "tau curve, fits and PDoS for selected coherent states");
    std::vector<std::string> state_points;
    state->add_option("--point", state_points, "eps0:jz[:phi], repeatable (default: config points)");

    auto* surface = app.add_subcommand("surface-scan", "parabolic fits across an energy surface");
    std::vector<double> surface_eps;
    surface->add_option("--eps", surface_eps, "energy surfaces (default: config energies)");

    auto* poincare = app.add_subcommand("poincare", "classical Poincare section at p = 0");
    double poin_eps = -1.8;
    std::vector<double> poin_jz;
    std::size_t poin_seeds = 0;
    double poin_t = -1.0;
    poincare->add_option("--eps", poin_eps, "energy surface");
    poincare->add_option("--jz", poin_jz, "seed jz values at phi = 0");
    poincare->add_option("--seeds", poin_seeds, "uniform seed count over the allowed jz interval");
    poincare->add_option("--t-max", poin_t, "integration time per seed");

    auto* bounds = app.add_subcommand("bounds-check", "synthetic oracle slopes and closed-form agreement");

    auto* sweep = app.add_subcommand("convergence-sweep", "tau at two bosonic cutoffs");
    std::vector<std::string> sweep_points;
    int sweep_alt = 0;
    sweep->add_option("--point", sweep_points, "eps0:jz[:phi], repeatable (default: config points)");
    sweep->add_option("--n-max-alt", sweep_alt, "lower cutoff (default 3/4 of the main cutoff)");

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg = config_path.empty() ? config_from_json(nlohmann::json::object())
                                                   : load_config(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
        if (threads > 0) cfg.threads = threads;
        if (seed >= 0) {
            cfg.seed = static_cast<std::uint64_t>(seed);
            cfg.random_oracle.seed = cfg.seed;
        }
        if (sweep_alt > 0) cfg.n_max_alt = sweep_alt;
        if (poin_t > 0.0) cfg.t_max = poin_t;
        cfg.validate();

        std::unique_ptr<SpectrumCache> cache;
        if (!cfg.cache_dir.empty()) cache = std::make_unique<SpectrumCache>(cfg.cache_dir);
        RunContext ctx{cfg, cache.get(), quiet ? LogFn{} : LogFn([](const std::string& m) { std::cerr << m << '\n'; })};
        const auto& out = cfg.output_dir;

        if (*spectrum) {
            const int n_max = spec_n > 0 ? spec_n : cfg.n_max_for(cfg.energies.front());
            const ModelParams params = cfg.model(spec_j, n_max);
            std::vector<Parity> blocks;
            const Parity sel = parity_from_string(spec_parity);
            if (sel == Parity::both) blocks = {Parity::positive, Parity::negative};
            else blocks = {sel};
            for (Parity b : blocks) {
                const SpectralData s = cache ? cache->get_or_solve(params, b, cfg.convergence, cfg.max_block_dim)
                                             : solve_block(params, b, cfg.convergence, cfg.max_block_dim);
                std::printf("j=%g n_max=%d %s: dim %zu, certified %zu, E0/j=%.12f\n", spec_j, n_max,
                            to_string(b).c_str(), s.dim(), s.n_converged, ground_energy_intensive(s, spec_j));
                print_written(write_spectrum_csv(cfg, s, out));
            }
        } else if (*state) {
            std::vector<SurfacePoint> pts;
            for (const auto& s : state_points) pts.push_back(parse_point(s));
            if (pts.empty()) pts = cfg.points;
            if (pts.empty()) throw ConfigError("state-analyze needs --point or config points");
            const auto bundles = run_state_analysis(ctx, pts);
            for (std::size_t i = 0; i < bundles.size(); ++i) {
                const auto& b = bundles[i];
                std::printf("state%zu eps0=%g jz=%g x=%.6f\n", i, b.data.point.eps0, b.data.point.jz,
                            b.data.phase_point.x);
                if (!b.curve) std::printf("    no tau curve: %s\n", b.curve_error.c_str());
                for (const auto& f : b.fits) print_fit(f);
                for (const auto& e : b.fit_errors) std::printf("    fit skipped: %s\n", e.c_str());
            }
            print_written(write_state_outputs(cfg, bundles, out));
            bool any_curve = false;
            for (const auto& b : bundles) any_curve = any_curve || b.curve.has_value();
            if (!any_curve) throw ConvergenceError("no state had enough converged sizes for a tau fit");
        } else if (*surface) {
            auto energies = surface_eps.empty() ? cfg.energies : surface_eps;
            for (double eps : energies) {
                const auto scan = run_surface_scan(ctx, eps);
                std::size_t kept = 0;
                for (const auto& r : scan.rows) kept += r.retained() ? 1 : 0;
                std::printf("eps0=%g n_max=%d: %zu points, %zu retained, %zu skipped\n", eps, scan.n_max,
                            scan.rows.size(), kept, scan.skipped.size());
                print_written(write_surface_csv(cfg, scan, out));
            }
        } else if (*poincare) {
            std::vector<double> jz = poin_jz;
            if (poin_seeds > 0) {
                const auto grid = uniform_jz_grid(poin_eps, cfg.model(cfg.j_list.front(), 1), poin_seeds + 2);
                // Interior points only; the interval ends are turning points.
                if (grid.size() > 2) jz.insert(jz.end(), grid.begin() + 1, grid.end() - 1);
            }
            if (jz.empty()) throw ConfigError("poincare needs --jz or --seeds");
            const auto run = run_poincare(ctx, poin_eps, jz);
            std::printf("eps0=%g: %zu seeds, %zu crossings, occupancy %zu/%zu = %.4f, %zu dropped\n", poin_eps,
                        run.seeds.size(), run.section.points.size(), run.occupancy.occupied,
                        run.occupancy.allowed, run.occupancy.fraction(), run.section.diagnostics.size());
            print_written(write_section_csv(cfg, run, out));
        } else if (*bounds) {
            const auto r = run_bounds_check(ctx);
            double worst = 0.0;
            for (const auto& row : r.closed_form) {
                if (row.sigma_nu >= 50.0) worst = std::max(worst, row.rel_error);
            }
            for (const auto* o : {&r.random, &r.sequence}) {
                std::printf("%-8s D1=%.5f (expected %.5f), max |tau/(q-1) - expected| on q in (1,2] = %.5f\n",
                            o->name.c_str(), o->linear.d1, o->expected, o->max_ratio_deviation);
            }
            std::printf("closed form: max relative error %.3e over sigma*nu >= 50\n", worst);
            print_written(write_bounds_csv(cfg, r, out));
        } else if (*sweep) {
            std::vector<SurfacePoint> pts;
            for (const auto& s : sweep_points) pts.push_back(parse_point(s));
            if (pts.empty()) pts = cfg.points;
            if (pts.empty()) throw ConfigError("convergence-sweep needs --point or config points");
            const auto reports = run_convergence_sweep(ctx, pts);
            bool any = false;
            for (const auto& r : reports) {
                if (!r.error.empty()) {
                    std::printf("eps0=%g jz=%g: %s\n", r.point.eps0, r.point.jz, r.error.c_str());
                    continue;
                }
                any = true;
                double worst = 0.0;
                for (const auto& row : r.rows) {
                    if (row.q >= 1.0 - 1e-9 && std::abs(row.q - 1.0) > 1e-9) worst = std::max(worst, row.rel);
                }
                std::printf("eps0=%g jz=%g n_max %d vs %d: max |dtau|/|tau| for q>1 = %.4f, q* = %s\n",
                            r.point.eps0, r.point.jz, r.n_lo, r.n_hi, worst,
                            r.q_star ? format_number(*r.q_star).c_str() : "none");
            }
            print_written(write_sweep_csv(cfg, reports, out));
            if (!any) throw ConvergenceError("no sweep point had enough converged sizes");
        }
        if (cache && !quiet) std::cerr << "cache: " << cache->hits() << " hits, " << cache->misses() << " misses\n";
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << '\n';
        return 3;
    } catch (const InsufficientDataError& e) {
        std::cerr << "convergence failure: " << e.what() << '\n';
        return 3;
    } catch (const CacheError& e) {
        std::cerr << "cache error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
