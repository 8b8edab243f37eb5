#include "dicke/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>

namespace dicke {

namespace odeint = boost::numeric::odeint;

PhaseVelocity equations_of_motion(const PhaseSpacePoint& s, const ModelParams& params) {
    const double radial_sq = 1.0 - s.jz * s.jz;
    if (!(radial_sq > 0.0)) throw std::domain_error("equations_of_motion: jz at a pole");
    const double radial = std::sqrt(radial_sq);
    const double c = std::cos(s.phi);
    const double sn = std::sin(s.phi);
    PhaseVelocity v;
    v.dx = params.omega * s.p;
    v.dp = -params.omega * s.x - params.coupling * radial * c;
    v.dphi = params.omega0 - params.coupling * s.x * s.jz * c / radial;
    v.djz = params.coupling * radial * s.x * sn;
    return v;
}

double wrap_angle(double phi) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(phi, two_pi);
    if (r <= -std::numbers::pi) r += two_pi;
    if (r > std::numbers::pi) r -= two_pi;
    return r;
}

namespace {

// Integration runs in (x, p, Q, P) with Q + iP = sqrt(2(1 + jz)) e^{i phi},
// which is regular at the south pole. The map has Poisson bracket {Q, P} = -1.
using State = std::array<double, 4>;

State to_state(const PhaseSpacePoint& pt) {
    const double r = std::sqrt(std::max(0.0, 2.0 * (1.0 + pt.jz)));
    return {pt.x, pt.p, r * std::cos(pt.phi), r * std::sin(pt.phi)};
}

PhaseSpacePoint to_point(const State& s) {
    const double r_sq = s[2] * s[2] + s[3] * s[3];
    PhaseSpacePoint pt;
    pt.x = s[0];
    pt.p = s[1];
    pt.jz = 0.5 * r_sq - 1.0;
    pt.phi = r_sq > 0.0 ? std::atan2(s[3], s[2]) : 0.0;
    return pt;
}

double jz_of(const State& s) { return 0.5 * (s[2] * s[2] + s[3] * s[3]) - 1.0; }

struct Flow {
    ModelParams params;

    void operator()(const State& s, State& ds, double /*t*/) const {
        const double x = s[0], p = s[1], q = s[2], pq = s[3];
        const double root = std::sqrt(std::max(0.0, 1.0 - 0.25 * (q * q + pq * pq)));
        const double w = params.omega, w0 = params.omega0, g = params.coupling;
        ds[0] = w * p;
        ds[1] = -w * x - g * q * root;
        const double inv = root > 0.0 ? 1.0 / root : 0.0;
        const double dh_dq = w0 * q + g * x * (root - 0.25 * q * q * inv);
        const double dh_dpq = w0 * pq - 0.25 * g * x * q * pq * inv;
        ds[2] = -dh_dpq;
        ds[3] = dh_dq;
    }
};

using ErrorStepper = odeint::runge_kutta_fehlberg78<State>;

// Drives the controlled stepper and hands each accepted step (t0, s0) -> (t1, s1)
// to `on_step`. Returns false with `why` set when the step size underflows.
template <typename OnStep>
bool drive(const State& start, double t_max, const Flow& flow, const IntegratorOptions& opts, OnStep&& on_step,
           std::string& why, std::size_t& steps) {
    auto controlled = odeint::make_controlled<ErrorStepper>(opts.step_tol, opts.step_tol);
    const double direction = t_max >= 0.0 ? 1.0 : -1.0;
    State s = start;
    double t = 0.0;
    double dt = direction * opts.initial_step;
    while (direction * (t_max - t) > 0.0) {
        if (direction * (t + dt - t_max) > 0.0) dt = t_max - t;
        const State s0 = s;
        const double t0 = t;
        const auto result = controlled.try_step(flow, s, t, dt);
        if (result == odeint::success) {
            if (jz_of(s) > 1.0 - opts.pole_margin) {
                const double taken = t - t0;
                s = s0;
                t = t0;
                dt = 0.5 * taken;
            } else {
                ++steps;
                on_step(t0, s0, t, s);
                continue;
            }
        }
        if (std::abs(dt) < opts.min_step) {
            why = "step size underflow at t=" + std::to_string(t) + " (jz=" + std::to_string(jz_of(s)) + ")";
            return false;
        }
    }
    return true;
}

}  // namespace

Trajectory integrate_trajectory(const PhaseSpacePoint& initial, double t_max, const ModelParams& params,
                                const IntegratorOptions& opts) {
    if (!(std::abs(initial.jz) <= 1.0)) throw std::domain_error("integrate_trajectory: |jz| > 1");
    const double e0 = classical_energy(initial, params);
    if (!std::isfinite(e0)) throw std::domain_error("integrate_trajectory: non-finite initial energy");

    Trajectory out;
    out.samples.push_back({0.0, initial, e0});
    const Flow flow{params};
    double next_sample = opts.sample_interval;
    auto on_step = [&](double, const State&, double t1, const State& s1) {
        const auto pt = to_point(s1);
        const double e = classical_energy(pt, params);
        out.max_energy_drift = std::max(out.max_energy_drift, std::abs(e - e0));
        const bool last = std::abs(t1 - t_max) == 0.0;
        if (opts.sample_interval <= 0.0 || std::abs(t1) >= next_sample || last) {
            out.samples.push_back({t1, pt, e});
            if (opts.sample_interval > 0.0) {
                while (next_sample <= std::abs(t1)) next_sample += opts.sample_interval;
            }
        }
    };
    out.complete = drive(to_state(initial), t_max, flow, opts, on_step, out.diagnostic, out.steps);
    return out;
}

SectionResult poincare_section(double eps0, std::span<const PhaseSpacePoint> seeds, double t_max,
                               const ModelParams& params, const IntegratorOptions& opts) {
    SectionResult out;
    const Flow flow{params};
    ErrorStepper stepper;
    for (std::size_t id = 0; id < seeds.size(); ++id) {
        const auto& seed = seeds[id];
        const double e = classical_energy(seed, params);
        if (std::abs(e - eps0) > 1e-8 * std::max(1.0, std::abs(eps0))) {
            throw std::invalid_argument("poincare_section: seed " + std::to_string(id) + " is off the energy surface");
        }
        std::vector<SectionPoint> found;
        double worst_drift = 0.0;
        auto on_step = [&](double t0, const State& s0, double t1, const State& s1) {
            worst_drift = std::max(worst_drift, std::abs(classical_energy(to_point(s1), params) - eps0));
            if (!(s0[1] > 0.0 && s1[1] <= 0.0)) return;
            // Bisection on the local Runge-Kutta solution from the step start.
            double lo = 0.0, hi = t1 - t0;
            State at{};
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                stepper.do_step(flow, s0, t0, at, mid);
                if (at[1] > 0.0) lo = mid;
                else hi = mid;
                if (std::abs(at[1]) < 1e-14 || std::abs(hi - lo) < 1e-15) break;
            }
            stepper.do_step(flow, s0, t0, at, 0.5 * (lo + hi));
            const auto pt = to_point(at);
            found.push_back({wrap_angle(pt.phi), pt.jz, t0 + 0.5 * (lo + hi), id});
        };
        std::string why;
        std::size_t steps = 0;
        const bool ok = drive(to_state(seed), t_max, flow, opts, on_step, why, steps);
        if (!ok) {
            out.diagnostics.push_back("trajectory " + std::to_string(id) + " dropped: " + why);
            continue;
        }
        if (worst_drift > opts.drift_tol) {
            out.diagnostics.push_back("trajectory " + std::to_string(id) + " dropped: energy drift " +
                                      std::to_string(worst_drift));
            continue;
        }
        out.points.insert(out.points.end(), found.begin(), found.end());
    }
    return out;
}

Occupancy section_occupancy(std::span<const SectionPoint> points, double eps0, const ModelParams& params,
                            std::size_t bins) {
    Occupancy occ;
    const auto range = allowed_jz_interval(eps0, params, 0.0);
    if (!range || bins == 0) return occ;
    const auto [jz_lo, jz_hi] = *range;
    const double jz_span = std::max(jz_hi - jz_lo, 1e-300);
    const double phi_lo = -std::numbers::pi;
    const double phi_span = 2.0 * std::numbers::pi;

    auto allowed_at = [&](double phi, double jz) {
        const double b = params.coupling * std::sqrt(std::max(0.0, 1.0 - jz * jz)) * std::cos(phi);
        return b * b - 2.0 * params.omega * (params.omega0 * jz - eps0) >= 0.0;
    };
    constexpr int kSub = 5;
    std::vector<std::uint8_t> allowed(bins * bins, 0), hit(bins * bins, 0);
    for (std::size_t a = 0; a < bins; ++a) {
        for (std::size_t b = 0; b < bins; ++b) {
            bool any = false;
            for (int u = 0; u <= kSub && !any; ++u) {
                for (int v = 0; v <= kSub && !any; ++v) {
                    const double phi = phi_lo + phi_span * (a + static_cast<double>(u) / kSub) / bins;
                    const double jz = jz_lo + jz_span * (b + static_cast<double>(v) / kSub) / bins;
                    any = allowed_at(phi, jz);
                }
            }
            allowed[a * bins + b] = any ? 1 : 0;
        }
    }
    for (const auto& sp : points) {
        const double fa = (sp.phi - phi_lo) / phi_span * bins;
        const double fb = (sp.jz - jz_lo) / jz_span * bins;
        if (fa < 0.0 || fb < 0.0) continue;
        const auto a = std::min(bins - 1, static_cast<std::size_t>(fa));
        const auto b = std::min(bins - 1, static_cast<std::size_t>(fb));
        if (fb >= bins + 1.0) continue;
        hit[a * bins + b] = 1;
    }
    for (std::size_t i = 0; i < bins * bins; ++i) {
        occ.allowed += allowed[i];
        occ.occupied += (allowed[i] && hit[i]) ? 1 : 0;
    }
    return occ;
}

}  // namespace dicke
