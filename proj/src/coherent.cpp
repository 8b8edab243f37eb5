#include "dicke/coherent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dicke {

CoherentLabel canonical_to_complex(const PhaseSpacePoint& point, double j, double pole_guard) {
    if (!(std::abs(point.jz) <= 1.0)) throw std::domain_error("canonical_to_complex: |jz| > 1");
    if (point.jz > 1.0 - pole_guard) {
        throw std::domain_error("canonical_to_complex: jz at the north pole, w diverges");
    }
    CoherentLabel out;
    out.beta = std::sqrt(0.5 * j) * std::complex<double>(point.x, point.p);
    const double modulus = point.jz <= -1.0 + pole_guard ? 0.0 : std::sqrt((1.0 + point.jz) / (1.0 - point.jz));
    out.w = std::polar(modulus, point.phi);
    return out;
}

double classical_energy(const PhaseSpacePoint& pt, const ModelParams& params) {
    const double radial = std::sqrt(std::max(0.0, 1.0 - pt.jz * pt.jz));
    return 0.5 * params.omega * (pt.x * pt.x + pt.p * pt.p) + params.omega0 * pt.jz +
           params.coupling * radial * pt.x * std::cos(pt.phi);
}

double classical_ground_energy(const ModelParams& params) {
    const double c2 = params.coupling * params.coupling;
    if (c2 <= params.omega * params.omega0) return -params.omega0;
    const double jz = -params.omega * params.omega0 / c2;
    return -c2 / (2.0 * params.omega) * (1.0 - jz * jz) + params.omega0 * jz;
}

BasisCoefficients basis_coeffs(const PhaseSpacePoint& point, const ModelParams& params) {
    params.validate();
    if (!(std::abs(point.jz) <= 1.0)) throw std::domain_error("basis_coeffs: |jz| > 1");
    const double j = params.j();
    const int two_j = params.two_j;
    const int spin_dim = two_j + 1;

    // Fock part: e^{-|b|^2/2} b^n / sqrt(n!)
    const std::complex<double> beta = std::sqrt(0.5 * j) * std::complex<double>(point.x, point.p);
    const double beta_abs = std::abs(beta);
    const double beta_arg = std::arg(beta);
    std::vector<std::complex<double>> fock(static_cast<std::size_t>(params.n_max + 1));
    for (int n = 0; n <= params.n_max; ++n) {
        if (beta_abs == 0.0) {
            fock[n] = n == 0 ? 1.0 : 0.0;
            continue;
        }
        const double log_amp = -0.5 * beta_abs * beta_abs + n * std::log(beta_abs) - 0.5 * std::lgamma(n + 1.0);
        fock[n] = std::polar(std::exp(log_amp), n * beta_arg);
    }

    // Bloch part: sqrt(C(2j,k)) sin^k(theta/2) cos^(2j-k)(theta/2) e^{i k phi}, k = j + m.
    // Equal to (1+|w|^2)^{-j} sqrt(C(2j,k)) w^k without the pole at jz = 1.
    const double sin_half_sq = 0.5 * (1.0 + point.jz);
    const double cos_half_sq = 0.5 * (1.0 - point.jz);
    std::vector<std::complex<double>> spin(static_cast<std::size_t>(spin_dim));
    const double log_norm = std::lgamma(two_j + 1.0);
    for (int k = 0; k < spin_dim; ++k) {
        double log_amp = 0.5 * (log_norm - std::lgamma(k + 1.0) - std::lgamma(two_j - k + 1.0));
        bool zero = false;
        if (k > 0) {
            if (sin_half_sq == 0.0) zero = true;
            else log_amp += 0.5 * k * std::log(sin_half_sq);
        }
        if (two_j - k > 0) {
            if (cos_half_sq == 0.0) zero = true;
            else log_amp += 0.5 * (two_j - k) * std::log(cos_half_sq);
        }
        spin[k] = zero ? std::complex<double>(0.0) : std::polar(std::exp(log_amp), k * point.phi);
    }

    BasisCoefficients out;
    out.point = point;
    out.params = params;
    out.values.resize(fock.size() * spin.size());
    double norm = 0.0;
    for (int n = 0; n <= params.n_max; ++n) {
        for (int k = 0; k < spin_dim; ++k) {
            const auto v = fock[n] * spin[k];
            out.values[static_cast<std::size_t>(n) * spin_dim + k] = v;
            norm += std::norm(v);
        }
    }
    out.deficit = std::max(0.0, 1.0 - norm);
    return out;
}

double EigenExpansion::energy_width() const {
    if (norm <= 0.0) return 0.0;
    double second = 0.0;
    for (std::size_t k = 0; k < coeffs_sq.size(); ++k) second += coeffs_sq[k] * scaled_energies[k] * scaled_energies[k];
    const double mean = mean_energy / norm;
    return std::sqrt(std::max(0.0, second / norm - mean * mean));
}

namespace {

void check_compatible(const BasisCoefficients& c, const SpectralData& s) {
    const auto& a = c.params;
    const auto& b = s.params;
    if (a.omega != b.omega || a.omega0 != b.omega0 || a.coupling != b.coupling || a.two_j != b.two_j ||
        a.n_max != b.n_max) {
        throw std::invalid_argument("eigen_expansion: coefficients and spectrum use different parameters");
    }
    if (s.eigenvectors.rows() != static_cast<Eigen::Index>(s.dim()) ||
        s.eigenvectors.cols() != static_cast<Eigen::Index>(s.dim())) {
        throw std::invalid_argument("eigen_expansion: spectrum carries no eigenvectors");
    }
}

struct BlockResult {
    const SpectralData* block;
    Eigen::MatrixXd weights;   // dim x points, |c_k|^2
};

}  // namespace

std::vector<EigenExpansion> eigen_expansions(std::span<const BasisCoefficients> coeffs,
                                             std::span<const SpectralData* const> blocks, double tail_budget) {
    if (blocks.empty()) throw std::invalid_argument("eigen_expansion: no spectrum blocks");
    const auto n_points = static_cast<Eigen::Index>(coeffs.size());
    std::vector<BlockResult> results;
    results.reserve(blocks.size());

    for (const SpectralData* block : blocks) {
        for (const auto& c : coeffs) check_compatible(c, *block);
        const Basis basis(block->params, block->block());
        if (basis.size() != block->dim()) throw std::invalid_argument("eigen_expansion: block dimension mismatch");
        const int spin_dim = block->params.two_j + 1;
        const auto dim = static_cast<Eigen::Index>(basis.size());

        Eigen::MatrixXd re(dim, n_points), im(dim, n_points);
        bool has_imag = false;
        for (Eigen::Index p = 0; p < n_points; ++p) {
            const auto& values = coeffs[static_cast<std::size_t>(p)].values;
            for (const auto& s : basis.states()) {
                const auto k = static_cast<std::size_t>(std::lround(s.m + block->params.j()));
                const auto& v = values[static_cast<std::size_t>(s.n) * spin_dim + k];
                re(static_cast<Eigen::Index>(s.index), p) = v.real();
                im(static_cast<Eigen::Index>(s.index), p) = v.imag();
                has_imag = has_imag || v.imag() != 0.0;
            }
        }
        Eigen::MatrixXd c_re = block->eigenvectors.transpose() * re;
        Eigen::MatrixXd w = c_re.cwiseAbs2();
        if (has_imag) w += (block->eigenvectors.transpose() * im).cwiseAbs2();
        results.push_back({block, std::move(w)});
    }

    // Merge block spectra into one ascending list.
    struct Level {
        double energy;
        std::size_t block;
        Eigen::Index k;
    };
    std::vector<Level> levels;
    for (std::size_t b = 0; b < results.size(); ++b) {
        const auto& ev = results[b].block->eigenvalues;
        for (Eigen::Index k = 0; k < ev.size(); ++k) levels.push_back({ev[k], b, k});
    }
    std::stable_sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) { return a.energy < b.energy; });

    const auto& first = blocks.front()->params;
    const double j = first.j();
    const Parity parity = blocks.size() == 1 ? blocks.front()->block() : Parity::both;

    std::vector<EigenExpansion> out(coeffs.size());
    for (Eigen::Index p = 0; p < n_points; ++p) {
        auto& e = out[static_cast<std::size_t>(p)];
        e.source_point = coeffs[static_cast<std::size_t>(p)].point;
        e.deficit = coeffs[static_cast<std::size_t>(p)].deficit;
        e.two_j = first.two_j;
        e.parity = parity;
        e.coeffs_sq.reserve(levels.size());
        e.scaled_energies.reserve(levels.size());
        e.level_converged.reserve(levels.size());
        for (const auto& lv : levels) {
            const double w = results[lv.block].weights(lv.k, p);
            const bool ok = static_cast<std::size_t>(lv.k) < results[lv.block].block->n_converged;
            const double eps = lv.energy / j;
            e.coeffs_sq.push_back(w);
            e.scaled_energies.push_back(eps);
            e.level_converged.push_back(ok ? 1 : 0);
            e.norm += w;
            e.mean_energy += w * eps;
            if (!ok) e.tail_weight += w;
        }
        e.converged = e.tail_weight <= tail_budget && e.deficit <= tail_budget;
    }
    return out;
}

EigenExpansion eigen_expansion(const BasisCoefficients& coeffs, std::span<const SpectralData* const> blocks,
                               double tail_budget) {
    return std::move(eigen_expansions(std::span(&coeffs, 1), blocks, tail_budget).front());
}

EigenExpansion eigen_expansion(const BasisCoefficients& coeffs, const SpectralData& block, double tail_budget) {
    const SpectralData* blocks[] = {&block};
    return eigen_expansion(coeffs, blocks, tail_budget);
}

EigenExpansion eigen_expansion(const BasisCoefficients& coeffs, const SpectralData& positive,
                               const SpectralData& negative, double tail_budget) {
    const SpectralData* blocks[] = {&positive, &negative};
    return eigen_expansion(coeffs, blocks, tail_budget);
}

std::optional<double> solve_xplus(double eps0, double phi, double jz, const ModelParams& params) {
    if (!(std::abs(jz) <= 1.0)) return std::nullopt;
    const double b = params.coupling * std::sqrt(std::max(0.0, 1.0 - jz * jz)) * std::cos(phi);
    const double disc = b * b - 2.0 * params.omega * (params.omega0 * jz - eps0);
    if (disc < 0.0) return std::nullopt;
    return (-b + std::sqrt(disc)) / params.omega;
}

std::optional<std::pair<double, double>> allowed_jz_interval(double eps0, const ModelParams& params, double phi) {
    // disc(jz) = -a jz^2 - 2 w w0 jz + a + 2 w eps0 with a = (coupling cos phi)^2
    const double a = std::pow(params.coupling * std::cos(phi), 2);
    const double lin = 2.0 * params.omega * params.omega0;
    const double c0 = a + 2.0 * params.omega * eps0;
    double lo = -1.0;
    double hi = 1.0;
    if (a == 0.0) {
        hi = std::min(hi, c0 / lin);
    } else {
        const double d = lin * lin + 4.0 * a * c0;
        if (d < 0.0) return std::nullopt;
        const double s = std::sqrt(d);
        lo = std::max(lo, (-lin - s) / (2.0 * a));
        hi = std::min(hi, (-lin + s) / (2.0 * a));
    }
    if (lo > hi) return std::nullopt;
    return std::make_pair(lo, hi);
}

SurfaceSample surface_sample(double eps0, std::span<const double> jz_grid, const ModelParams& params, double phi) {
    SurfaceSample out;
    if (eps0 < classical_ground_energy(params)) {
        for (double jz : jz_grid) out.skipped.emplace_back(jz, "energy below the classical minimum");
        return out;
    }
    for (double jz : jz_grid) {
        if (!(std::abs(jz) <= 1.0)) {
            out.skipped.emplace_back(jz, "jz outside [-1, 1]");
            continue;
        }
        auto x = solve_xplus(eps0, phi, jz, params);
        if (!x) {
            out.skipped.emplace_back(jz, "no real root on the energy surface");
            continue;
        }
        out.points.push_back({*x, 0.0, phi, jz});
    }
    return out;
}

std::vector<double> uniform_jz_grid(double eps0, const ModelParams& params, std::size_t count, double phi) {
    std::vector<double> grid;
    auto range = allowed_jz_interval(eps0, params, phi);
    if (!range || count == 0) return grid;
    const auto [lo, hi] = *range;
    if (count == 1) return {0.5 * (lo + hi)};
    grid.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    return grid;
}

}  // namespace dicke
