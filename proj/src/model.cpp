#include "dicke/model.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dicke/errors.hpp"

namespace dicke {

std::string to_string(Parity p) {
    switch (p) {
        case Parity::positive: return "positive";
        case Parity::negative: return "negative";
        case Parity::both: return "both";
    }
    return "both";
}

Parity parity_from_string(const std::string& s) {
    if (s == "positive" || s == "+" || s == "+1") return Parity::positive;
    if (s == "negative" || s == "-" || s == "-1") return Parity::negative;
    if (s == "both" || s == "all") return Parity::both;
    throw ConfigError("unknown parity selector '" + s + "'");
}

double ModelParams::critical_coupling() const { return std::sqrt(omega * omega0); }

void ModelParams::validate() const {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("omega must be positive");
    if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw ConfigError("omega0 must be positive");
    if (!(coupling >= 0.0) || !std::isfinite(coupling)) throw ConfigError("coupling must be non-negative");
    if (two_j < 1) throw ConfigError("2j must be a positive integer");
    if (n_max < 1) throw ConfigError("n_max must be at least 1");
}

ModelParams make_params(double omega, double omega0, double coupling, double j, int n_max) {
    const double twice = 2.0 * j;
    if (std::abs(twice - std::round(twice)) > 1e-9) {
        throw ConfigError("j must be a multiple of 1/2");
    }
    ModelParams p;
    p.omega = omega;
    p.omega0 = omega0;
    p.coupling = coupling;
    p.two_j = static_cast<int>(std::lround(twice));
    p.n_max = n_max;
    p.validate();
    return p;
}

int BasisState::parity(double j) const {
    const long exponent = n + std::lround(m + j);
    return (exponent % 2 == 0) ? 1 : -1;
}

namespace {

bool in_block(int n, int k, Parity block) {
    if (block == Parity::both) return true;
    const bool even = (n + k) % 2 == 0;
    return (block == Parity::positive) == even;
}

}  // namespace

Basis::Basis(const ModelParams& params, Parity block) : params_(params), block_(block) {
    params_.validate();
    params_.parity = block;
    const int spin_dim = params_.two_j + 1;
    const std::size_t product_dim = static_cast<std::size_t>(params_.n_max + 1) * spin_dim;
    product_to_block_.assign(product_dim, -1);
    states_.reserve(block == Parity::both ? product_dim : product_dim / 2 + 1);
    const double j = params_.j();
    for (int n = 0; n <= params_.n_max; ++n) {
        for (int k = 0; k < spin_dim; ++k) {
            if (!in_block(n, k, block)) continue;
            const std::size_t idx = states_.size();
            states_.push_back({n, k - j, idx});
            product_to_block_[static_cast<std::size_t>(n) * spin_dim + k] = static_cast<std::ptrdiff_t>(idx);
        }
    }
}

std::optional<std::size_t> Basis::find(int n, double m) const {
    const long k = std::lround(m + params_.j());
    if (n < 0 || n > params_.n_max || k < 0 || k > params_.two_j) return std::nullopt;
    const auto pos = product_to_block_[static_cast<std::size_t>(n) * (params_.two_j + 1) + k];
    if (pos < 0) return std::nullopt;
    return static_cast<std::size_t>(pos);
}

Basis build_basis(const ModelParams& params, Parity block) { return Basis(params, block); }

Eigen::MatrixXd build_hamiltonian(const Basis& basis, std::size_t max_block_dim) {
    const std::size_t dim = basis.size();
    if (dim > max_block_dim) {
        std::ostringstream os;
        os << "block dimension " << dim << " exceeds the configured maximum " << max_block_dim;
        throw ConfigError(os.str());
    }
    const auto& p = basis.params();
    const double j = p.j();
    const double g = p.coupling / std::sqrt(2.0 * j);

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const auto& s : basis.states()) {
        const auto i = static_cast<Eigen::Index>(s.index);
        h(i, i) = p.omega * s.n + p.omega0 * s.m;
        if (g == 0.0 || s.n == p.n_max) continue;
        // a^dag raises n; J_x = (J_+ + J_-)/2 moves m by one either way.
        const double boson = std::sqrt(static_cast<double>(s.n + 1));
        for (int dm : {+1, -1}) {
            const double m2 = s.m + dm;
            auto target = basis.find(s.n + 1, m2);
            if (!target) continue;
            const double spin = 0.5 * std::sqrt(j * (j + 1.0) - s.m * m2);
            const auto t = static_cast<Eigen::Index>(*target);
            h(i, t) = g * boson * spin;
            h(t, i) = h(i, t);
        }
    }
    return h;
}

Eigen::MatrixXd build_hamiltonian(const ModelParams& params, Parity block, std::size_t max_block_dim) {
    return build_hamiltonian(Basis(params, block), max_block_dim);
}

namespace {

lapack_int checked_dim(const Eigen::MatrixXd& h, const std::string& label) {
    if (h.rows() != h.cols()) throw std::invalid_argument(label + ": matrix is not square");
    return static_cast<lapack_int>(h.rows());
}

}  // namespace

EigenSystem diagonalize(Eigen::MatrixXd h, const std::string& label) {
    const lapack_int n = checked_dim(h, label);
    EigenSystem out;
    out.values.resize(n);
    if (n == 0) return out;
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, h.data(), n, out.values.data());
    if (info != 0) {
        throw ConvergenceError("eigensolver failed for " + label + " (dsyevd info=" + std::to_string(info) + ")");
    }
    out.vectors = std::move(h);
    return out;
}

Eigen::VectorXd eigenvalues_only(Eigen::MatrixXd h, const std::string& label) {
    const lapack_int n = checked_dim(h, label);
    Eigen::VectorXd values(n);
    if (n == 0) return values;
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n, h.data(), n, values.data());
    if (info != 0) {
        throw ConvergenceError("eigensolver failed for " + label + " (dsyevd info=" + std::to_string(info) + ")");
    }
    return values;
}

Digest params_digest(const ModelParams& params, Parity block, const ConvergenceOptions& conv) {
    std::ostringstream os;
    os << "dicke-spectrum/1"
       << ";omega=" << exact_repr(params.omega)
       << ";omega0=" << exact_repr(params.omega0)
       << ";coupling=" << exact_repr(params.coupling)
       << ";two_j=" << params.two_j
       << ";n_max=" << params.n_max
       << ";block=" << to_string(block)
       << ";probe=" << conv.probe_delta
       << ";tol=" << exact_repr(conv.tol);
    return sha256(os.str());
}

std::size_t converged_count(const SpectralData& lo, const SpectralData& hi, double tol) {
    const auto& a = lo.params;
    const auto& b = hi.params;
    if (a.omega != b.omega || a.omega0 != b.omega0 || a.coupling != b.coupling || a.two_j != b.two_j ||
        a.parity != b.parity) {
        throw std::invalid_argument("converged_count: spectra come from different parameters");
    }
    if (a.n_max > b.n_max) throw std::invalid_argument("converged_count: lo cutoff exceeds hi cutoff");
    const double j = a.j();
    const auto n = static_cast<Eigen::Index>(std::min(lo.dim(), hi.dim()));
    Eigen::Index k = 0;
    while (k < n && std::abs(lo.eigenvalues[k] - hi.eigenvalues[k]) / j <= tol) ++k;
    return static_cast<std::size_t>(k);
}

SpectralData solve_block(const ModelParams& params, Parity block, const ConvergenceOptions& conv,
                         std::size_t max_block_dim) {
    if (block == Parity::both) throw std::invalid_argument("solve_block: select a single parity block");
    SpectralData out;
    out.params = params;
    out.params.parity = block;
    out.params_digest = params_digest(params, block, conv);

    const std::string label = "2j=" + std::to_string(params.two_j) + " n_max=" +
                              std::to_string(params.n_max) + " parity=" + to_string(block);
    auto sys = diagonalize(build_hamiltonian(params, block, max_block_dim), label);
    out.eigenvalues = std::move(sys.values);
    out.eigenvectors = std::move(sys.vectors);

    if (conv.probe_delta <= 0) {
        out.n_converged = out.dim();
        return out;
    }
    // The probe has the larger cutoff, so the count certifies the spectrum kept here.
    SpectralData probe;
    probe.params = out.params;
    probe.params.n_max = params.n_max + conv.probe_delta;
    probe.eigenvalues = eigenvalues_only(build_hamiltonian(probe.params, block, max_block_dim), label + " probe");
    out.n_converged = converged_count(out, probe, conv.tol);
    return out;
}

double ground_energy_intensive(const SpectralData& spectra, double j) {
    if (spectra.dim() == 0) throw std::invalid_argument("ground_energy_intensive: empty spectrum");
    return spectra.eigenvalues[0] / j;
}

double orthonormality_error(const Eigen::MatrixXd& vectors) {
    if (vectors.size() == 0) return 0.0;
    const Eigen::MatrixXd gram = vectors.transpose() * vectors;
    return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

}  // namespace dicke
