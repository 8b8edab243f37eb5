#pragma once

// Dicke Hamiltonian in the truncated Fock x pseudo-spin basis.
//
//   H = omega a^dag a + omega0 J_z + coupling / sqrt(2j) (a^dag + a) J_x
//
// The basis is ordered n-major, m-minor. Parity (-1)^(n + m + j) commutes
// with H, so each parity block is diagonalized on its own.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dicke/digest.hpp"

namespace dicke {

enum class Parity { positive, negative, both };

std::string to_string(Parity p);
Parity parity_from_string(const std::string& s);

struct ModelParams {
    double omega{1.0};      // boson frequency
    double omega0{1.0};     // qubit splitting
    double coupling{2.0};   // Rabi splitting
    int two_j{2};           // 2j, pseudo-spin length times two
    int n_max{1};           // bosonic cutoff
    Parity parity{Parity::both};

    double j() const { return 0.5 * two_j; }
    double critical_coupling() const;

    // Throws ConfigError when an invariant does not hold.
    void validate() const;
};

// Parameters from a (possibly half-integer) j value; throws if 2j is not integral.
ModelParams make_params(double omega, double omega0, double coupling, double j, int n_max);

struct BasisState {
    int n{0};                 // Fock occupation
    double m{0.0};            // J_z eigenvalue
    std::size_t index{0};     // position in the owning basis

    // (-1)^(n + m + j)
    int parity(double j) const;
};

class Basis {
public:
    Basis(const ModelParams& params, Parity block);

    const ModelParams& params() const { return params_; }
    Parity block() const { return block_; }
    std::size_t size() const { return states_.size(); }
    const std::vector<BasisState>& states() const { return states_; }
    const BasisState& operator[](std::size_t i) const { return states_[i]; }

    // Position of (n, m) in this basis, or nullopt when absent.
    std::optional<std::size_t> find(int n, double m) const;

private:
    ModelParams params_;
    Parity block_;
    std::vector<BasisState> states_;
    std::vector<std::ptrdiff_t> product_to_block_;   // -1 for states outside the block
};

Basis build_basis(const ModelParams& params, Parity block);

inline constexpr std::size_t kDefaultMaxBlockDim = 20000;

// Dense real symmetric Hamiltonian over the block basis.
Eigen::MatrixXd build_hamiltonian(const Basis& basis, std::size_t max_block_dim = kDefaultMaxBlockDim);
Eigen::MatrixXd build_hamiltonian(const ModelParams& params, Parity block,
                                  std::size_t max_block_dim = kDefaultMaxBlockDim);

struct EigenSystem {
    Eigen::VectorXd values;    // ascending
    Eigen::MatrixXd vectors;   // orthonormal columns; empty when only values were requested
};

// Full dense symmetric eigendecomposition (LAPACK dsyevd). The matrix is
// consumed. `label` identifies the block in error messages.
EigenSystem diagonalize(Eigen::MatrixXd h, const std::string& label = "matrix");
Eigen::VectorXd eigenvalues_only(Eigen::MatrixXd h, const std::string& label = "matrix");

struct ConvergenceOptions {
    // Certification compares against an eigenvalue-only solve at n_max + probe_delta.
    // Zero disables certification and marks every level converged.
    int probe_delta{20};
    double tol{1e-8};   // on scaled energies E/j
};

struct SpectralData {
    ModelParams params;        // parity field holds the block
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    std::size_t n_converged{0};
    Digest params_digest;

    std::size_t dim() const { return static_cast<std::size_t>(eigenvalues.size()); }
    Parity block() const { return params.parity; }
};

// Content hash of the generating parameters, block and certification settings.
Digest params_digest(const ModelParams& params, Parity block, const ConvergenceOptions& conv);

// Largest K with |E_k(lo) - E_k(hi)| / j <= tol for every k < K.
// `lo` and `hi` must differ only in n_max (lo.n_max < hi.n_max).
std::size_t converged_count(const SpectralData& lo, const SpectralData& hi, double tol);

// Build, diagonalize and certify one parity block.
SpectralData solve_block(const ModelParams& params, Parity block, const ConvergenceOptions& conv = {},
                         std::size_t max_block_dim = kDefaultMaxBlockDim);

// E_0 / j
double ground_energy_intensive(const SpectralData& spectra, double j);

// Largest |V^T V - I| entry.
double orthonormality_error(const Eigen::MatrixXd& vectors);

}  // namespace dicke
