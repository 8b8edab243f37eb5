#pragma once

// Binary spectrum files, one per (parameters, parity block).
//
//   "DCKS" | u32 version | 32-byte params digest | u64 dim | u64 n_converged
//   | dim eigenvalues | dim*dim eigenvector entries, column-major
//
// All numbers little-endian; reals are IEEE-754 binary64.

#include <atomic>
#include <filesystem>
#include <optional>

#include "dicke/model.hpp"

namespace dicke {

inline constexpr std::uint32_t kSpectrumFormatVersion = 1;

void write_spectrum(const std::filesystem::path& path, const SpectralData& spectra);

// Reads a spectrum file. `params` supplies the metadata not stored on disk;
// the stored digest must equal `expected`. Throws CacheError on any mismatch
// or truncation.
SpectralData read_spectrum(const std::filesystem::path& path, const ModelParams& params, const Digest& expected);

class SpectrumCache {
public:
    explicit SpectrumCache(std::filesystem::path dir);

    std::filesystem::path path_for(const Digest& digest) const;

    // Cached block, or a fresh solve that is then stored.
    SpectralData get_or_solve(const ModelParams& params, Parity block, const ConvergenceOptions& conv,
                              std::size_t max_block_dim = kDefaultMaxBlockDim);

    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }

private:
    std::filesystem::path dir_;
    std::atomic<std::size_t> hits_{0};
    std::atomic<std::size_t> misses_{0};
};

}  // namespace dicke
