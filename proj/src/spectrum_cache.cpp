#include "dicke/spectrum_cache.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <system_error>

#include "dicke/errors.hpp"

namespace dicke {

static_assert(std::endian::native == std::endian::little, "spectrum files assume a little-endian host");

namespace {

constexpr char kMagic[4] = {'D', 'C', 'K', 'S'};

template <typename T>
void put(std::ostream& os, T value) {
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& is, const std::filesystem::path& path) {
    T value{};
    if (!is.read(reinterpret_cast<char*>(&value), sizeof(T))) {
        throw CacheError("truncated spectrum file " + path.string());
    }
    return value;
}

}  // namespace

void write_spectrum(const std::filesystem::path& path, const SpectralData& spectra) {
    const auto dim = static_cast<std::uint64_t>(spectra.dim());
    if (static_cast<std::uint64_t>(spectra.eigenvectors.rows()) != dim ||
        static_cast<std::uint64_t>(spectra.eigenvectors.cols()) != dim) {
        throw std::invalid_argument("write_spectrum: eigenvector matrix does not match the spectrum");
    }
    // Write to a temporary name first so a crash never leaves a partial entry.
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw CacheError("cannot open " + tmp.string() + " for writing");
        os.write(kMagic, 4);
        put<std::uint32_t>(os, kSpectrumFormatVersion);
        os.write(reinterpret_cast<const char*>(spectra.params_digest.bytes.data()), 32);
        put<std::uint64_t>(os, dim);
        put<std::uint64_t>(os, spectra.n_converged);
        os.write(reinterpret_cast<const char*>(spectra.eigenvalues.data()),
                 static_cast<std::streamsize>(dim * sizeof(double)));
        os.write(reinterpret_cast<const char*>(spectra.eigenvectors.data()),
                 static_cast<std::streamsize>(dim * dim * sizeof(double)));
        if (!os) throw CacheError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

SpectralData read_spectrum(const std::filesystem::path& path, const ModelParams& params, const Digest& expected) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw CacheError("cannot open spectrum file " + path.string());
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw CacheError("bad magic in " + path.string());
    }
    const auto version = get<std::uint32_t>(is, path);
    if (version != kSpectrumFormatVersion) {
        throw CacheError("unsupported spectrum format version " + std::to_string(version));
    }
    SpectralData out;
    out.params = params;
    if (!is.read(reinterpret_cast<char*>(out.params_digest.bytes.data()), 32)) {
        throw CacheError("truncated spectrum file " + path.string());
    }
    if (!(out.params_digest == expected)) throw CacheError("digest mismatch in " + path.string());
    const auto dim = get<std::uint64_t>(is, path);
    const auto n_conv = get<std::uint64_t>(is, path);
    const Basis expected_basis(params, params.parity);
    if (dim != expected_basis.size() || n_conv > dim) {
        throw CacheError("inconsistent header in " + path.string());
    }
    const auto n = static_cast<Eigen::Index>(dim);
    out.n_converged = n_conv;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    if (!is.read(reinterpret_cast<char*>(out.eigenvalues.data()), static_cast<std::streamsize>(dim * sizeof(double))) ||
        !is.read(reinterpret_cast<char*>(out.eigenvectors.data()),
                 static_cast<std::streamsize>(dim * dim * sizeof(double)))) {
        throw CacheError("truncated spectrum file " + path.string());
    }
    if (is.peek() != std::char_traits<char>::eof()) throw CacheError("trailing bytes in " + path.string());
    return out;
}

SpectrumCache::SpectrumCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw CacheError("cannot create cache directory " + dir_.string() + ": " + ec.message());
}

std::filesystem::path SpectrumCache::path_for(const Digest& digest) const { return dir_ / (digest.hex() + ".dcks"); }

SpectralData SpectrumCache::get_or_solve(const ModelParams& params, Parity block, const ConvergenceOptions& conv,
                                         std::size_t max_block_dim) {
    const auto digest = params_digest(params, block, conv);
    const auto path = path_for(digest);
    if (std::filesystem::exists(path)) {
        auto p = params;
        p.parity = block;
        ++hits_;
        return read_spectrum(path, p, digest);
    }
    ++misses_;
    auto spectra = solve_block(params, block, conv, max_block_dim);
    write_spectrum(path, spectra);
    return spectra;
}

}  // namespace dicke
