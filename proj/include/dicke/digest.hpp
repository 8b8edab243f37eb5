#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace dicke {

struct Digest {
    std::array<std::uint8_t, 32> bytes{};

    std::string hex() const;
    bool operator==(const Digest&) const = default;
};

// SHA-256 of an arbitrary byte string.
Digest sha256(std::string_view data);

// Exact, locale-independent text form of a double (hexfloat), for hashing.
std::string exact_repr(double value);

}  // namespace dicke
