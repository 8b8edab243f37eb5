#include "dicke/digest.hpp"

#include <openssl/evp.h>

#include <iomanip>
#include <locale>
#include <sstream>
#include <stdexcept>

namespace dicke {

std::string Digest::hex() const {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * bytes.size());
    for (auto b : bytes) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 0xF]);
    }
    return out;
}

Digest sha256(std::string_view data) {
    Digest d;
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), d.bytes.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != d.bytes.size()) {
        throw std::runtime_error("sha256: digest computation failed");
    }
    return d;
}

std::string exact_repr(double value) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::hexfloat << value;
    return os.str();
}

}  // namespace dicke
