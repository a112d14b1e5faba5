#include "qdb/embedding.hpp"

#include <cctype>
#include <string>

#include "qdb/error.hpp"

namespace qdb {

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

bool is_token_byte(unsigned char c) { return c >= 0x80 || std::isalnum(c) != 0; }

}  // namespace

Vector fallback_embed(std::string_view text, int dim) {
    if (dim < 8) throw Error(ErrorCode::invalid_argument, "fallback embedding dim must be >= 8");
    Vector v = Vector::Zero(dim);
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        const std::uint64_t h = fnv1a64(token);
        const auto bucket = static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(dim));
        v[bucket] += (h >> 63) ? -1.0 : 1.0;
        token.clear();
    };
    for (unsigned char c : text) {
        if (is_token_byte(c)) {
            token.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
        } else {
            flush();
        }
    }
    flush();
    const double norm = v.norm();
    if (norm > 0.0) v /= norm;
    return v;
}

}  // namespace qdb
