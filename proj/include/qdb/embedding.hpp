#pragma once

#include <cstdint>
#include <string_view>

#include "qdb/types.hpp"

namespace qdb {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Hashed bag-of-words embedding. Tokens are lowercased ASCII-alphanumeric runs
/// (bytes >= 0x80 stay inside tokens). Each token adds +/-1 to bucket
/// fnv1a64(token) % dim, the sign taken from bit 63 of the same hash. The
/// result is L2-normalised; text without tokens yields the zero vector.
Vector fallback_embed(std::string_view text, int dim);

}  // namespace qdb
