#pragma once

#include <cstdint>
#include <string_view>

namespace scenedet {

// FNV-1a, 64-bit. Used for all feature hashing so bucket layouts are
// stable across platforms and runs.
inline std::uint64_t fnv1a64(std::string_view s)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace scenedet
