#pragma once

#include <cstdint>
#include <string>

namespace adstest {

// FNV-1a, used for baseline-log content hashes. Not cryptographic; only has to
// catch accidental edits and stale reuse.
inline std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

std::string hash_hex(std::uint64_t h);
std::uint64_t hash_file(const std::string& path);

} // namespace adstest
