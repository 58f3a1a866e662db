#pragma once

#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>

namespace qeeg {

/// 64-bit FNV-1a, used for content checksums in output files.
class Fnv1a {
public:
    void update(std::string_view bytes) noexcept {
        for (unsigned char c : bytes) {
            hash_ ^= c;
            hash_ *= 0x100000001b3ULL;
        }
    }
    void update(std::span<const double> values) noexcept {
        update(std::string_view(reinterpret_cast<const char*>(values.data()), values.size_bytes()));
    }
    std::uint64_t value() const noexcept { return hash_; }
    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
        return buf;
    }

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

inline std::string checksum_hex(std::string_view bytes) {
    Fnv1a h;
    h.update(bytes);
    return h.hex();
}

}  // namespace qeeg
