#pragma once

#include "romfsm/types.hpp"

#include <cstdint>
#include <cstring>
#include <string_view>

namespace romfsm {

/// Streaming FNV-1a (64-bit). Used for content hashes of artifacts and for
/// cache keys; not cryptographic.
class Fnv1a {
public:
    Fnv1a& bytes(const void* p, std::size_t len) {
        const auto* c = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < len; ++i) {
            h_ ^= c[i];
            h_ *= 1099511628211ull;
        }
        return *this;
    }
    Fnv1a& add(double v) { return bytes(&v, sizeof v); }
    Fnv1a& add(std::uint64_t v) { return bytes(&v, sizeof v); }
    Fnv1a& add(std::int64_t v) { return bytes(&v, sizeof v); }
    Fnv1a& add(int v) { return add(static_cast<std::int64_t>(v)); }
    Fnv1a& add(std::string_view s) { return bytes(s.data(), s.size()); }
    Fnv1a& add(const Vec& v) { return bytes(v.data(), sizeof(double) * v.size()); }
    Fnv1a& add(const Mat& m) { return bytes(m.data(), sizeof(double) * m.size()); }
    std::uint64_t value() const { return h_; }

private:
    std::uint64_t h_ = 14695981039346656037ull;
};

std::uint64_t hash_file(const std::string& path);

}  // namespace romfsm
