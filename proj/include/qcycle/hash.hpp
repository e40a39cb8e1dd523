// hash.hpp — FNV-1a 64-bit hashing for deterministic content stamps

#pragma once

#include <cstdint>
#include <cstring>
#include <string>

namespace qcycle {

class Fnv1a {
  public:
    Fnv1a& add_bytes(const void* data, size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < n; ++i) {
            state_ ^= p[i];
            state_ *= 0x100000001b3ULL;
        }
        return *this;
    }
    Fnv1a& add(double v) { return add_bytes(&v, sizeof(v)); }
    Fnv1a& add(uint64_t v) { return add_bytes(&v, sizeof(v)); }
    Fnv1a& add(const std::string& s) { return add_bytes(s.data(), s.size()); }
    uint64_t value() const { return state_; }

  private:
    uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string hex_hash(uint64_t value);

}  // namespace qcycle
