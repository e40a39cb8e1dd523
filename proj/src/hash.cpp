#include "qcycle/hash.hpp"

#include <cstdio>

namespace qcycle {

std::string hex_hash(uint64_t value) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return std::string(buf);
}

}  // namespace qcycle
