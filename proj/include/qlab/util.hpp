#pragma once

#include <cstdint>

#include "qlab/errors.hpp"

namespace qlab {

/// Hard cap on exhaustive enumerations (points, lines, candidate spaces).
inline constexpr uint64_t kEnumerationLimit = 1ull << 24;

inline uint64_t upow(uint64_t base, unsigned e) {
    uint64_t r = 1;
    for (unsigned i = 0; i < e; ++i) {
        if (base != 0 && r > UINT64_MAX / base) throw ResourceError("qlab: size overflows");
        r *= base;
    }
    return r;
}

} // namespace qlab
