#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>

namespace cgl {

// Lattice site z = (x, y). The partial order is componentwise.
struct Site {
    int32_t x = 0;
    int32_t y = 0;

    friend bool operator==(Site a, Site b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(Site a, Site b) { return !(a == b); }
    friend Site operator+(Site a, Site b) { return {a.x + b.x, a.y + b.y}; }
    friend Site operator-(Site a, Site b) { return {a.x - b.x, a.y - b.y}; }
};

inline bool leq(Site a, Site b) { return a.x <= b.x && a.y <= b.y; }
inline int64_t l1(Site a) { return std::abs((int64_t)a.x) + std::abs((int64_t)a.y); }

inline std::string to_string(Site z) {
    return "(" + std::to_string(z.x) + "," + std::to_string(z.y) + ")";
}

// Closed axis-aligned box [lo.x, hi.x] x [lo.y, hi.y].
struct LatticeBox {
    Site lo;
    Site hi;

    bool contains(Site z) const { return leq(lo, z) && leq(z, hi); }
    int64_t width() const { return (int64_t)hi.x - lo.x + 1; }
    int64_t height() const { return (int64_t)hi.y - lo.y + 1; }
    int64_t count() const { return width() * height(); }
};

} // namespace cgl
