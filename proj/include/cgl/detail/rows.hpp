#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "cgl/errors.hpp"
#include "cgl/interface.hpp"

namespace cgl::detail {

// First column of D per row for a box with columns <= col_hi and rows
// <= top. Row y of D spans [xlo(y), col_hi]; rows only widen upward.
struct RowLayout {
    int32_t y_min = 0;
    std::vector<int32_t> xlo;
    int32_t at(int32_t y) const { return xlo[(size_t)(y - y_min)]; }
};

inline RowLayout make_row_layout(const InitialInterface& ifc, int32_t top, int32_t col_hi) {
    if (top < 1 || col_hi < 1) throw ParameterError("box extent must be >= 1");
    if ((int64_t)ifc.beta.size() < col_hi)
        throw CoverageError("interface beta arm holds " + std::to_string(ifc.beta.size()) +
                            " corners, box needs B_" + std::to_string(col_hi));
    if ((int64_t)ifc.alpha.size() < top)
        throw CoverageError("interface alpha arm holds " + std::to_string(ifc.alpha.size()) +
                            " corners, box needs A_" + std::to_string(top));
    RowLayout L;
    L.y_min = ifc.beta[(size_t)col_hi - 1] + 1;
    L.xlo.reserve((size_t)(top - L.y_min + 1));
    // below the axis, xlo(y) is the first column m with beta_m <= y-1;
    // the pointer only moves down as y rises
    int32_t m = col_hi;
    for (int32_t y = L.y_min; y <= 0; ++y) {
        while (m > 1 && ifc.beta[(size_t)m - 2] <= y - 1) --m;
        L.xlo.push_back(m);
    }
    for (int32_t y = 1; y <= top; ++y) L.xlo.push_back(ifc.alpha[(size_t)y - 1] + 1);
    return L;
}

} // namespace cgl::detail
