#pragma once

#include <cstdint>
#include <vector>

#include "cgl/interface.hpp"
#include "cgl/lattice.hpp"
#include "cgl/weights.hpp"

namespace oracle {

// Reference growth data over D within the box, built by brute force:
// passage times are per-site maxima of running sums over every explicitly
// enumerated corner-rooted directed path, labels and paths re-run the
// boundary recursion on those values. Shares no code with the library sweep.
struct Table {
    int32_t n = 0;
    cgl::LatticeBox grid;
    std::vector<double> g;      // -inf off D
    std::vector<uint8_t> label; // 0 off D
    std::vector<uint8_t> ind;

    size_t idx(cgl::Site z) const {
        return (size_t)((int64_t)(z.y - grid.lo.y) * grid.width() + (z.x - grid.lo.x));
    }
    bool in_d(cgl::Site z) const { return grid.contains(z) && ind[idx(z)] != 0; }
    double g_or_zero(cgl::Site z) const { return in_d(z) ? g[idx(z)] : 0.0; }
    uint8_t label_at(cgl::Site z) const { return label[idx(z)]; }
};

Table build(const cgl::WeightField& f, const cgl::InitialInterface& ifc, int32_t n);

std::vector<cgl::Site> geodesic(const Table& t, cgl::Site z);

struct Contact {
    int side = 0;
    int32_t index = 0;
    cgl::Site site;
};
Contact contact(const Table& t, cgl::Site z);

struct Interface {
    std::vector<cgl::Site> steps;
    std::vector<double> times;
};
Interface interface_path(const Table& t);

// max over every enumerated directed path from a to b of the running sum
// (used to cross-check point-to-point passage times).
double best_path_sum(const cgl::WeightField& f, cgl::Site a, cgl::Site b);

} // namespace oracle
