#pragma once

#include <string>
#include <vector>

#include "cgl/errors.hpp"
#include "cgl/lattice.hpp"
#include "cgl/rng.hpp"

namespace cgl {

// Dense field of i.i.d. Exponential(mean 1) passage weights over a box,
// row-major from the low corner. Weights are strictly positive.
struct WeightField {
    LatticeBox region;
    std::vector<double> w;

    double at(Site z) const {
        if (!region.contains(z))
            throw DomainError("weight_at: site " + to_string(z) + " outside region");
        return w[(size_t)(z.y - region.lo.y) * (size_t)region.width() +
                 (size_t)(z.x - region.lo.x)];
    }
};

// Fill a box with weights from `stream`. Deterministic: the value at a site
// depends only on (stream, site), never on the box, so overlapping regions
// and repeated calls agree bit for bit.
WeightField sample_weights(const LatticeBox& region, RngStream stream,
                           size_t max_bytes = size_t(3) << 30);

inline double weight_at(const WeightField& f, Site z) { return f.at(z); }

// Binary round trip: "CGW1" magic, box bounds as 4 signed 32-bit LE words,
// then row-major f64 LE weights.
void save_weights(const WeightField& f, const std::string& path);
WeightField load_weights(const std::string& path);

} // namespace cgl
