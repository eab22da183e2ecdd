#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "cgl/growth.hpp"
#include "cgl/interface.hpp"
#include "cgl/rng.hpp"
#include "cgl/weights.hpp"

namespace cgl {

// Two-row streaming sweep: grows the interface path and records probe
// values without storing the table. Internal caps shrink the swept
// rectangle; if the path needs a site beyond a cap the result says so and
// the caller retries with larger caps.
struct TraceOptions {
    int32_t box_n = 0;
    int64_t max_steps = -1; // <0: no step limit
    double stop_time = std::numeric_limits<double>::infinity();
    double stop_projection = std::numeric_limits<double>::infinity();
    double dir_x = 0.0, dir_y = 0.0; // unit direction for the projection stop
    int32_t col_cap = -1;            // <0: box_n
    int32_t row_cap = -1;            // <0: box_n
    std::vector<Site> probe_sites;   // g recorded here; sorted by row
    std::vector<int32_t> exit_marks; // tan at first exit of [0,m]^2; increasing
};

struct TraceResult {
    CompetitionPath path;
    bool hit_boundary = false; // next step needs a site beyond the box
    bool hit_cap = false;      // next step needs a site beyond an internal cap
    std::vector<double> probe_g;  // aligned with probe_sites
    std::vector<double> exit_tan; // aligned with exit_marks, NaN if unreached
};

// Fills out[0..x1-x0] with the weights of row y, columns x0..x1.
using RowWeightFn = std::function<void(int32_t y, int32_t x0, int32_t x1, double* out)>;

// Site-keyed weights from the counter RNG; bit-identical to sample_weights.
RowWeightFn stream_row_weights(RngStream s);

// Reads a stored field (kept alive by the caller).
RowWeightFn field_row_weights(const WeightField* f);

TraceResult trace_interface(const InitialInterface& ifc, const TraceOptions& opt,
                            const RowWeightFn& weights);

} // namespace cgl
