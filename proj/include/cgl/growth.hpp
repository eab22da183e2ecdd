#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "cgl/errors.hpp"
#include "cgl/interface.hpp"
#include "cgl/lattice.hpp"
#include "cgl/weights.hpp"

namespace cgl {

// Passage times over D = {z <= (n,n)} \ Gamma0, stored as ragged rows
// y_min..n with row y spanning [xlo(y), n]. Per site: 8-byte time, 1-byte
// cluster label, 1-byte backpointer. g(z) = X(z) + max of the two
// predecessors, 0 on Gamma0.
struct GrowthTable {
    int32_t n = 0;
    int32_t y_min = 0;
    std::vector<int32_t> xlo;  // indexed by y - y_min
    std::vector<size_t> off;   // row start in the flat arrays
    std::vector<double> g;
    std::vector<uint8_t> label; // 1: grew from the alpha arm, 2: from beta
    std::vector<uint8_t> back;  // 0: boundary start, 1: from left, 2: from below
    InitialInterface iface;     // the staircase the table grew from

    bool in_domain(Site z) const {
        return z.y >= y_min && z.y <= n && z.x <= n && z.x >= xlo[z.y - y_min];
    }
    // true for sites of the initial cluster Gamma0 (only meaningful inside
    // the box)
    bool in_gamma0(Site z) const {
        if (z.y < y_min) return z.x <= n;
        return z.y <= n && z.x < xlo[z.y - y_min];
    }
    size_t idx(Site z) const { return off[z.y - y_min] + (size_t)(z.x - xlo[z.y - y_min]); }

    double g_at(Site z) const {
        if (!in_domain(z)) throw DomainError("growth table: site " + to_string(z) + " outside D");
        return g[idx(z)];
    }
    // g with the boundary convention: 0 on Gamma0
    double g_or_zero(Site z) const {
        if (in_domain(z)) return g[idx(z)];
        if (in_gamma0(z)) return 0.0;
        throw DomainError("growth table: site " + to_string(z) + " outside the box");
    }
    uint8_t label_at(Site z) const {
        if (!in_domain(z)) throw DomainError("growth table: site " + to_string(z) + " outside D");
        return label[idx(z)];
    }
    uint8_t back_at(Site z) const {
        if (!in_domain(z)) throw DomainError("growth table: site " + to_string(z) + " outside D");
        return back[idx(z)];
    }
};

// The competition interface: steps[0] = (0,0), unit up/right steps, and
// times[i] = g(steps[i]) strictly increasing (times[0] = 0). Position
// queries are answerable for t < horizon; a time-stopped trace knows the
// next jump falls beyond its stop time, so its horizon exceeds times.back().
struct CompetitionPath {
    std::vector<Site> steps;
    std::vector<double> times;
    double horizon = 0.0;
};

// Thrown when a path reaches the box boundary before its requested length;
// carries what was traced so the caller can enlarge the box.
struct BoxExhausted : Error {
    CompetitionPath partial;
    BoxExhausted(const std::string& what, CompetitionPath p)
        : Error(what), partial(std::move(p)) {}
};

// A directed up/right lattice path and its weight sum.
struct DirectedPath {
    std::vector<Site> sites; // from the boundary start to the query site
    double weight = 0.0;     // equals g at the endpoint
};

struct ContactPoint {
    int side = 0;      // 1: alpha arm (A_k), 2: beta arm (B_m)
    int32_t index = 0; // k or m
    Site site;
};

// Y duality field sample: Y(z) = min(g(z+e1), g(z+e2)) - g(z).
struct YField {
    std::vector<Site> sites;
    std::vector<double> values;
};

// Fill the table by one sweep in increasing x+y (row-major suffices: the
// recurrence only looks left and below). Throws CoverageError naming the
// first uncovered site if the field or the interface truncation is short,
// ResourceError against the memory budget.
GrowthTable compute_growth(const WeightField& field, const InitialInterface& ifc,
                           int32_t n, size_t max_bytes = size_t(3) << 30);

// Point-to-point passage time on [from, to] (both endpoints' weights count).
double passage_time(const WeightField& field, Site from, Site to);

// Follow locally minimal growth times from (0,0) until `max_steps` steps.
// Reaching the box boundary first throws BoxExhausted with the partial path.
CompetitionPath competition_interface(const GrowthTable& table, int64_t max_steps);

// psi(t): the interface position at time t (half-open jump intervals).
Site psi_at(const CompetitionPath& path, double t);

// Backtrack the maximal path per the recurrence (ties take the site below).
DirectedPath geodesic_backtrack(const GrowthTable& table, Site z);

// Which staircase corner the geodesic from z grew out of.
ContactPoint contact_point(const GrowthTable& table, Site z);

// Y at one site (all of z, z+e1, z+e2 must be in D or on Gamma0).
double reversed_weight_at(const GrowthTable& table, Site z);

// All eligible Y sites with x,y <= n - margin.
YField reversed_weights(const GrowthTable& table, int32_t margin = 1);

// Exact check that every subsegment of the competition path with span <=
// max_span and endpoints margin sites inside the box is the unique maximal
// path for the Y weights over its rectangle.
bool nems_geodesic_check(const GrowthTable& table, const CompetitionPath& path,
                         int32_t max_span = 12, int32_t margin = 2);

// CSV rows "x,y,g,label" over box ∩ D.
void dump_table_csv(const GrowthTable& table, const LatticeBox& box,
                    std::ostream& out);

} // namespace cgl
