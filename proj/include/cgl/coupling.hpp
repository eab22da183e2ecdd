#pragma once

#include <cstdint>
#include <vector>

#include "cgl/errors.hpp"
#include "cgl/growth.hpp"

namespace cgl {

// One executed dictionary swap: at `time`, hole `hole` (a column label) and
// particle `particle` (a row label) exchange adjacent sites.
struct LabeledEvent {
    double time = 0.0;
    int32_t hole = 0;
    int32_t particle = 0;
};

// The growth table read as a labeled exclusion process. Holes carry column
// labels, particles row labels; hole i starts at the i-th hole of the
// matched profile counting rightward from the origin (hole 0 at site 0,
// particle 0 at site 1), and the table entry g(i,j) is the time hole i and
// particle j swap. Replaying the in-box entries in increasing-g order must
// find the two labels adjacent at every step; any mismatch throws
// CouplingViolation. Positions are answerable per label while its event
// column/row is still fully inside the box.
class GrowthExclusion {
  public:
    explicit GrowthExclusion(const GrowthTable& table,
                             size_t max_bytes = size_t(3) << 30);

    // label ranges present: holes [hole_lo, top], particles [particle_lo, top]
    int32_t hole_lo() const { return hole_lo_; }
    int32_t particle_lo() const { return y_min_; }
    int32_t top() const { return n_; }

    int64_t hole_start(int32_t i) const;
    int64_t particle_start(int32_t j) const;

    // positions are exact for replay times <= these bounds
    double hole_complete_until(int32_t i) const;
    double particle_complete_until(int32_t j) const;

    const std::vector<LabeledEvent>& events() const { return events_; }

    // replay every event with time <= t (forward only), verifying adjacency
    // and, at interface jump times, the straddling-pair invariant
    void advance_to(double t);
    // replay everything in the box; returns the last event time
    double advance_all();
    double time() const { return now_; }

    int64_t hole_pos(int32_t i) const;
    int64_t particle_pos(int32_t j) const;

    // occupancy (0/1) over [lo, hi] rebuilt from both label families; every
    // site must be claimed exactly once
    std::vector<int8_t> config(int64_t lo, int64_t hi) const;

    // #{started <= 0, now past r} - #{started >= 1, now at or left of r},
    // for one species; exact only while the involved labels are complete
    int64_t particle_flux(int64_t r) const;
    int64_t hole_flux(int64_t r) const;

    // the interface path of the same table and the straddling pair it tracks
    const CompetitionPath& path() const { return path_; }
    double pair_horizon() const { return pair_horizon_; }
    // I - J at time t, from the path
    int64_t tag_position(double t) const;
    // path jumps whose event passed the pair-invariant check so far
    int64_t verified_path_events() const { return verified_path_; }

  private:
    int32_t n_ = 0;
    int32_t y_min_ = 0;
    int32_t hole_lo_ = 0;
    std::vector<int64_t> hole_pos_;     // indexed i - hole_lo_
    std::vector<int64_t> particle_pos_; // indexed j - y_min_
    std::vector<int64_t> hole_start_;
    std::vector<int64_t> particle_start_;
    std::vector<double> hole_bound_;
    std::vector<double> particle_bound_;
    std::vector<LabeledEvent> events_;
    size_t next_event_ = 0;
    double now_ = 0.0;
    CompetitionPath path_;
    size_t path_idx_ = 0;
    int64_t verified_path_ = 0;
    double pair_horizon_ = 0.0;

    bool hole_fresh(int32_t i) const;
    bool particle_fresh(int32_t j) const;
};

} // namespace cgl
