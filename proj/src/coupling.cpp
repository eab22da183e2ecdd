#include "cgl/coupling.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>

#include "cgl/interface.hpp"

namespace cgl {

namespace {

std::string label_str(const char* kind, int32_t lbl) {
    return std::string(kind) + " " + std::to_string(lbl);
}

} // namespace

GrowthExclusion::GrowthExclusion(const GrowthTable& table, size_t max_bytes) {
    n_ = table.n;
    y_min_ = table.y_min;
    hole_lo_ = table.xlo[(size_t)(n_ - y_min_)]; // row n reaches furthest left

    const size_t holes = (size_t)(n_ - hole_lo_) + 1;
    const size_t parts = (size_t)(n_ - y_min_) + 1;
    const size_t ev_count = table.g.size();
    const size_t bytes = (holes + parts) * (2 * sizeof(int64_t) + sizeof(double)) +
                         ev_count * sizeof(LabeledEvent) + sizeof(Site) * 4 * (size_t)n_;
    if (bytes > max_bytes)
        throw ResourceError("exclusion labeling needs " + std::to_string(bytes) +
                            " bytes, budget " + std::to_string(max_bytes));

    hole_start_.assign(holes, 0);
    particle_start_.assign(parts, 0);

    // label the matched profile outward from the pinned origin pair
    const ExclusionProfile prof = to_exclusion(table.iface);
    hole_start_[(size_t)(0 - hole_lo_)] = 0;  // hole 0 at the origin
    particle_start_[(size_t)(0 - y_min_)] = 1; // particle 0 beside it
    {
        // leftward: holes take -1, -2, ...; particles 1, 2, ...
        int32_t next_hole = -1, next_particle = 1;
        for (int64_t s = -1; next_hole >= hole_lo_ || next_particle <= n_; --s) {
            if (s < prof.lo())
                throw CoverageError(
                    "exclusion labeling: profile stops at site " +
                    std::to_string(prof.lo()) + " with labels unassigned; raise the truncation");
            if (prof.occupied(s)) {
                if (next_particle <= n_)
                    particle_start_[(size_t)(next_particle - y_min_)] = s;
                ++next_particle;
            } else {
                if (next_hole >= hole_lo_) hole_start_[(size_t)(next_hole - hole_lo_)] = s;
                --next_hole;
            }
        }
        // rightward: holes take 1, 2, ...; particles -1, -2, ...
        next_hole = 1;
        next_particle = -1;
        for (int64_t s = 2; next_hole <= n_ || next_particle >= y_min_; ++s) {
            if (s > prof.hi())
                throw CoverageError(
                    "exclusion labeling: profile stops at site " +
                    std::to_string(prof.hi()) + " with labels unassigned; raise the truncation");
            if (prof.occupied(s)) {
                if (next_particle >= y_min_)
                    particle_start_[(size_t)(next_particle - y_min_)] = s;
                --next_particle;
            } else {
                if (next_hole <= n_) hole_start_[(size_t)(next_hole - hole_lo_)] = s;
                ++next_hole;
            }
        }
    }
    hole_pos_ = hole_start_;
    particle_pos_ = particle_start_;

    // per-label validity: a column/row is complete up to the box edge
    hole_bound_.resize(holes);
    for (int32_t i = hole_lo_; i <= n_; ++i)
        hole_bound_[(size_t)(i - hole_lo_)] = table.g_at({i, n_});
    particle_bound_.resize(parts);
    for (int32_t j = y_min_; j <= n_; ++j)
        particle_bound_[(size_t)(j - y_min_)] = table.g_at({n_, j});

    events_.reserve(ev_count);
    for (int32_t y = y_min_; y <= n_; ++y)
        for (int32_t x = table.xlo[(size_t)(y - y_min_)]; x <= n_; ++x)
            events_.push_back({table.g[table.idx({x, y})], x, y});
    std::sort(events_.begin(), events_.end(),
              [](const LabeledEvent& a, const LabeledEvent& b) { return a.time < b.time; });
    for (size_t k = 1; k < events_.size(); ++k)
        if (!(events_[k - 1].time < events_[k].time))
            throw CouplingViolation("exclusion labeling: tied growth times at t=" +
                                    std::to_string(events_[k].time));

    // the interface path of this table; it always leaves the box before
    // taking 2n+1 steps, so the partial path is the whole in-box trace
    try {
        path_ = competition_interface(table, 2 * (int64_t)n_ + 2);
    } catch (BoxExhausted& e) {
        path_ = std::move(e.partial);
    }
    pair_horizon_ = std::min(table.g_at({0, n_}), table.g_at({n_, 0}));
}

int64_t GrowthExclusion::hole_start(int32_t i) const {
    if (i < hole_lo_ || i > n_)
        throw DomainError(label_str("hole", i) + " outside the labeled range");
    return hole_start_[(size_t)(i - hole_lo_)];
}

int64_t GrowthExclusion::particle_start(int32_t j) const {
    if (j < y_min_ || j > n_)
        throw DomainError(label_str("particle", j) + " outside the labeled range");
    return particle_start_[(size_t)(j - y_min_)];
}

double GrowthExclusion::hole_complete_until(int32_t i) const {
    if (i < hole_lo_ || i > n_)
        throw DomainError(label_str("hole", i) + " outside the labeled range");
    return hole_bound_[(size_t)(i - hole_lo_)];
}

double GrowthExclusion::particle_complete_until(int32_t j) const {
    if (j < y_min_ || j > n_)
        throw DomainError(label_str("particle", j) + " outside the labeled range");
    return particle_bound_[(size_t)(j - y_min_)];
}

bool GrowthExclusion::hole_fresh(int32_t i) const {
    return now_ <= hole_bound_[(size_t)(i - hole_lo_)];
}

bool GrowthExclusion::particle_fresh(int32_t j) const {
    return now_ <= particle_bound_[(size_t)(j - y_min_)];
}

void GrowthExclusion::advance_to(double t) {
    if (t < now_) throw UsageError("exclusion replay runs forward only");
    while (next_event_ < events_.size() && events_[next_event_].time <= t) {
        const LabeledEvent& ev = events_[next_event_];
        if (path_idx_ + 1 < path_.steps.size() &&
            path_.times[path_idx_ + 1] < ev.time)
            throw CouplingViolation("interface jump at t=" +
                                    std::to_string(path_.times[path_idx_ + 1]) +
                                    " matched no replay event");
        int64_t& hp = hole_pos_[(size_t)(ev.hole - hole_lo_)];
        int64_t& pp = particle_pos_[(size_t)(ev.particle - y_min_)];
        if (hp != pp + 1)
            throw CouplingViolation(
                "event at t=" + std::to_string(ev.time) + ": " +
                label_str("hole", ev.hole) + " at " + std::to_string(hp) + " and " +
                label_str("particle", ev.particle) + " at " + std::to_string(pp) +
                " are not adjacent");
        const bool is_jump = path_idx_ + 1 < path_.steps.size() &&
                             path_.times[path_idx_ + 1] == ev.time;
        if (is_jump) {
            const Site b = path_.steps[path_idx_];
            const Site a = path_.steps[path_idx_ + 1];
            const int64_t xb = (int64_t)b.x - b.y;
            if (ev.hole != a.x || ev.particle != a.y)
                throw CouplingViolation("interface jump labels disagree with the event");
            if (hole_pos_[(size_t)(b.x - hole_lo_)] != xb ||
                particle_pos_[(size_t)(b.y - y_min_)] != xb + 1)
                throw CouplingViolation("straddling pair misplaced before a jump");
        }
        --hp; // the hole steps left, the particle right: an adjacent swap
        ++pp;
        if (is_jump) {
            const Site a = path_.steps[path_idx_ + 1];
            const int64_t xa = (int64_t)a.x - a.y;
            if (hole_pos_[(size_t)(a.x - hole_lo_)] != xa ||
                particle_pos_[(size_t)(a.y - y_min_)] != xa + 1)
                throw CouplingViolation("straddling pair misplaced after a jump");
            ++path_idx_;
            ++verified_path_;
        }
        ++next_event_;
    }
    if (path_idx_ + 1 < path_.steps.size() && path_.times[path_idx_ + 1] <= t)
        throw CouplingViolation("interface jump at t=" +
                                std::to_string(path_.times[path_idx_ + 1]) +
                                " matched no replay event");
    now_ = t;
}

double GrowthExclusion::advance_all() {
    advance_to(std::numeric_limits<double>::infinity());
    now_ = events_.empty() ? 0.0 : events_.back().time;
    return now_;
}

int64_t GrowthExclusion::hole_pos(int32_t i) const {
    if (i < hole_lo_ || i > n_)
        throw DomainError(label_str("hole", i) + " outside the labeled range");
    if (!hole_fresh(i))
        throw HorizonError(label_str("hole", i) + " is exact only until t=" +
                           std::to_string(hole_bound_[(size_t)(i - hole_lo_)]));
    return hole_pos_[(size_t)(i - hole_lo_)];
}

int64_t GrowthExclusion::particle_pos(int32_t j) const {
    if (j < y_min_ || j > n_)
        throw DomainError(label_str("particle", j) + " outside the labeled range");
    if (!particle_fresh(j))
        throw HorizonError(label_str("particle", j) + " is exact only until t=" +
                           std::to_string(particle_bound_[(size_t)(j - y_min_)]));
    return particle_pos_[(size_t)(j - y_min_)];
}

std::vector<int8_t> GrowthExclusion::config(int64_t lo, int64_t hi) const {
    if (lo > hi) throw ParameterError("config: empty window");
    // unstored labels live strictly outside the extreme stored ones, so the
    // represented span is bracketed by the extreme positions of each family
    const int64_t span_lo = std::max(hole_pos_.front(), particle_pos_.back()) + 1;
    const int64_t span_hi = std::min(hole_pos_.back(), particle_pos_.front()) - 1;
    if (lo < span_lo || hi > span_hi)
        throw CoverageError("config window [" + std::to_string(lo) + "," +
                            std::to_string(hi) + "] outside the labeled span [" +
                            std::to_string(span_lo) + "," + std::to_string(span_hi) + "]");
    std::vector<int8_t> out((size_t)(hi - lo + 1), -1);
    for (int32_t i = hole_lo_; i <= n_; ++i) {
        const int64_t p = hole_pos_[(size_t)(i - hole_lo_)];
        if (!hole_fresh(i)) {
            // a stale hole can only have moved further left
            if (p >= lo)
                throw HorizonError(label_str("hole", i) + " stale near the config window");
            continue;
        }
        if (p < lo || p > hi) continue;
        if (out[(size_t)(p - lo)] != -1)
            throw CouplingViolation("site " + std::to_string(p) + " claimed twice");
        out[(size_t)(p - lo)] = 0;
    }
    for (int32_t j = y_min_; j <= n_; ++j) {
        const int64_t p = particle_pos_[(size_t)(j - y_min_)];
        if (!particle_fresh(j)) {
            // a stale particle can only have moved further right
            if (p <= hi)
                throw HorizonError(label_str("particle", j) + " stale near the config window");
            continue;
        }
        if (p < lo || p > hi) continue;
        if (out[(size_t)(p - lo)] != -1)
            throw CouplingViolation("site " + std::to_string(p) + " claimed twice");
        out[(size_t)(p - lo)] = 1;
    }
    for (size_t k = 0; k < out.size(); ++k)
        if (out[k] == -1)
            throw CouplingViolation("site " + std::to_string(lo + (int64_t)k) +
                                    " claimed by no label");
    return out;
}

int64_t GrowthExclusion::particle_flux(int64_t r) const {
    // started left of the origin (labels >= 1) and now past r
    int64_t c1 = 0;
    for (int32_t j = 1; j <= n_; ++j) {
        const int64_t p = particle_pos_[(size_t)(j - y_min_)];
        if (p > r) {
            ++c1; // even a stale particle only moves further right
        } else if (!particle_fresh(j)) {
            throw HorizonError(label_str("particle", j) + " stale near the flux line");
        }
    }
    {
        // particles beyond label n sit further left than particle n forever
        const int64_t edge = particle_pos_[(size_t)(n_ - y_min_)];
        if (edge > r)
            throw CoverageError("particle flux at r=" + std::to_string(r) +
                                " reaches past the stored labels");
    }
    // started right of the origin (labels <= 0) and now at or left of r
    int64_t c2 = 0;
    for (int32_t j = y_min_; j <= 0; ++j) {
        const int64_t p = particle_pos_[(size_t)(j - y_min_)];
        if (p > r) continue; // a stale one is even further right
        if (!particle_fresh(j))
            throw HorizonError(label_str("particle", j) + " stale near the flux line");
        ++c2;
    }
    if (particle_pos_.front() <= r)
        throw CoverageError("particle flux at r=" + std::to_string(r) +
                            " reaches past the stored labels");
    return c1 - c2;
}

int64_t GrowthExclusion::hole_flux(int64_t r) const {
    // started at or left of the origin (labels <= 0) and now past r
    int64_t c1 = 0;
    for (int32_t i = hole_lo_; i <= 0; ++i) {
        const int64_t p = hole_pos_[(size_t)(i - hole_lo_)];
        if (p <= r) continue; // a stale hole is even further left
        if (!hole_fresh(i))
            throw HorizonError(label_str("hole", i) + " stale near the flux line");
        ++c1;
    }
    if (hole_pos_.front() > r)
        throw CoverageError("hole flux at r=" + std::to_string(r) +
                            " reaches past the stored labels");
    // started right of the origin (labels >= 1) and now at or left of r
    int64_t c2 = 0;
    for (int32_t i = 1; i <= n_; ++i) {
        const int64_t p = hole_pos_[(size_t)(i - hole_lo_)];
        if (p <= r) {
            ++c2; // even a stale hole only moves further left
        } else if (!hole_fresh(i)) {
            throw HorizonError(label_str("hole", i) + " stale near the flux line");
        }
    }
    if (hole_pos_.back() <= r)
        throw CoverageError("hole flux at r=" + std::to_string(r) +
                            " reaches past the stored labels");
    return c1 - c2;
}

int64_t GrowthExclusion::tag_position(double t) const {
    const Site z = psi_at(path_, t);
    return (int64_t)z.x - (int64_t)z.y;
}

} // namespace cgl
