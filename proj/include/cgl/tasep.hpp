#pragma once

#include <cstdint>
#include <vector>

#include "cgl/errors.hpp"
#include "cgl/interface.hpp"
#include "cgl/rng.hpp"

namespace cgl {

// Site values of the exclusion process. A first-class particle jumps right
// into a hole or swaps with a second-class particle; a second-class particle
// jumps right only into a hole.
inline constexpr int8_t site_hole = 0;
inline constexpr int8_t site_first = 1;
inline constexpr int8_t site_second = 2;

inline constexpr int64_t no_tag = INT64_MIN;

// Occupations on the window [-window, window]; everything outside is frozen
// (no influx at the left edge, a wall past the right edge).
struct TasepState {
    int64_t window = 0;
    std::vector<int8_t> sites;
    int64_t tag_pos = no_tag; // tracked second-class particle, if any

    int8_t at(int64_t site) const {
        if (site < -window || site > window)
            throw DomainError("tasep state: site " + std::to_string(site) +
                              " outside the window");
        return sites[(size_t)(site + window)];
    }
    void set(int64_t site, int8_t v) {
        if (site < -window || site > window)
            throw DomainError("tasep state: site " + std::to_string(site) +
                              " outside the window");
        sites[(size_t)(site + window)] = v;
    }
};

TasepState make_empty_state(int64_t window);

// Stationary-profile initial state with the tagged second-class particle at
// the origin: Bernoulli(lambda) sites going left from -1, Bernoulli(rho)
// going right from +1. Outward draw order and per-side counter domains keep
// an enlarged window an extension of a smaller one.
TasepState nu_second_class_state(double lambda, double rho, int64_t window,
                                 RngStream stream);

// Plain 0/1 state read off an exclusion profile (no tagged particle).
TasepState state_from_profile(const ExclusionProfile& prof, int64_t window);

struct TasepEvent {
    double time;
    int64_t site; // swap across the bond (site, site+1)
};

struct HarrisOptions {
    double t_max = 0.0;
    std::vector<double> sample_times; // increasing, within [0, t_max]
    bool log_events = false;
    bool require_margin = true; // enforce the window margin rule below
};

// Window big enough that boundary effects cannot reach the origin-scale
// region by t_max, with a large-deviations allowance.
int64_t harris_margin(double t_max);

struct HarrisResult {
    TasepState state;              // at time t_max
    std::vector<int64_t> tag_samples; // tag position at each sample time
    std::vector<TasepEvent> events;   // executed swaps, if logged
    uint64_t rings = 0;               // clock rings processed
};

// Graphical-construction run: every site in [-window, window) carries a
// rate-1 clock keyed by (site, epoch), so a wider window replays identical
// clocks. Asking for tag samples without a tagged particle is a UsageError.
HarrisResult harris_simulate(TasepState init, const HarrisOptions& opt,
                             RngStream stream);

} // namespace cgl
