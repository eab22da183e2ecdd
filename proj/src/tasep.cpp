#include "cgl/tasep.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace cgl {

TasepState make_empty_state(int64_t window) {
    if (window < 1) throw ParameterError("tasep window must be >= 1");
    TasepState st;
    st.window = window;
    st.sites.assign((size_t)(2 * window + 1), site_hole);
    return st;
}

TasepState nu_second_class_state(double lambda, double rho, int64_t window,
                                 RngStream stream) {
    if (!(lambda >= 0.0) || lambda > 1.0 || !(rho >= 0.0) || rho >= 1.0)
        throw ParameterError("nu state: needs lambda in [0,1], rho in [0,1)");
    TasepState st = make_empty_state(window);
    st.set(0, site_second);
    st.tag_pos = 0;
    SequentialRng left(stream, domain::profile);
    for (int64_t j = -1; j >= -window; --j)
        if (left.bernoulli(lambda)) st.set(j, site_first);
    SequentialRng right(stream, domain::profile_right);
    for (int64_t j = 1; j <= window; ++j)
        if (right.bernoulli(rho)) st.set(j, site_first);
    return st;
}

TasepState state_from_profile(const ExclusionProfile& prof, int64_t window) {
    TasepState st = make_empty_state(window);
    for (int64_t j = -window; j <= window; ++j)
        if (prof.occupied(j)) st.set(j, site_first);
    return st;
}

int64_t harris_margin(double t_max) {
    if (!(t_max >= 0.0)) throw ParameterError("harris margin: needs t_max >= 0");
    return (int64_t)std::ceil(2.0 * t_max) + (int64_t)std::ceil(10.0 * std::sqrt(t_max)) +
           100;
}

namespace {

// priority of the left value that lets it displace the right value
inline int swap_rank(int8_t v) { return v == site_first ? 2 : (v == site_second ? 1 : 0); }

} // namespace

HarrisResult harris_simulate(TasepState init, const HarrisOptions& opt,
                             RngStream stream) {
    if (!(opt.t_max >= 0.0)) throw ParameterError("harris: needs t_max >= 0");
    if (opt.require_margin && init.window < harris_margin(opt.t_max))
        throw ParameterError("harris: window " + std::to_string(init.window) +
                             " below the margin " +
                             std::to_string(harris_margin(opt.t_max)) +
                             " for t_max " + std::to_string(opt.t_max));
    for (size_t i = 0; i < opt.sample_times.size(); ++i) {
        double s = opt.sample_times[i];
        if (!(s >= 0.0) || s > opt.t_max)
            throw ParameterError("harris: sample time outside [0, t_max]");
        if (i > 0 && s < opt.sample_times[i - 1])
            throw ParameterError("harris: sample times must be nondecreasing");
    }
    if (!opt.sample_times.empty() && init.tag_pos == no_tag)
        throw UsageError("harris: tag samples need a tagged particle");
    if (init.tag_pos != no_tag && init.at(init.tag_pos) != site_second)
        throw UsageError("harris: tag position does not hold a second-class particle");

    const int64_t W = init.window;
    HarrisResult res;
    res.state = std::move(init);
    res.tag_samples.reserve(opt.sample_times.size());

    // bonds (x, x+1) for x in [-W, W-1], each with its own epoch-keyed clock
    const size_t nb = (size_t)(2 * W);
    std::vector<SiteClock> clocks;
    clocks.reserve(nb);
    using Entry = std::pair<double, int64_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
    for (int64_t x = -W; x < W; ++x) {
        clocks.emplace_back(stream, (int32_t)x);
        double t = clocks.back().next_gap();
        if (t <= opt.t_max) heap.emplace(t, x);
    }

    size_t si = 0;
    while (!heap.empty()) {
        auto [t, x] = heap.top();
        heap.pop();
        while (si < opt.sample_times.size() && opt.sample_times[si] < t)
            res.tag_samples.push_back(res.state.tag_pos), ++si;
        ++res.rings;

        int8_t a = res.state.at(x), b = res.state.at(x + 1);
        if (swap_rank(a) > swap_rank(b)) {
            res.state.set(x, b);
            res.state.set(x + 1, a);
            if (res.state.tag_pos == x)
                res.state.tag_pos = x + 1;
            else if (res.state.tag_pos == x + 1)
                res.state.tag_pos = x;
            if (opt.log_events) res.events.push_back({t, x});
        }
        double tn = t + clocks[(size_t)(x + W)].next_gap();
        if (tn <= opt.t_max) heap.emplace(tn, x);
    }
    while (si < opt.sample_times.size())
        res.tag_samples.push_back(res.state.tag_pos), ++si;
    return res;
}

} // namespace cgl
