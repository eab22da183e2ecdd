#include "cgl/trace.hpp"

#include <algorithm>
#include <cmath>

#include "cgl/detail/rows.hpp"

namespace cgl {

RowWeightFn stream_row_weights(RngStream s) {
    return [s](int32_t y, int32_t x0, int32_t x1, double* out) {
        uint64_t uy = biased(y);
        int32_t x = x0;
        while (x <= x1) {
            uint64_t ux = biased(x);
            auto blk = s.block(ux >> 2, uy, domain::weights, 0);
            for (int lane = (int)(ux & 3); lane < 4 && x <= x1; ++lane, ++x)
                *out++ = exp1_from_bits(blk[(size_t)lane]);
        }
    };
}

RowWeightFn field_row_weights(const WeightField* f) {
    return [f](int32_t y, int32_t x0, int32_t x1, double* out) {
        const LatticeBox& r = f->region;
        if (y < r.lo.y || y > r.hi.y || x0 < r.lo.x || x1 > r.hi.x)
            throw DomainError("row " + std::to_string(y) + " columns " +
                              std::to_string(x0) + ".." + std::to_string(x1) +
                              " outside the weight field");
        const double* src = &f->w[(size_t)((int64_t)(y - r.lo.y) * r.width() + (x0 - r.lo.x))];
        std::copy(src, src + (x1 - x0 + 1), out);
    };
}

TraceResult trace_interface(const InitialInterface& ifc, const TraceOptions& opt,
                            const RowWeightFn& weights) {
    int32_t n = opt.box_n;
    if (n < 1) throw ParameterError("trace needs box_n >= 1");
    int32_t ccap = opt.col_cap < 0 ? n : std::min(opt.col_cap, n);
    int32_t rcap = opt.row_cap < 0 ? n : std::min(opt.row_cap, n);
    if (ccap < 1 || rcap < 1) throw ParameterError("trace caps must be >= 1");

    for (size_t i = 1; i < opt.probe_sites.size(); ++i)
        if (opt.probe_sites[i].y < opt.probe_sites[i - 1].y)
            throw UsageError("probe sites must be sorted by row");
    for (size_t i = 0; i < opt.exit_marks.size(); ++i)
        if (opt.exit_marks[i] < 1 ||
            (i > 0 && opt.exit_marks[i] <= opt.exit_marks[i - 1]))
            throw UsageError("exit marks must be increasing and >= 1");

    detail::RowLayout layout = detail::make_row_layout(ifc, rcap, ccap);
    int32_t base = std::min(layout.at(rcap), 1);
    size_t width = (size_t)(ccap - base + 1);

    std::vector<double> rowa(width), rowb(width), wbuf(width);
    double* prev = rowa.data();
    double* cur = rowb.data();
    int32_t pxlo = ccap + 1; // nothing below the first row

    TraceResult res;
    res.path.steps.push_back(Site{0, 0});
    res.path.times.push_back(0.0);
    res.probe_g.assign(opt.probe_sites.size(), std::numeric_limits<double>::quiet_NaN());
    res.exit_tan.assign(opt.exit_marks.size(), std::numeric_limits<double>::quiet_NaN());

    Site tip{0, 0};
    bool done = opt.max_steps == 0 || 0.0 >= opt.stop_projection;
    size_t pi = 0, mi = 0;

    for (int32_t y = layout.y_min; y <= rcap; ++y) {
        if (done && pi >= opt.probe_sites.size()) break;
        int32_t lo = layout.at(y);
        weights(y, lo, ccap, wbuf.data());
        double gl = 0.0;
        for (int32_t x = lo; x <= ccap; ++x) {
            double gb = x >= pxlo ? prev[x - base] : 0.0;
            gl = wbuf[x - lo] + (gb > gl ? gb : gl);
            cur[x - base] = gl;
        }
        while (pi < opt.probe_sites.size() && opt.probe_sites[pi].y == y) {
            Site p = opt.probe_sites[pi];
            if (p.x < lo || p.x > ccap)
                throw UsageError("probe site " + to_string(p) + " outside the traced rows");
            res.probe_g[pi] = cur[p.x - base];
            ++pi;
        }
        if (y >= 1) {
            while (!done && tip.y == y - 1) {
                if (opt.max_steps >= 0 && (int64_t)res.path.steps.size() > opt.max_steps) {
                    done = true;
                    break;
                }
                if (tip.x + 1 > n || tip.y + 1 > n) {
                    res.hit_boundary = done = true;
                    break;
                }
                if (tip.x + 1 > ccap || tip.y + 1 > rcap) {
                    res.hit_cap = done = true;
                    break;
                }
                double gr = prev[tip.x + 1 - base];
                double gu = cur[tip.x - base];
                bool right = gr < gu; // tie steps up
                double tn = right ? gr : gu;
                if (tn > opt.stop_time) {
                    // the next jump is known to fall beyond the stop time
                    res.path.horizon = tn;
                    done = true;
                    break;
                }
                if (right)
                    tip.x += 1;
                else
                    tip.y += 1;
                res.path.steps.push_back(tip);
                res.path.times.push_back(tn);
                int32_t mx = std::max(tip.x, tip.y);
                while (mi < opt.exit_marks.size() && mx == opt.exit_marks[mi]) {
                    res.exit_tan[mi] = (double)tip.y / (double)tip.x;
                    ++mi;
                }
                if (tip.x * opt.dir_x + tip.y * opt.dir_y >= opt.stop_projection) {
                    done = true;
                    break;
                }
            }
        }
        std::swap(prev, cur);
        pxlo = lo;
    }
    if (pi < opt.probe_sites.size())
        throw UsageError("probe site " + to_string(opt.probe_sites[pi]) +
                         " outside the traced rows");
    if (!done) {
        // the path still wants the row above the last one swept
        if (rcap >= n)
            res.hit_boundary = true;
        else
            res.hit_cap = true;
    }
    if (res.path.horizon < res.path.times.back())
        res.path.horizon = res.path.times.back();
    return res;
}

} // namespace cgl
