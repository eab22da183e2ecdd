#include "cgl/growth.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <ostream>

#include "cgl/detail/rows.hpp"

namespace cgl {

GrowthTable compute_growth(const WeightField& field, const InitialInterface& ifc,
                           int32_t n, size_t max_bytes) {
    detail::RowLayout layout = detail::make_row_layout(ifc, n, n);

    GrowthTable t;
    t.n = n;
    t.y_min = layout.y_min;
    t.xlo = std::move(layout.xlo);
    t.iface = ifc;

    size_t rows = (size_t)(n - t.y_min + 1);
    t.off.resize(rows + 1);
    t.off[0] = 0;
    for (size_t r = 0; r < rows; ++r)
        t.off[r + 1] = t.off[r] + (size_t)(n - t.xlo[r] + 1);
    size_t count = t.off[rows];
    if (count * 10 > max_bytes)
        throw ResourceError("growth table needs " + std::to_string(count * 10) +
                            " bytes, budget is " + std::to_string(max_bytes));

    // the field must cover every row span before any weight is read
    const LatticeBox& reg = field.region;
    for (int32_t y = t.y_min; y <= n; ++y) {
        int32_t lo = t.xlo[y - t.y_min];
        Site missing;
        if (y < reg.lo.y || y > reg.hi.y || lo < reg.lo.x)
            missing = Site{lo, y};
        else if (reg.hi.x < n)
            missing = Site{(int32_t)(reg.hi.x + 1), y};
        else
            continue;
        throw CoverageError("weight field does not cover site " + to_string(missing));
    }

    t.g.resize(count);
    t.label.resize(count);
    t.back.resize(count);

    int64_t fw = reg.width();
    for (int32_t y = t.y_min; y <= n; ++y) {
        size_t r = (size_t)(y - t.y_min);
        int32_t lo = t.xlo[r];
        double* gcur = &t.g[t.off[r]];
        uint8_t* lcur = &t.label[t.off[r]];
        uint8_t* bcur = &t.back[t.off[r]];
        const double* wrow =
            &field.w[(size_t)((int64_t)(y - reg.lo.y) * fw + (lo - reg.lo.x))];

        const double* gprev = nullptr;
        const uint8_t* lprev = nullptr;
        int32_t plo = 0;
        if (y > t.y_min) {
            gprev = &t.g[t.off[r - 1]];
            lprev = &t.label[t.off[r - 1]];
            plo = t.xlo[r - 1];
        }

        uint8_t strip_label = y >= 1 ? 1 : 2;
        double gl = 0.0;
        uint8_t ll = 0;
        for (int32_t x = lo; x <= n; ++x) {
            size_t i = (size_t)(x - lo);
            double gb = 0.0;
            uint8_t lb = 0;
            if (gprev && x >= plo) {
                gb = gprev[x - plo];
                lb = lprev[x - plo];
            }
            if (gl == 0.0 && gb == 0.0) {
                bcur[i] = 0;
                lcur[i] = strip_label;
            } else if (gb >= gl) { // ties grow from below
                bcur[i] = 2;
                lcur[i] = lb;
            } else {
                bcur[i] = 1;
                lcur[i] = ll;
            }
            gl = wrow[i] + (gb > gl ? gb : gl);
            gcur[i] = gl;
            ll = lcur[i];
        }
    }
    return t;
}

double passage_time(const WeightField& field, Site from, Site to) {
    if (!leq(from, to))
        throw DomainError("passage time needs " + to_string(from) + " <= " + to_string(to));
    if (!field.region.contains(from) || !field.region.contains(to))
        throw DomainError("passage endpoints outside the weight field");
    int64_t w = (int64_t)to.x - from.x + 1;
    std::vector<double> row((size_t)w);
    const double neg = -std::numeric_limits<double>::infinity();
    for (int32_t y = from.y; y <= to.y; ++y) {
        double left = neg;
        for (int32_t x = from.x; x <= to.x; ++x) {
            size_t i = (size_t)(x - from.x);
            double below = y == from.y ? neg : row[i];
            double best = left > below ? left : below;
            if (best == neg) best = 0.0; // the start site itself
            row[i] = field.at(Site{x, y}) + best;
            left = row[i];
        }
    }
    return row[(size_t)(w - 1)];
}

CompetitionPath competition_interface(const GrowthTable& table, int64_t max_steps) {
    CompetitionPath p;
    p.steps.push_back(Site{0, 0});
    p.times.push_back(0.0);
    Site tip{0, 0};
    while (max_steps < 0 || (int64_t)p.steps.size() <= max_steps) {
        if (tip.x + 1 > table.n || tip.y + 1 > table.n) {
            p.horizon = p.times.back();
            throw BoxExhausted("competition interface reached the box boundary at " +
                                   to_string(tip),
                               std::move(p));
        }
        double gr = table.g_at(Site{(int32_t)(tip.x + 1), tip.y});
        double gu = table.g_at(Site{tip.x, (int32_t)(tip.y + 1)});
        // step right only on a strictly smaller growth time
        if (gr < gu) {
            tip.x += 1;
            p.times.push_back(gr);
        } else {
            tip.y += 1;
            p.times.push_back(gu);
        }
        p.steps.push_back(tip);
    }
    p.horizon = p.times.back();
    return p;
}

Site psi_at(const CompetitionPath& path, double t) {
    if (path.times.empty()) throw UsageError("empty competition path");
    if (t < 0.0) throw DomainError("interface position needs t >= 0");
    if (t >= path.horizon)
        throw HorizonError("time " + std::to_string(t) + " is beyond the traced path");
    auto it = std::upper_bound(path.times.begin(), path.times.end(), t);
    return path.steps[(size_t)(it - path.times.begin()) - 1];
}

DirectedPath geodesic_backtrack(const GrowthTable& table, Site z) {
    DirectedPath p;
    p.weight = table.g_at(z);
    Site w = z;
    p.sites.push_back(w);
    while (true) {
        uint8_t b = table.back_at(w);
        if (b == 0) break;
        if (b == 1)
            w.x -= 1;
        else
            w.y -= 1;
        p.sites.push_back(w);
    }
    std::reverse(p.sites.begin(), p.sites.end());
    return p;
}

ContactPoint contact_point(const GrowthTable& table, Site z) {
    Site w = z;
    while (table.back_at(w) != 0) {
        if (table.back_at(w) == 1)
            w.x -= 1;
        else
            w.y -= 1;
    }
    ContactPoint c;
    c.site = w;
    if (w.y >= 1 && w.x <= 0) {
        c.side = 1;
        c.index = w.y;
    } else if (w.x >= 1 && w.y <= 0) {
        c.side = 2;
        c.index = w.x;
    } else {
        throw Error("geodesic start " + to_string(w) + " is not a staircase corner");
    }
    return c;
}

double reversed_weight_at(const GrowthTable& table, Site z) {
    double g0 = table.g_or_zero(z);
    double g1 = table.g_or_zero(Site{(int32_t)(z.x + 1), z.y});
    double g2 = table.g_or_zero(Site{z.x, (int32_t)(z.y + 1)});
    return (g1 < g2 ? g1 : g2) - g0;
}

YField reversed_weights(const GrowthTable& table, int32_t margin) {
    if (margin < 1) throw ParameterError("reversed weights need margin >= 1");
    YField f;
    int32_t top = table.n - margin;
    for (int32_t y = table.y_min; y <= top; ++y) {
        int32_t lo = table.xlo[y - table.y_min];
        for (int32_t x = lo; x <= top; ++x) {
            f.sites.push_back(Site{x, y});
            f.values.push_back(reversed_weight_at(table, Site{x, y}));
        }
    }
    return f;
}

bool nems_geodesic_check(const GrowthTable& table, const CompetitionPath& path,
                         int32_t max_span, int32_t margin) {
    if (margin < 1) throw ParameterError("geodesic check needs margin >= 1");
    int32_t lim = table.n - margin;
    size_t len = path.steps.size();
    std::vector<double> h;
    std::vector<uint8_t> bk;
    for (size_t k = 0; k + 1 < len; ++k) {
        Site a = path.steps[k];
        if (a.x > lim || a.y > lim) break;
        size_t lmax = std::min(len - 1, k + (size_t)max_span);
        for (size_t l = k + 1; l <= lmax; ++l) {
            Site b = path.steps[l];
            if (b.x > lim || b.y > lim) break;
            // maximal path for the reversed weights over [a, b]
            int32_t w = b.x - a.x + 1, hgt = b.y - a.y + 1;
            h.assign((size_t)w * hgt, 0.0);
            bk.assign((size_t)w * hgt, 0);
            const double neg = -std::numeric_limits<double>::infinity();
            for (int32_t y = a.y; y <= b.y; ++y) {
                for (int32_t x = a.x; x <= b.x; ++x) {
                    size_t i = (size_t)(y - a.y) * w + (size_t)(x - a.x);
                    double left = x > a.x ? h[i - 1] : neg;
                    double below = y > a.y ? h[i - w] : neg;
                    double best;
                    uint8_t step;
                    if (x == a.x && y == a.y) {
                        best = 0.0;
                        step = 0;
                    } else if (below >= left) { // mirror the tie rule: below wins
                        best = below;
                        step = 2;
                    } else {
                        best = left;
                        step = 1;
                    }
                    h[i] = reversed_weight_at(table, Site{x, y}) + best;
                    bk[i] = step;
                }
            }
            Site w2 = b;
            size_t j = l;
            while (true) {
                if (!(w2 == path.steps[j])) return false;
                size_t i = (size_t)(w2.y - a.y) * w + (size_t)(w2.x - a.x);
                if (bk[i] == 0) break;
                if (bk[i] == 1)
                    w2.x -= 1;
                else
                    w2.y -= 1;
                --j;
            }
            if (j != k) return false;
        }
    }
    return true;
}

void dump_table_csv(const GrowthTable& table, const LatticeBox& box, std::ostream& out) {
    out << "x,y,g,label\n";
    char buf[96];
    int32_t ylo = std::max(table.y_min, box.lo.y);
    int32_t yhi = std::min(table.n, box.hi.y);
    for (int32_t y = ylo; y <= yhi; ++y) {
        int32_t lo = std::max(table.xlo[y - table.y_min], box.lo.x);
        int32_t hi = std::min(table.n, box.hi.x);
        for (int32_t x = lo; x <= hi; ++x) {
            Site z{x, y};
            std::snprintf(buf, sizeof(buf), "%" PRId32 ",%" PRId32 ",%.17g,%u\n", x, y,
                          table.g_at(z), (unsigned)table.label_at(z));
            out << buf;
        }
    }
}

} // namespace cgl
