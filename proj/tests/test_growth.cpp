#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cgl/growth.hpp"
#include "cgl/trace.hpp"
#include "oracle.hpp"

using namespace cgl;

namespace {

// hand-checked 3x3 instance: alpha = beta = (-1,-1), explicit weights
WeightField hand_field() {
    WeightField f;
    f.region = LatticeBox{Site{0, 0}, Site{2, 2}};
    f.w = {9.9, 1, 5, 2, 3, 1, 4, 4, 2}; // (0,0) is never read
    return f;
}

InitialInterface hand_iface() { return build_deterministic({-1, -1}, {-1, -1}, 0.5, 0.4); }

InitialInterface clamped_walk(double lambda, double rho, int32_t length,
                              RngStream s) {
    InitialInterface w = sample_random_walk(lambda, rho, length, s);
    for (size_t i = 0; i < w.alpha.size(); ++i)
        w.alpha[i] = std::max(w.alpha[i], (int32_t)(-(int32_t)i - 4));
    for (size_t i = 0; i < w.beta.size(); ++i)
        w.beta[i] = std::max(w.beta[i], (int32_t)(-(int32_t)i - 4));
    return build_deterministic(w.alpha, w.beta, lambda, rho);
}

WeightField field_for(const InitialInterface& ifc, int32_t n, RngStream s) {
    return sample_weights(
        LatticeBox{Site{(int32_t)(ifc.alpha_at(n) + 1), (int32_t)(ifc.beta_at(n) + 1)},
                   Site{n, n}},
        s);
}

} // namespace

TEST_CASE("hand instance: times, labels, backpointers") {
    WeightField f = hand_field();
    GrowthTable t = compute_growth(f, hand_iface(), 2);
    CHECK(t.y_min == 0);
    struct Row {
        int32_t x, y;
        double g;
        uint8_t label, back;
    };
    const Row expect[] = {
        {1, 0, 1, 2, 0}, {2, 0, 6, 2, 1},  {0, 1, 2, 1, 0},  {1, 1, 5, 1, 1},
        {2, 1, 7, 2, 2}, {0, 2, 6, 1, 2},  {1, 2, 10, 1, 1}, {2, 2, 12, 1, 1},
    };
    for (const Row& r : expect) {
        Site z{r.x, r.y};
        CHECK(t.g_at(z) == r.g);
        CHECK(t.label_at(z) == r.label);
        CHECK(t.back_at(z) == r.back);
    }
    CHECK(t.in_gamma0(Site{0, 0}));
    CHECK(t.g_or_zero(Site{0, 0}) == 0.0);
    CHECK(t.in_gamma0(Site{-1, 2}));
    CHECK(!t.in_domain(Site{0, 0}));
    CHECK_THROWS_AS((void)t.g_at(Site{3, 0}), DomainError);
    CHECK_THROWS_AS((void)t.g_or_zero(Site{3, 0}), DomainError);
}

TEST_CASE("hand instance: interface, psi, geodesic, contact, duality") {
    WeightField f = hand_field();
    GrowthTable t = compute_growth(f, hand_iface(), 2);

    CompetitionPath partial;
    try {
        (void)competition_interface(t, -1);
        FAIL("expected BoxExhausted");
    } catch (const BoxExhausted& e) {
        partial = e.partial;
    }
    const std::vector<Site> steps{{0, 0}, {1, 0}, {1, 1}, {2, 1}};
    const std::vector<double> times{0, 1, 5, 7};
    CHECK(partial.steps == steps);
    CHECK(partial.times == times);

    CompetitionPath two = competition_interface(t, 2);
    CHECK(two.steps.size() == 3);
    CHECK(two.steps[2] == Site{1, 1});

    CHECK(psi_at(partial, 0.0) == Site{0, 0});
    CHECK(psi_at(partial, 0.5) == Site{0, 0});
    CHECK(psi_at(partial, 1.0) == Site{1, 0});
    CHECK(psi_at(partial, 4.99) == Site{1, 0});
    CHECK(psi_at(partial, 6.5) == Site{1, 1});
    CHECK_THROWS_AS((void)psi_at(partial, 7.0), HorizonError);
    CHECK_THROWS_AS((void)psi_at(partial, -0.1), DomainError);

    DirectedPath p = geodesic_backtrack(t, Site{2, 2});
    const std::vector<Site> want{{0, 1}, {0, 2}, {1, 2}, {2, 2}};
    CHECK(p.sites == want);
    CHECK(p.weight == 12.0);
    ContactPoint c = contact_point(t, Site{2, 2});
    CHECK(c.side == 1);
    CHECK(c.index == 1);
    CHECK(c.site == Site{0, 1});
    ContactPoint c2 = contact_point(t, Site{2, 0});
    CHECK(c2.side == 2);
    CHECK(c2.index == 1);

    CHECK(reversed_weight_at(t, Site{1, 1}) == 2.0);
    CHECK(reversed_weight_at(t, Site{0, 0}) == 1.0);

    CHECK(passage_time(f, Site{1, 1}, Site{2, 2}) == 9.0);
    CHECK(passage_time(f, Site{2, 2}, Site{2, 2}) == 2.0);
    CHECK_THROWS_AS((void)passage_time(f, Site{2, 2}, Site{1, 1}), DomainError);
}

TEST_CASE("exact ties: below wins the label, up wins the interface") {
    WeightField f;
    f.region = LatticeBox{Site{0, 0}, Site{1, 1}};
    f.w = {9.9, 1, 1, 1};
    InitialInterface ifc = build_deterministic({-1}, {-1}, 0.5, 0.5);
    GrowthTable t = compute_growth(f, ifc, 1);
    CHECK(t.g_at(Site{1, 1}) == 2.0);
    CHECK(t.back_at(Site{1, 1}) == 2);
    CHECK(t.label_at(Site{1, 1}) == 2);
    try {
        (void)competition_interface(t, -1);
        FAIL("expected BoxExhausted");
    } catch (const BoxExhausted& e) {
        REQUIRE(e.partial.steps.size() == 2);
        CHECK(e.partial.steps[1] == Site{0, 1});
    }
    DirectedPath p = geodesic_backtrack(t, Site{1, 1});
    const std::vector<Site> want{{1, 0}, {1, 1}};
    CHECK(p.sites == want);
}

TEST_CASE("brute-force oracle agrees bit for bit") {
    int instances = 0;
    const double dens[][2] = {{0.5, 0.5}, {0.3, 0.6}, {0.8, 0.2}, {1.0, 0.0}};
    for (uint64_t seed = 0; seed < 10; ++seed)
        for (const auto& d : dens) {
            int32_t n = (int32_t)(2 + seed % 5);
            InitialInterface ifc = clamped_walk(d[0], d[1], n, RngStream{seed, 11});
            WeightField f = field_for(ifc, n, RngStream{seed, 12});
            GrowthTable t = compute_growth(f, ifc, n);
            oracle::Table o = oracle::build(f, ifc, n);
            ++instances;

            for (int32_t y = o.grid.lo.y; y <= n; ++y)
                for (int32_t x = o.grid.lo.x; x <= n; ++x) {
                    Site z{x, y};
                    REQUIRE(o.in_d(z) == t.in_domain(z));
                    if (!o.in_d(z)) {
                        CHECK(t.in_gamma0(z));
                        continue;
                    }
                    REQUIRE(t.g_at(z) == o.g[o.idx(z)]);
                    REQUIRE(t.label_at(z) == o.label_at(z));
                }

            for (Site z : {Site{n, n}, Site{n, 1}, Site{1, n}}) {
                DirectedPath p = geodesic_backtrack(t, z);
                CHECK(p.sites == oracle::geodesic(o, z));
                oracle::Contact oc = oracle::contact(o, z);
                ContactPoint c = contact_point(t, z);
                CHECK(c.side == oc.side);
                CHECK(c.index == oc.index);
                CHECK(c.site == oc.site);
                // the passage time is exactly the fold along the path
                double acc = f.at(p.sites[0]);
                for (size_t i = 1; i < p.sites.size(); ++i) acc = f.at(p.sites[i]) + acc;
                CHECK(acc == p.weight);
            }

            oracle::Interface oi = oracle::interface_path(o);
            try {
                (void)competition_interface(t, -1);
                FAIL("expected BoxExhausted");
            } catch (const BoxExhausted& e) {
                CHECK(e.partial.steps == oi.steps);
                CHECK(e.partial.times == oi.times);
            }

            for (int32_t y = t.y_min; y + 1 <= n; ++y)
                for (int32_t x = t.xlo[y - t.y_min]; x + 1 <= n; ++x) {
                    Site z{x, y};
                    double want = std::min(o.g_or_zero(Site{(int32_t)(x + 1), y}),
                                           o.g_or_zero(Site{x, (int32_t)(y + 1)})) -
                                  o.g_or_zero(z);
                    CHECK(reversed_weight_at(t, z) == want);
                }
        }
    CHECK(instances == 40);
}

TEST_CASE("point-to-point passage matches enumeration") {
    RngStream s{5, 0};
    WeightField f = sample_weights(LatticeBox{Site{-2, -2}, Site{4, 3}}, s);
    CHECK(passage_time(f, Site{-2, -2}, Site{4, 3}) ==
          oracle::best_path_sum(f, Site{-2, -2}, Site{4, 3}));
    CHECK(passage_time(f, Site{0, 1}, Site{3, 2}) ==
          oracle::best_path_sum(f, Site{0, 1}, Site{3, 2}));
    CHECK(passage_time(f, Site{2, 2}, Site{2, 3}) ==
          oracle::best_path_sum(f, Site{2, 2}, Site{2, 3}));
}

TEST_CASE("structural invariants on a larger box") {
    const int32_t n = 50;
    InitialInterface ifc = sample_random_walk(0.4, 0.6, n, RngStream{31, 1});
    WeightField f = field_for(ifc, n, RngStream{31, 2});
    GrowthTable t = compute_growth(f, ifc, n);

    for (int32_t y = t.y_min; y <= n; ++y)
        for (int32_t x = t.xlo[y - t.y_min]; x <= n; ++x) {
            Site z{x, y};
            double g = t.g_at(z);
            CHECK(g > 0.0);
            CHECK(g >= t.g_or_zero(Site{(int32_t)(x - 1), y}));
            CHECK(g >= t.g_or_zero(Site{x, (int32_t)(y - 1)}));
            uint8_t lab = t.label_at(z);
            CHECK((lab == 1 || lab == 2));
            if (y <= 0) CHECK(lab == 2);
            if (x <= 0) CHECK(lab == 1);
            if (x + 1 <= n && y + 1 <= n) CHECK(reversed_weight_at(t, z) >= 0.0);
        }

    // within each row the beta cluster is a suffix
    for (int32_t y = 1; y <= n; ++y) {
        bool seen2 = false;
        for (int32_t x = t.xlo[y - t.y_min]; x <= n; ++x) {
            uint8_t lab = t.label_at(Site{x, y});
            if (seen2) CHECK(lab == 2);
            seen2 = seen2 || lab == 2;
        }
    }

    // the interface separates the clusters: right neighbors of the path are
    // beta-side, upper neighbors alpha-side
    try {
        (void)competition_interface(t, -1);
        FAIL("expected BoxExhausted");
    } catch (const BoxExhausted& e) {
        for (Site z : e.partial.steps) {
            if (z.x + 1 <= n) CHECK(t.label_at(Site{(int32_t)(z.x + 1), z.y}) == 2);
            if (z.y + 1 <= n) CHECK(t.label_at(Site{z.x, (int32_t)(z.y + 1)}) == 1);
        }
        for (size_t i = 0; i + 1 < e.partial.times.size(); ++i)
            CHECK(e.partial.times[i] < e.partial.times[i + 1]);
    }
}

TEST_CASE("streaming sweep reproduces the stored table bit for bit") {
    const int32_t n = 40;
    RngStream s{77, 3};
    InitialInterface ifc = sample_random_walk(0.5, 0.3, n, RngStream{77, 4});
    WeightField f = field_for(ifc, n, s);
    GrowthTable t = compute_growth(f, ifc, n);

    TraceOptions opt;
    opt.box_n = n;
    for (int32_t y : {t.y_min, (int32_t)0, (int32_t)1, (int32_t)(n / 2), n})
        for (int32_t x : {t.xlo[y - t.y_min], (int32_t)std::max(0, (int)y - 3), n})
            opt.probe_sites.push_back(Site{std::max(x, t.xlo[y - t.y_min]), y});
    std::sort(opt.probe_sites.begin(), opt.probe_sites.end(),
              [](Site a, Site b) { return a.y < b.y || (a.y == b.y && a.x < b.x); });

    SUBCASE("from the generator") {
        TraceResult r = trace_interface(ifc, opt, stream_row_weights(s));
        for (size_t i = 0; i < opt.probe_sites.size(); ++i)
            CHECK(r.probe_g[i] == t.g_at(opt.probe_sites[i]));
        CHECK(r.hit_boundary);
        CHECK(!r.hit_cap);
        try {
            (void)competition_interface(t, -1);
        } catch (const BoxExhausted& e) {
            CHECK(e.partial.steps == r.path.steps);
            CHECK(e.partial.times == r.path.times);
        }
    }
    SUBCASE("from a stored field") {
        TraceResult r = trace_interface(ifc, opt, field_row_weights(&f));
        for (size_t i = 0; i < opt.probe_sites.size(); ++i)
            CHECK(r.probe_g[i] == t.g_at(opt.probe_sites[i]));
    }
    SUBCASE("column and row caps do not disturb covered probes") {
        TraceOptions capped;
        capped.box_n = n;
        capped.col_cap = n / 2;
        capped.row_cap = n / 2;
        for (Site z : opt.probe_sites)
            if (z.x <= n / 2 && z.y <= n / 2) capped.probe_sites.push_back(z);
        TraceResult r = trace_interface(ifc, capped, stream_row_weights(s));
        for (size_t i = 0; i < capped.probe_sites.size(); ++i)
            CHECK(r.probe_g[i] == t.g_at(capped.probe_sites[i]));
    }
    SUBCASE("a tight cap is reported and yields a path prefix") {
        TraceOptions capped;
        capped.box_n = n;
        capped.col_cap = 4;
        capped.row_cap = 4;
        TraceResult r = trace_interface(ifc, capped, stream_row_weights(s));
        CHECK(r.hit_cap);
        CHECK(!r.hit_boundary);
        TraceOptions plain;
        plain.box_n = n;
        TraceResult full = trace_interface(ifc, plain, stream_row_weights(s));
        REQUIRE(full.path.steps.size() >= r.path.steps.size());
        for (size_t i = 0; i < r.path.steps.size(); ++i)
            CHECK(full.path.steps[i] == r.path.steps[i]);
    }
}

TEST_CASE("trace stop conditions") {
    const int32_t n = 60;
    RngStream s{123, 9};
    InitialInterface ifc = sample_random_walk(0.5, 0.5, n, RngStream{123, 10});

    TraceOptions opt;
    opt.box_n = n;
    TraceResult full = trace_interface(ifc, opt, stream_row_weights(s));
    REQUIRE(full.path.steps.size() > 10);
    CHECK(full.hit_boundary);

    SUBCASE("step limit") {
        opt.max_steps = 5;
        TraceResult r = trace_interface(ifc, opt, stream_row_weights(s));
        REQUIRE(r.path.steps.size() == 6);
        for (size_t i = 0; i < 6; ++i) CHECK(r.path.steps[i] == full.path.steps[i]);
        CHECK(!r.hit_boundary);
    }
    SUBCASE("time stop keeps exactly the jumps up to t") {
        double t = full.path.times[8] + 1e-9;
        opt.stop_time = t;
        TraceResult r = trace_interface(ifc, opt, stream_row_weights(s));
        REQUIRE(r.path.steps.size() == 9);
        CHECK(psi_at(r.path, t) == r.path.steps.back());
        CHECK(r.path.times.back() <= t);
    }
    SUBCASE("projection stop includes the first crossing") {
        opt.stop_projection = 10.0;
        opt.dir_x = 1.0 / std::sqrt(2.0);
        opt.dir_y = 1.0 / std::sqrt(2.0);
        TraceResult r = trace_interface(ifc, opt, stream_row_weights(s));
        Site tipp = r.path.steps.back();
        CHECK((tipp.x + tipp.y) / std::sqrt(2.0) >= 10.0);
        Site prev = r.path.steps[r.path.steps.size() - 2];
        CHECK((prev.x + prev.y) / std::sqrt(2.0) < 10.0);
    }
    SUBCASE("exit marks record the first crossing of each sub-box") {
        opt.exit_marks = {n / 2, n};
        TraceResult r = trace_interface(ifc, opt, stream_row_weights(s));
        REQUIRE(r.exit_tan.size() == 2);
        CHECK(std::isfinite(r.exit_tan[0]));
        CHECK(std::isfinite(r.exit_tan[1]));
        // find the first path vertex leaving each sub-box and compare
        for (size_t mi = 0; mi < 2; ++mi) {
            int32_t m = opt.exit_marks[mi];
            for (Site z : r.path.steps)
                if (std::max(z.x, z.y) == m) {
                    CHECK(r.exit_tan[mi] == (double)z.y / z.x);
                    break;
                }
        }
    }
}

TEST_CASE("reversed weights stay nonnegative and the interface maximizes them") {
    const int32_t n = 60;
    RngStream s{2000, 1};
    InitialInterface ifc = sample_random_walk(0.5, 0.5, n, RngStream{2000, 2});
    WeightField f = field_for(ifc, n, s);
    GrowthTable t = compute_growth(f, ifc, n);

    YField y = reversed_weights(t, 2);
    REQUIRE(!y.sites.empty());
    for (double v : y.values) CHECK(v >= 0.0);

    CompetitionPath path;
    try {
        (void)competition_interface(t, -1);
        FAIL("expected BoxExhausted");
    } catch (const BoxExhausted& e) {
        path = e.partial;
    }
    CHECK(nems_geodesic_check(t, path, 12, 2));

    // sensitivity: kinking one interior corner must break maximality
    CompetitionPath bent = path;
    bool flipped = false;
    for (size_t i = 1; i + 1 < bent.steps.size() && !flipped; ++i) {
        Site a = bent.steps[i - 1], b = bent.steps[i], c = bent.steps[i + 1];
        if (b.x == a.x + 1 && c.y == b.y + 1 && a.x <= t.n - 3 && c.y <= t.n - 3) {
            bent.steps[i] = Site{a.x, (int32_t)(a.y + 1)}; // swap the corner
            flipped = true;
        }
    }
    REQUIRE(flipped);
    CHECK(!nems_geodesic_check(t, bent, 12, 2));
}

TEST_CASE("coverage and budget guards") {
    InitialInterface shorty = build_deterministic({-1, -1}, {-1, -1}, 0.5, 0.5);
    WeightField f = sample_weights(LatticeBox{Site{-8, -8}, Site{8, 8}}, RngStream{1, 1});
    CHECK_THROWS_AS((void)compute_growth(f, shorty, 8), CoverageError);

    InitialInterface ifc = build_deterministic(std::vector<int32_t>(8, -2),
                                               std::vector<int32_t>(8, -2), 0.5, 0.5);
    WeightField small =
        sample_weights(LatticeBox{Site{0, 0}, Site{8, 8}}, RngStream{1, 1});
    CHECK_THROWS_AS((void)compute_growth(small, ifc, 8), CoverageError);
    CHECK_THROWS_AS((void)compute_growth(f, ifc, 8, 64), ResourceError);
    CHECK_THROWS_AS((void)compute_growth(f, ifc, 0), ParameterError);

    GrowthTable t = compute_growth(f, ifc, 8);
    CHECK_THROWS_AS((void)reversed_weights(t, 0), ParameterError);
    CHECK_THROWS_AS((void)geodesic_backtrack(t, Site{9, 1}), DomainError);
}

TEST_CASE("csv dump is stable") {
    WeightField f = hand_field();
    GrowthTable t = compute_growth(f, hand_iface(), 2);
    std::ostringstream out;
    dump_table_csv(t, LatticeBox{Site{0, 0}, Site{2, 2}}, out);
    std::string txt = out.str();
    CHECK(txt.rfind("x,y,g,label\n", 0) == 0);
    CHECK(txt.find("1,0,1,2\n") != std::string::npos);
    CHECK(txt.find("2,2,12,1\n") != std::string::npos);
    CHECK(std::count(txt.begin(), txt.end(), '\n') == 9);
}
