#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <vector>

#include "cgl/coupling.hpp"
#include "cgl/errors.hpp"
#include "cgl/growth.hpp"
#include "cgl/interface.hpp"
#include "cgl/lattice.hpp"
#include "cgl/rng.hpp"
#include "cgl/weights.hpp"

using namespace cgl;

namespace {

GrowthTable table_for(const InitialInterface& ifc, int32_t n, RngStream st) {
    // tight covering box read off the arm extents
    LatticeBox box{{ifc.alpha_at(n) + 1, ifc.beta_at(n) + 1}, {n, n}};
    WeightField f = sample_weights(box, st);
    return compute_growth(f, ifc, n);
}

// prefix-count forms of the initial positions, straight off the corner lists
int64_t hole_start_formula(const InitialInterface& ifc, int32_t i) {
    if (i >= 1) return (int64_t)i - ifc.beta_at(i);
    int64_t c = 0;
    for (int32_t k = 1; k <= (int32_t)ifc.alpha.size(); ++k)
        c += ifc.alpha_at(k) >= i;
    return (int64_t)i - c;
}

int64_t particle_start_formula(const InitialInterface& ifc, int32_t j) {
    if (j >= 1) return (int64_t)ifc.alpha_at(j) - j + 1;
    int64_t c = 0;
    for (int32_t m = 1; m <= (int32_t)ifc.beta.size(); ++m)
        c += ifc.beta_at(m) >= j;
    return 1 - (int64_t)j + c;
}

} // namespace

TEST_CASE("label starts on a worked staircase") {
    InitialInterface ifc =
        build_deterministic({-3, -6, -6}, {-1, -2, -2}, 0.5, 0.5);
    GrowthTable t = table_for(ifc, 3, {500, 1});
    GrowthExclusion ge(t);

    CHECK(ge.top() == 3);
    CHECK(ge.hole_lo() == -5); // alpha_3 + 1
    CHECK(ge.particle_lo() == -1); // beta_3 + 1

    const int64_t hole_expect[] = {-6, -5, -4, -2, -1, 0, 2, 4, 5}; // i = -5..3
    for (int32_t i = -5; i <= 3; ++i) CHECK(ge.hole_start(i) == hole_expect[i + 5]);
    const int64_t part_expect[] = {3, 1, -3, -7, -8}; // j = -1..3
    for (int32_t j = -1; j <= 3; ++j) CHECK(ge.particle_start(j) == part_expect[j + 1]);

    // the labeled span reproduces the raw occupation profile
    ExclusionProfile prof = to_exclusion(ifc);
    std::vector<int8_t> cfg = ge.config(-5, 2);
    for (int64_t s = -5; s <= 2; ++s) CHECK((int)cfg[(size_t)(s + 5)] == prof.occupied(s));

    CHECK_THROWS_AS(ge.hole_start(-6), DomainError);
    CHECK_THROWS_AS(ge.hole_start(4), DomainError);
    CHECK_THROWS_AS(ge.particle_start(-2), DomainError);
    CHECK_THROWS_AS(ge.config(-6, 2), CoverageError);
    CHECK_THROWS_AS(ge.config(-5, 3), CoverageError);
    CHECK_THROWS_AS(ge.config(2, 1), ParameterError);
}

TEST_CASE("label starts match the prefix-count forms on random staircases") {
    const double dens[][2] = {{0.5, 0.5}, {0.8, 0.2}, {0.3, 0.6}, {1.0, 0.0}};
    for (int d = 0; d < 4; ++d) {
        for (uint64_t seed = 0; seed < 3; ++seed) {
            RngStream st{510 + seed, (uint64_t)d};
            const int32_t n = 12;
            InitialInterface ifc =
                sample_random_walk(dens[d][0], dens[d][1], default_truncation(n), st);
            GrowthTable t = table_for(ifc, n, st);
            GrowthExclusion ge(t);

            for (int32_t i = ge.hole_lo(); i <= n; ++i)
                CHECK(ge.hole_start(i) == hole_start_formula(ifc, i));
            for (int32_t j = ge.particle_lo(); j <= n; ++j)
                CHECK(ge.particle_start(j) == particle_start_formula(ifc, j));

            // holes strictly increase, particles strictly decrease in label
            for (int32_t i = ge.hole_lo() + 1; i <= n; ++i)
                CHECK(ge.hole_start(i) > ge.hole_start(i - 1));
            for (int32_t j = ge.particle_lo() + 1; j <= n; ++j)
                CHECK(ge.particle_start(j) < ge.particle_start(j - 1));

            // together both families tile the labeled span like the profile
            ExclusionProfile prof = to_exclusion(ifc);
            const int64_t lo = std::max(ge.hole_start(ge.hole_lo()),
                                        ge.particle_start(n)) + 1;
            const int64_t hi = std::min(ge.hole_start(n),
                                        ge.particle_start(ge.particle_lo())) - 1;
            if (lo <= hi) { // the step staircase keeps no sites interior
                std::vector<int8_t> cfg = ge.config(lo, hi);
                for (int64_t s = lo; s <= hi; ++s)
                    CHECK((int)cfg[(size_t)(s - lo)] == prof.occupied(s));
            }
        }
    }
}

TEST_CASE("full dictionary replay verifies every event and every jump") {
    const double dens[][2] = {{0.5, 0.5}, {0.8, 0.2}, {0.3, 0.6}};
    for (int d = 0; d < 3; ++d) {
        for (uint64_t seed = 0; seed < 3; ++seed) {
            RngStream st{520 + seed, (uint64_t)d};
            const int32_t n = 40;
            InitialInterface ifc =
                sample_random_walk(dens[d][0], dens[d][1], default_truncation(n), st);
            GrowthTable t = table_for(ifc, n, st);
            GrowthExclusion ge(t);
            CHECK(ge.events().size() == t.g.size());
            CHECK(ge.pair_horizon() <= ge.path().horizon);
            const size_t jumps = ge.path().steps.size() - 1;
            CHECK_NOTHROW(ge.advance_all());
            CHECK((size_t)ge.verified_path_events() == jumps);
        }
    }
    // one larger instance
    {
        RngStream st{529, 0};
        const int32_t n = 60;
        InitialInterface ifc = sample_random_walk(0.6, 0.4, default_truncation(n), st);
        GrowthTable t = table_for(ifc, n, st);
        GrowthExclusion ge(t);
        CHECK_NOTHROW(ge.advance_all());
        CHECK((size_t)ge.verified_path_events() == ge.path().steps.size() - 1);
    }
}

TEST_CASE("straddling pair and flux identities at intermediate times") {
    for (uint64_t seed = 0; seed < 4; ++seed) {
        RngStream st{530, seed};
        const int32_t n = 30;
        InitialInterface ifc = sample_random_walk(0.6, 0.4, default_truncation(n), st);
        GrowthTable t = table_for(ifc, n, st);
        GrowthExclusion ge(t);

        const double hz = ge.pair_horizon();
        for (double frac : {0.05, 0.2, 0.4, 0.7, 0.95}) {
            const double tm = frac * hz;
            ge.advance_to(tm);
            const Site z = psi_at(ge.path(), tm);
            const int64_t x = ge.tag_position(tm);
            CHECK(x == (int64_t)z.x - z.y);
            // the interface coordinates are the coordinates of the pair
            CHECK(ge.hole_pos(z.x) == x);
            CHECK(ge.particle_pos(z.y) == x + 1);
            // passed-label counts reproduce them as currents at the pair
            CHECK(-ge.hole_flux(x) == (int64_t)z.x);
            CHECK(ge.particle_flux(x) == (int64_t)z.y);
            // the pair is adjacent in the rebuilt occupancy
            std::vector<int8_t> cfg = ge.config(x - 2, x + 2);
            CHECK(cfg[2] == 0);
            CHECK(cfg[3] == 1);
        }
    }
}

TEST_CASE("window enlargement keeps labels and replay identical") {
    RngStream st{540, 3};
    InitialInterface ifc = sample_random_walk(0.5, 0.5, default_truncation(28), st);
    GrowthTable ta = table_for(ifc, 20, st);
    GrowthTable tb = table_for(ifc, 28, st);
    GrowthExclusion a(ta), b(tb);
    for (int32_t i = a.hole_lo(); i <= a.top(); ++i)
        CHECK(a.hole_start(i) == b.hole_start(i));
    for (int32_t j = a.particle_lo(); j <= a.top(); ++j)
        CHECK(a.particle_start(j) == b.particle_start(j));

    const double tm = 0.8 * a.pair_horizon();
    a.advance_to(tm);
    b.advance_to(tm);
    for (int32_t i = a.hole_lo(); i <= a.top(); ++i) {
        if (tm <= a.hole_complete_until(i)) CHECK(a.hole_pos(i) == b.hole_pos(i));
    }
    for (int32_t j = a.particle_lo(); j <= a.top(); ++j) {
        if (tm <= a.particle_complete_until(j))
            CHECK(a.particle_pos(j) == b.particle_pos(j));
    }
}

TEST_CASE("replay guards: staleness, direction, ties, budget") {
    RngStream st{550, 1};
    const int32_t n = 10;
    InitialInterface ifc = sample_random_walk(0.5, 0.5, default_truncation(n), st);
    GrowthTable t = table_for(ifc, n, st);
    GrowthExclusion ge(t);

    ge.advance_to(1.0);
    CHECK_THROWS_AS(ge.advance_to(0.5), UsageError);

    ge.advance_all();
    // after the whole box, only the top-edge labels are still certified
    CHECK_NOTHROW(ge.hole_pos(n));
    CHECK_THROWS_AS(ge.hole_pos(0), HorizonError);
    CHECK_NOTHROW(ge.particle_pos(n));
    CHECK_THROWS_AS(ge.particle_pos(0), HorizonError);

    CHECK_THROWS_AS(GrowthExclusion(t, 64), ResourceError);

    // constant weights tie g(1,0) and g(0,1): the replay order is ill-defined
    InitialInterface flat = build_flat_L(1, 8);
    WeightField ones{{{0, -1}, {3, 3}}, std::vector<double>(20, 1.0)};
    GrowthTable tied = compute_growth(ones, flat, 2);
    CHECK_THROWS_AS(GrowthExclusion{tied}, CouplingViolation);

    // a time query past the path horizon stays a horizon error
    CHECK_THROWS_AS(ge.tag_position(ge.path().horizon + 1.0), HorizonError);
}
