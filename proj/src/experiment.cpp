#include "cgl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cgl/coupling.hpp"
#include "cgl/growth.hpp"
#include "cgl/interface.hpp"
#include "cgl/rng.hpp"
#include "cgl/shape.hpp"
#include "cgl/stats.hpp"
#include "cgl/tasep.hpp"
#include "cgl/trace.hpp"
#include "cgl/weights.hpp"

namespace fs = std::filesystem;

namespace cgl {
namespace {

#if defined(__GNUC__)
__attribute__((format(printf, 1, 2)))
#endif
std::string
strf(const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return buf;
}

// %.17g round-trips doubles exactly through the manifest and the artifacts
std::string cell(double v) { return strf("%.17g", v); }

struct ExperimentInfo {
    Experiment id;
    const char* name;
    double def_lambda, def_rho;
    int32_t def_n; // 0: runs on a time horizon instead
    double def_t;
    const char* schema;
    const char* blurb;
};

const ExperimentInfo kInfo[] = {
    {Experiment::shape, "shape", 0.5, 0.2, 300, 0.0,
     "replica,ray,x,y,g,p,ratio",
     "growth times along 25 rays of the quadrant against the closed-form "
     "limit shape"},
    {Experiment::direction, "direction", 0.3, 0.6, 600, 0.0,
     "replica,mark,tan",
     "interface direction concentration in the attractive regime "
     "(lambda <= rho)"},
    {Experiment::udist, "udist", 0.8, 0.2, 600, 0.0,
     "replica,tan,u",
     "uniform law of the interface speed in the fan regime (lambda > rho)"},
    {Experiment::clt, "clt", 0.2, 0.6, 0, 400.0,
     "replica,i,j",
     "joint interface position clt in the shock regime (lambda < rho)"},
    {Experiment::fluct, "fluct", 0.5, 0.5, 1024, 0.0,
     "replica,radius,deviation",
     "transverse fluctuation exponent of the interface around its limit ray"},
    {Experiment::coupling, "coupling", 0.5, 0.5, 60, 0.0,
     "replica,n_box,events,jumps,verified,ok",
     "exact replay of the growth table as an exclusion process"},
    {Experiment::duality, "duality", 0.5, 0.5, 120, 0.0,
     "replica,nems_ok,y_count,y_mean",
     "local geodesic uniqueness and the reversed-weight law at equilibrium "
     "(lambda == rho)"},
    {Experiment::tasep, "tasep", 0.3, 0.6, 0, 200.0,
     "replica,x,x_over_t",
     "tagged second-class particle speed under the stationary two-sided "
     "profile"},
};

const ExperimentInfo& info_for(Experiment e) { return kInfo[(int)e]; }

bool uses_box(Experiment e) {
    return e != Experiment::clt && e != Experiment::tasep;
}

// ---------------------------------------------------------------- config --

ExperimentConfig finalize_config(const ExperimentConfig& in) {
    ExperimentConfig c = in;
    const ExperimentInfo& info = info_for(c.experiment);
    const std::string name = info.name;
    const bool box = uses_box(c.experiment);

    if (box && c.t != 0.0)
        throw UsageError(name + " runs to a lattice size; --t does not apply");
    if (!box && c.n != 0)
        throw UsageError(name + " runs to a time horizon; --n does not apply");

    if (c.lambda == -1.0) c.lambda = info.def_lambda;
    if (c.rho == -1.0) c.rho = info.def_rho;
    if (box && c.n == 0) c.n = info.def_n;
    if (!box && c.t == 0.0) c.t = info.def_t;

    if (!(c.lambda > 0.0 && c.lambda <= 1.0))
        throw UsageError("--lambda must lie in (0, 1]");
    if (!(c.rho >= 0.0 && c.rho < 1.0))
        throw UsageError("--rho must lie in [0, 1)");
    if (box && c.n < 8) throw UsageError("--n must be at least 8");
    if (box && c.n > 100000) throw UsageError("--n is capped at 100000");
    if (!box && !(c.t > 0.0 && c.t <= 1e7))
        throw UsageError("--t must lie in (0, 1e7]");
    if (c.replicas < 1) throw UsageError("--replicas must be at least 1");
    if (c.replicas > 1000000) throw UsageError("--replicas is capped at 1000000");
    if (c.threads < 0) throw UsageError("--threads must be nonnegative");
    if (c.threads == 0) {
        unsigned hw = std::thread::hardware_concurrency();
        c.threads = hw == 0 ? 1 : (int32_t)hw;
    }
    if (c.format != "csv" && c.format != "json")
        throw UsageError("--format must be csv or json");

    switch (c.experiment) {
    case Experiment::direction:
        if (!(c.lambda <= c.rho))
            throw UsageError("direction needs --lambda <= --rho "
                             "(deterministic direction regime)");
        break;
    case Experiment::udist:
        if (!(c.lambda > c.rho))
            throw UsageError("udist needs --lambda > --rho (fan regime)");
        break;
    case Experiment::clt:
        if (!(c.lambda < c.rho))
            throw UsageError("clt needs --lambda < --rho (shock regime)");
        if (clt_moments(DensityPair{c.lambda, c.rho}).divergent)
            throw UsageError("clt needs a wider gap between --lambda and "
                             "--rho (variance formulas diverge)");
        break;
    case Experiment::fluct:
        if (!(c.lambda <= c.rho))
            throw UsageError("fluct needs --lambda <= --rho "
                             "(deterministic direction regime)");
        if (c.n < 256)
            throw UsageError("fluct needs --n >= 256 (at least the two "
                             "radii 64 and 128)");
        break;
    case Experiment::duality:
        if (c.lambda != c.rho)
            throw UsageError("duality needs --lambda equal to --rho "
                             "(equilibrium staircase)");
        break;
    default:
        break;
    }

    if (c.out.empty()) c.out = name + "." + c.format;
    return c;
}

// ------------------------------------------------------- replica bodies --

struct Rows {
    std::vector<std::vector<double>> rows;
    std::vector<double> extras; // duality: pooled reversed weights
};

struct ReplicaOutput {
    std::vector<std::vector<double>> rows;
    std::vector<double> extras;
    bool retried = false;
    bool failed = false;
    bool loaded = false; // came from a resume manifest
    std::string error;
};

RngStream replica_stream(const ExperimentConfig& c, int64_t idx) {
    return RngStream{c.seed, (uint64_t)idx};
}

// staircase arms sampled exactly to the table order; the box hugs the arm
// extents so every table row is weight-covered
GrowthTable replica_table(const ExperimentConfig& c, int64_t idx, int32_t n,
                          InitialInterface& ifc) {
    RngStream rs = replica_stream(c, idx);
    ifc = sample_random_walk(c.lambda, c.rho, n, rs);
    LatticeBox box{{ifc.alpha_at(n) + 1, ifc.beta_at(n) + 1}, {n, n}};
    WeightField field = sample_weights(box, rs);
    return compute_growth(field, ifc, n);
}

Rows shape_body(const ExperimentConfig& c, int64_t idx) {
    const int32_t n = c.n;
    const DensityPair d{c.lambda, c.rho};
    InitialInterface ifc;
    GrowthTable table = replica_table(c, idx, n, ifc);
    Rows out;
    for (int k = 1; k <= 25; ++k) {
        double tn = std::tan((double)k / 26.0 * std::numbers::pi / 2.0);
        Site z = tn <= 1.0
                     ? Site{n, (int32_t)std::lround(n * tn)}
                     : Site{(int32_t)std::lround(n / tn), n};
        double g = table.g_at(z);
        double p = shape_p(d, (double)z.x / n, (double)z.y / n).p;
        out.rows.push_back({(double)idx, (double)k, (double)z.x, (double)z.y,
                            g, p, g / n / p});
    }
    return out;
}

std::optional<Rows> direction_body(const ExperimentConfig& c, int64_t idx,
                                   int scale) {
    const int32_t n = c.n;
    RngStream rs = replica_stream(c, idx);
    TraceOptions opt;
    opt.box_n = scale * (5 * n / 4 + 64);
    opt.max_steps = 2 * (int64_t)opt.box_n + 4;
    opt.exit_marks = {n / 2, n};
    InitialInterface ifc =
        sample_random_walk(c.lambda, c.rho, default_truncation(opt.box_n), rs);
    TraceResult tr = trace_interface(ifc, opt, stream_row_weights(rs));
    for (double v : tr.exit_tan)
        if (std::isnan(v)) return std::nullopt;
    Rows out;
    out.rows.push_back({(double)idx, (double)(n / 2), tr.exit_tan[0]});
    out.rows.push_back({(double)idx, (double)n, tr.exit_tan[1]});
    return out;
}

std::optional<Rows> udist_body(const ExperimentConfig& c, int64_t idx,
                               int scale) {
    const int32_t n = c.n;
    RngStream rs = replica_stream(c, idx);
    TraceOptions opt;
    opt.box_n = scale * (5 * n / 4 + 64);
    opt.col_cap = scale * (n + 128); // the exit column never passes n + 1
    opt.max_steps = 2 * (int64_t)opt.box_n + 4;
    opt.exit_marks = {n};
    InitialInterface ifc =
        sample_random_walk(c.lambda, c.rho, default_truncation(opt.box_n), rs);
    TraceResult tr = trace_interface(ifc, opt, stream_row_weights(rs));
    if (std::isnan(tr.exit_tan[0])) return std::nullopt;
    Rows out;
    out.rows.push_back(
        {(double)idx, tr.exit_tan[0], u_from_tan(tr.exit_tan[0])});
    return out;
}

std::optional<Rows> clt_body(const ExperimentConfig& c, int64_t idx,
                             int scale) {
    const double t = c.t;
    const CltMoments m = clt_moments(DensityPair{c.lambda, c.rho});
    RngStream rs = replica_stream(c, idx);
    TraceOptions opt;
    opt.col_cap = scale * ((int32_t)std::ceil(t * m.mean_i_rate * 1.3) + 200);
    opt.row_cap = scale * ((int32_t)std::ceil(t * m.mean_j_rate * 1.3) + 200);
    opt.box_n = std::max(opt.col_cap, opt.row_cap) + 64;
    opt.stop_time = t;
    InitialInterface ifc =
        sample_random_walk(c.lambda, c.rho, default_truncation(opt.box_n), rs);
    TraceResult tr = trace_interface(ifc, opt, stream_row_weights(rs));
    if (tr.hit_cap || tr.hit_boundary) return std::nullopt;
    Site z = psi_at(tr.path, t);
    Rows out;
    out.rows.push_back({(double)idx, (double)z.x, (double)z.y});
    return out;
}

std::vector<int32_t> fluct_radii(int32_t n) {
    std::vector<int32_t> radii;
    for (int32_t r = 64; r <= n / 2; r *= 2) radii.push_back(r);
    return radii;
}

std::optional<Rows> fluct_body(const ExperimentConfig& c, int64_t idx,
                               int scale) {
    const std::vector<int32_t> radii = fluct_radii(c.n);
    const int32_t R = radii.back();
    const double w = w_star(DensityPair{c.lambda, c.rho});
    RngStream rs = replica_stream(c, idx);
    TraceOptions opt;
    opt.box_n = scale * (5 * R / 4 + 64);
    opt.col_cap = scale * (R + 200);
    opt.row_cap =
        scale * ((int32_t)std::ceil(std::max(1.0, w) * R * 1.25) + 160);
    opt.max_steps = 2 * (int64_t)opt.box_n + 4;
    opt.exit_marks = radii;
    InitialInterface ifc =
        sample_random_walk(c.lambda, c.rho, default_truncation(opt.box_n), rs);
    TraceResult tr = trace_interface(ifc, opt, stream_row_weights(rs));
    Rows out;
    for (size_t i = 0; i < radii.size(); ++i) {
        double tn = tr.exit_tan[i];
        if (std::isnan(tn)) return std::nullopt;
        double m1 = (double)radii[i] + 1.0;
        // transverse distance from the w* ray at the box-exit scale; both
        // branches agree at tan == 1
        double dev = tn <= 1.0 ? m1 * std::abs(tn - w)
                               : m1 * std::abs(1.0 - w / tn);
        out.rows.push_back({(double)idx, (double)radii[i], dev});
    }
    return out;
}

Rows coupling_body(const ExperimentConfig& c, int64_t idx) {
    const int32_t n = c.n;
    InitialInterface ifc;
    GrowthTable table = replica_table(c, idx, n, ifc);
    Rows out;
    try {
        GrowthExclusion ge(table);
        ge.advance_all();
        out.rows.push_back({(double)idx, (double)n, (double)ge.events().size(),
                            (double)ge.path().times.size(),
                            (double)ge.verified_path_events(), 1.0});
    } catch (const CouplingViolation&) {
        out.rows.push_back({(double)idx, (double)n, 0.0, 0.0, 0.0, 0.0});
    }
    return out;
}

Rows duality_body(const ExperimentConfig& c, int64_t idx) {
    const int32_t n = c.n;
    InitialInterface ifc;
    GrowthTable table = replica_table(c, idx, n, ifc);
    CompetitionPath path;
    try {
        path = competition_interface(table, 2 * (int64_t)n + 2);
    } catch (const BoxExhausted& e) {
        path = e.partial;
    }
    bool ok = nems_geodesic_check(table, path, 12, 2);
    Rows out;
    // down-right staircase through the bulk: consecutive sites differ by
    // +e1 or -e2, so the reversed weights along it are jointly iid Exp(1)
    Site z{1, n - 1};
    bool step_right = true;
    while (z.x <= n - 1 && z.y >= 1) {
        out.extras.push_back(reversed_weight_at(table, z));
        if (step_right)
            z.x += 1;
        else
            z.y -= 1;
        step_right = !step_right;
    }
    double mean = out.extras.empty()
                      ? 0.0
                      : compensated_sum(out.extras) / (double)out.extras.size();
    out.rows.push_back({(double)idx, ok ? 1.0 : 0.0,
                        (double)out.extras.size(), mean});
    return out;
}

Rows tasep_body(const ExperimentConfig& c, int64_t idx) {
    const double t = c.t;
    RngStream rs = replica_stream(c, idx);
    TasepState st =
        nu_second_class_state(c.lambda, c.rho, harris_margin(t), rs);
    HarrisOptions opt;
    opt.t_max = t;
    opt.sample_times = {t};
    HarrisResult hr = harris_simulate(std::move(st), opt, rs);
    Rows out;
    out.rows.push_back(
        {(double)idx, (double)hr.tag_samples[0], (double)hr.tag_samples[0] / t});
    return out;
}

std::optional<Rows> dispatch(const ExperimentConfig& c, int64_t idx,
                             int scale) {
    switch (c.experiment) {
    case Experiment::shape: return shape_body(c, idx);
    case Experiment::direction: return direction_body(c, idx, scale);
    case Experiment::udist: return udist_body(c, idx, scale);
    case Experiment::clt: return clt_body(c, idx, scale);
    case Experiment::fluct: return fluct_body(c, idx, scale);
    case Experiment::coupling: return coupling_body(c, idx);
    case Experiment::duality: return duality_body(c, idx);
    case Experiment::tasep: return tasep_body(c, idx);
    }
    throw DomainError("unknown experiment id");
}

// run one replica; geometry shortfalls retry once at doubled scale (the
// site-keyed streams make the rerun an extension of the same realization)
ReplicaOutput run_replica(const ExperimentConfig& c, int64_t idx) {
    ReplicaOutput out;
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string why;
        try {
            auto r = dispatch(c, idx, attempt == 0 ? 1 : 2);
            if (r) {
                out.rows = std::move(r->rows);
                out.extras = std::move(r->extras);
                return out;
            }
            why = "geometry caps exceeded";
        } catch (const BoxExhausted&) {
            why = "path left the box";
        } catch (const CoverageError& e) {
            why = e.what();
        } catch (const HorizonError& e) {
            why = e.what();
        }
        if (attempt == 1) {
            out.failed = true;
            out.error = why + " (after doubling)";
            return out;
        }
        out.retried = true;
    }
    return out; // unreachable
}

// ------------------------------------------------------------ aggregate --

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : compensated_sum(v) / (double)v.size();
}

double sd_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    return std::sqrt(covariance_summary(v, v).var_x);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

bool in_band(double x, double lo, double hi) {
    return std::isfinite(x) && lo <= x && x <= hi;
}

Verdict band_verdict(std::string name, double observed, double lo, double hi,
                     std::string note = "") {
    return Verdict{std::move(name), in_band(observed, lo, hi), observed, lo,
                   hi, std::move(note)};
}

// failing placeholder when too few replicas completed to aggregate
Verdict too_few(std::string name, double lo, double hi) {
    return Verdict{std::move(name), false,
                   std::numeric_limits<double>::quiet_NaN(), lo, hi,
                   "too few completed replicas"};
}

// column values across completed replicas, optionally filtered by another
// column's value
std::vector<double> column(const std::vector<ReplicaOutput>& slots, size_t col,
                           int key_col = -1, double key = 0.0) {
    std::vector<double> out;
    for (const auto& s : slots) {
        if (s.failed) continue;
        for (const auto& r : s.rows)
            if (key_col < 0 || r[(size_t)key_col] == key)
                out.push_back(r[col]);
    }
    return out;
}

std::vector<Verdict> shape_verdicts(const ExperimentConfig&,
                                    const std::vector<ReplicaOutput>& slots) {
    if (column(slots, 6).empty())
        return {too_few("ray_ratio_band", 0.95, 1.05)};
    double worst = 1.0;
    int worst_ray = 0;
    for (int k = 1; k <= 25; ++k) {
        double m = mean_of(column(slots, 6, 1, (double)k));
        if (std::abs(m - 1.0) > std::abs(worst - 1.0)) {
            worst = m;
            worst_ray = k;
        }
    }
    return {band_verdict("ray_ratio_band", worst, 0.95, 1.05,
                         strf("worst ray %d of 25", worst_ray))};
}

std::vector<Verdict> direction_verdicts(const ExperimentConfig& c,
                                        const std::vector<ReplicaOutput>& slots) {
    const double w = w_star(DensityPair{c.lambda, c.rho});
    std::vector<double> full = column(slots, 2, 1, (double)c.n);
    std::vector<double> half = column(slots, 2, 1, (double)(c.n / 2));
    if (full.size() < 2 || half.size() < 2)
        return {too_few("mean_tangent", 0.95 * w, 1.05 * w),
                too_few("spread_shrinks", 0.0, 1.0)};
    double sd_full = sd_of(full), sd_half = sd_of(half);
    double ratio = sd_half > 0.0 ? sd_full / sd_half
                                 : std::numeric_limits<double>::infinity();
    return {
        band_verdict("mean_tangent", mean_of(full), 0.95 * w, 1.05 * w,
                     strf("limit %.6g, n = %d", w, c.n)),
        band_verdict("spread_shrinks", ratio, 0.0, 1.0,
                     strf("sd %.4g at n vs %.4g at n/2", sd_full, sd_half)),
    };
}

std::vector<Verdict> udist_verdicts(const ExperimentConfig& c,
                                    const std::vector<ReplicaOutput>& slots) {
    DirectionPrediction pred = direction_prediction(DensityPair{c.lambda, c.rho});
    std::vector<double> us = column(slots, 2);
    const double lo = pred.u_lo, hi = pred.u_hi;
    if (us.empty())
        return {too_few("speed_uniform_ks", 0.01, 1.0),
                too_few("support_band", 0.0, 0.05)};
    // finite boxes overshoot the support at vanishing scale; the limit cdf
    // is compared with the overshoot clamped to the endpoints
    KsResult ks = ks_cdf_test(us, [lo, hi](double u) {
        return std::clamp((u - lo) / (hi - lo), 0.0, 1.0);
    });
    size_t outside = 0;
    for (double u : us)
        if (u < lo || u > hi) ++outside;
    double frac = us.empty() ? 0.0 : (double)outside / (double)us.size();
    // the edge rays overshoot the limit support with mass of order n^{-1/3};
    // the cap tracks that rate and floors at the asymptotic tolerance
    double cap = std::max(0.05, 1.5 * std::pow((double)c.n, -1.0 / 3.0));
    return {
        band_verdict("speed_uniform_ks", ks.p, 0.01, 1.0,
                     strf("U on [%.4g, %.4g], %zu samples", lo, hi, us.size())),
        band_verdict("support_band", frac, 0.0, cap,
                     strf("%zu of %zu outside the limit support", outside,
                          us.size())),
    };
}

std::vector<Verdict> clt_verdicts(const ExperimentConfig& c,
                                  const std::vector<ReplicaOutput>& slots) {
    const double t = c.t;
    const CltMoments m = clt_moments(DensityPair{c.lambda, c.rho});
    std::vector<double> is = column(slots, 1), js = column(slots, 2);
    if (is.size() < 2) {
        std::vector<Verdict> v;
        for (const char* name : {"mean_i", "mean_j", "var_i", "var_j", "cov",
                                 "gauss_i", "gauss_j"})
            v.push_back(too_few(name, 0.0, 0.0));
        return v;
    }
    MomentSummary s = covariance_summary(is, js);
    const double reps = (double)is.size();
    auto rel_band = [](double rate, double tol) {
        double a = rate * (1.0 - tol), b = rate * (1.0 + tol);
        return std::pair<double, double>{std::min(a, b), std::max(a, b)};
    };
    std::vector<Verdict> v;
    // bands floor at the target precision but never cut inside three
    // standard errors of the estimator, so small-replica runs stay honest
    double se_mean_i = std::sqrt(m.var_i_rate / (t * reps)) / m.mean_i_rate;
    double se_mean_j = std::sqrt(m.var_j_rate / (t * reps)) / m.mean_j_rate;
    auto [ml1, mh1] = rel_band(m.mean_i_rate, std::max(0.02, 3.0 * se_mean_i));
    auto [ml2, mh2] = rel_band(m.mean_j_rate, std::max(0.02, 3.0 * se_mean_j));
    v.push_back(band_verdict("mean_i", s.mean_x / t, ml1, mh1));
    v.push_back(band_verdict("mean_j", s.mean_y / t, ml2, mh2));
    double se_var = std::sqrt(2.0 / (reps - 1.0));
    double se_cov = std::sqrt((m.var_i_rate * m.var_j_rate /
                                   (m.cov_rate * m.cov_rate) +
                               1.0) /
                              (reps - 1.0));
    auto [vl1, vh1] = rel_band(m.var_i_rate, std::max(0.10, 3.0 * se_var));
    auto [vl2, vh2] = rel_band(m.var_j_rate, std::max(0.10, 3.0 * se_var));
    auto [cl, ch] = rel_band(m.cov_rate, std::max(0.10, 3.0 * se_cov));
    v.push_back(band_verdict("var_i", s.var_x / t, vl1, vh1));
    v.push_back(band_verdict("var_j", s.var_y / t, vl2, vh2));
    v.push_back(band_verdict("cov", s.cov / t, cl, ch));
    // margins standardized by the limit moments, not the sample ones, so
    // the ks reference stays distribution-free
    auto gauss = [&](const std::vector<double>& xs, double mean_rate,
                     double var_rate, const char* name) {
        std::vector<double> zs;
        zs.reserve(xs.size());
        double mu = t * mean_rate, sd = std::sqrt(t * var_rate);
        for (double x : xs) zs.push_back((x - mu) / sd);
        KsResult ks = ks_cdf_test(zs, [](double z) { return normal_cdf(z); });
        v.push_back(band_verdict(name, ks.p, 0.01, 1.0,
                                 strf("%zu samples", xs.size())));
    };
    gauss(is, m.mean_i_rate, m.var_i_rate, "gauss_i");
    gauss(js, m.mean_j_rate, m.var_j_rate, "gauss_j");
    return v;
}

std::vector<Verdict> fluct_verdicts(const ExperimentConfig& c,
                                    const std::vector<ReplicaOutput>& slots) {
    const std::vector<int32_t> radii32 = fluct_radii(c.n);
    std::vector<double> radii(radii32.begin(), radii32.end());
    std::vector<std::vector<double>> devs(radii.size());
    for (const auto& s : slots) {
        if (s.failed) continue;
        for (size_t i = 0; i < radii.size(); ++i)
            devs[i].push_back(s.rows[i][2]);
    }
    const bool equilibrium = c.lambda == c.rho;
    const double lo = equilibrium ? 0.55 : 0.40;
    const double hi = equilibrium ? 0.80 : 0.60;
    if (devs[0].size() < 8)
        return {band_verdict("slope_band",
                             std::numeric_limits<double>::quiet_NaN(), lo, hi,
                             "too few completed replicas for a fit")};
    ExponentFit fit = fluctuation_exponent(radii, devs,
                                           RngStream{c.seed, 1ull << 40});
    return {band_verdict("slope_band", fit.slope, lo, hi,
                         strf("bootstrap [%.3f, %.3f], %zu radii x %zu "
                              "replicas",
                              fit.boot_lo, fit.boot_hi, radii.size(),
                              devs[0].size()))};
}

std::vector<Verdict> coupling_verdicts(const ExperimentConfig&,
                                       const std::vector<ReplicaOutput>& slots) {
    std::vector<double> oks = column(slots, 5);
    if (oks.empty()) return {too_few("dictionary_exact", 0.0, 0.0)};
    double bad = 0.0;
    for (double ok : oks)
        if (ok != 1.0) bad += 1.0;
    return {band_verdict("dictionary_exact", bad, 0.0, 0.0,
                         strf("%zu replays", oks.size()))};
}

std::vector<Verdict> duality_verdicts(const ExperimentConfig&,
                                      const std::vector<ReplicaOutput>& slots) {
    std::vector<double> oks = column(slots, 1);
    double bad = 0.0;
    for (double ok : oks)
        if (ok != 1.0) bad += 1.0;
    std::vector<double> ys;
    for (const auto& s : slots)
        if (!s.failed)
            ys.insert(ys.end(), s.extras.begin(), s.extras.end());
    if (oks.empty() || ys.empty())
        return {too_few("local_geodesics", 0.0, 0.0),
                too_few("reversed_exp_ks", 0.01, 1.0)};
    KsResult ks = ks_cdf_test(
        ys, [](double y) { return y <= 0.0 ? 0.0 : 1.0 - std::exp(-y); });
    return {
        band_verdict("local_geodesics", bad, 0.0, 0.0,
                     strf("%zu interfaces checked", oks.size())),
        band_verdict("reversed_exp_ks", ks.p, 0.01, 1.0,
                     strf("%zu pooled bulk weights", ys.size())),
    };
}

std::vector<Verdict> tasep_verdicts(const ExperimentConfig& c,
                                    const std::vector<ReplicaOutput>& slots) {
    const double target = 1.0 - c.lambda - c.rho;
    std::vector<double> speeds = column(slots, 2);
    if (speeds.empty())
        return {too_few("mean_speed", target - 0.03, target + 0.03)};
    return {band_verdict("mean_speed", mean_of(speeds), target - 0.03,
                         target + 0.03,
                         strf("limit %.6g, %zu runs", target, speeds.size()))};
}

std::vector<Verdict> make_verdicts(const ExperimentConfig& c,
                                   const std::vector<ReplicaOutput>& slots) {
    switch (c.experiment) {
    case Experiment::shape: return shape_verdicts(c, slots);
    case Experiment::direction: return direction_verdicts(c, slots);
    case Experiment::udist: return udist_verdicts(c, slots);
    case Experiment::clt: return clt_verdicts(c, slots);
    case Experiment::fluct: return fluct_verdicts(c, slots);
    case Experiment::coupling: return coupling_verdicts(c, slots);
    case Experiment::duality: return duality_verdicts(c, slots);
    case Experiment::tasep: return tasep_verdicts(c, slots);
    }
    throw DomainError("unknown experiment id");
}

// ------------------------------------------------------------- artifacts --

void atomic_write(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ResourceError("cannot open " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw ResourceError("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::vector<std::string> split_schema(const char* schema) {
    std::vector<std::string> cols;
    std::stringstream ss(schema);
    std::string tok;
    while (std::getline(ss, tok, ',')) cols.push_back(tok);
    return cols;
}

std::string rows_csv(const ExperimentConfig& c,
                     const std::vector<ReplicaOutput>& slots) {
    std::string out = info_for(c.experiment).schema;
    out += '\n';
    for (const auto& s : slots) {
        if (s.failed) continue;
        for (const auto& r : s.rows) {
            for (size_t i = 0; i < r.size(); ++i) {
                if (i) out += ',';
                out += cell(r[i]);
            }
            out += '\n';
        }
    }
    return out;
}

std::string rows_json(const ExperimentConfig& c,
                      const std::vector<ReplicaOutput>& slots) {
    std::vector<std::string> cols = split_schema(info_for(c.experiment).schema);
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& s : slots) {
        if (s.failed) continue;
        for (const auto& r : s.rows) {
            nlohmann::ordered_json row;
            for (size_t i = 0; i < r.size() && i < cols.size(); ++i)
                row[cols[i]] = r[i];
            arr.push_back(std::move(row));
        }
    }
    return arr.dump(1) + "\n";
}

std::string utc_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string report_json(const RunReport& rep) {
    const ExperimentConfig& c = rep.config;
    nlohmann::ordered_json j;
    j["config"] = {{"experiment", experiment_name(c.experiment)},
                   {"lambda", c.lambda},
                   {"rho", c.rho},
                   {"n", c.n},
                   {"t", c.t},
                   {"replicas", c.replicas},
                   {"seed", c.seed},
                   {"threads", c.threads},
                   {"out", c.out},
                   {"format", c.format}};
    j["verdicts"] = nlohmann::ordered_json::array();
    for (const auto& v : rep.verdicts)
        j["verdicts"].push_back({{"name", v.name},
                                 {"pass", v.pass},
                                 {"observed", v.observed},
                                 {"lo", v.lo},
                                 {"hi", v.hi},
                                 {"note", v.note}});
    j["all_pass"] = rep.all_pass;
    j["replicas"] = {{"completed", rep.replicas_completed},
                     {"retried", rep.replicas_retried},
                     {"failed", rep.replicas_failed}};
    j["artifacts"] = {{"rows", rep.rows_path}, {"report", rep.report_path}};
    // the only non-reproducible bytes of a run live here
    j["metadata"] = {{"finished_at", utc_now()},
                     {"wall_seconds", rep.wall_seconds}};
    return j.dump(1) + "\n";
}

// ------------------------------------------------------ resume manifest --

std::string config_fingerprint(const ExperimentConfig& c) {
    return strf("experiment=%s\nlambda=%.17g\nrho=%.17g\nn=%d\nt=%.17g\n"
                "replicas=%d\nseed=%llu\n",
                experiment_name(c.experiment), c.lambda, c.rho, c.n, c.t,
                c.replicas, (unsigned long long)c.seed);
}

fs::path replica_file(const fs::path& workdir, int64_t idx) {
    return workdir / strf("r%lld.csv", (long long)idx);
}

void write_replica_file(const fs::path& workdir, int64_t idx,
                        const ReplicaOutput& r) {
    std::string body = strf("m,retried,%d\nm,failed,%d\n", r.retried ? 1 : 0,
                            r.failed ? 1 : 0);
    if (r.failed) {
        std::string msg = r.error;
        for (char& ch : msg)
            if (ch == '\n') ch = ';';
        body += "m,error," + msg + "\n";
    }
    for (const auto& row : r.rows) {
        body += 'r';
        for (double v : row) body += ',' + cell(v);
        body += '\n';
    }
    for (double v : r.extras) body += "e," + cell(v) + "\n";
    atomic_write(replica_file(workdir, idx), body);
}

bool load_replica_file(const fs::path& workdir, int64_t idx,
                       ReplicaOutput& out) {
    std::ifstream in(replica_file(workdir, idx));
    if (!in) return false;
    ReplicaOutput r;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("m,retried,", 0) == 0) {
            r.retried = line.substr(10) == "1";
        } else if (line.rfind("m,failed,", 0) == 0) {
            r.failed = line.substr(9) == "1";
        } else if (line.rfind("m,error,", 0) == 0) {
            r.error = line.substr(8);
        } else if (line.rfind("r,", 0) == 0 || line.rfind("e,", 0) == 0) {
            std::vector<double> vals;
            size_t pos = 2;
            while (pos <= line.size()) {
                size_t next = line.find(',', pos);
                std::string tok = line.substr(
                    pos, next == std::string::npos ? next : next - pos);
                try {
                    size_t used = 0;
                    vals.push_back(std::stod(tok, &used));
                    if (used != tok.size()) return false;
                } catch (const std::exception&) {
                    return false;
                }
                if (next == std::string::npos) break;
                pos = next + 1;
            }
            if (line[0] == 'r')
                r.rows.push_back(std::move(vals));
            else if (vals.size() == 1)
                r.extras.push_back(vals[0]);
            else
                return false;
        } else {
            return false;
        }
    }
    r.loaded = true;
    out = std::move(r);
    return true;
}

// -------------------------------------------------------- settings file --

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// strict "key = value" lines; '#' starts a comment anywhere
std::vector<std::pair<std::string, std::string>>
read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("--config: cannot open '" + path + "'");
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::string body = trim(line);
        if (body.empty()) continue;
        size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw UsageError(strf("%s:%d: expected 'key = value', got '%s'",
                                  path.c_str(), ln, body.c_str()));
        std::string key = trim(body.substr(0, eq));
        std::string val = trim(body.substr(eq + 1));
        if (key.empty() || val.empty())
            throw UsageError(strf("%s:%d: empty key or value", path.c_str(),
                                  ln));
        for (const auto& [k, v] : out)
            if (k == key)
                throw UsageError(strf("%s:%d: duplicate key '%s'",
                                      path.c_str(), ln, key.c_str()));
        out.emplace_back(key, val);
    }
    return out;
}

double config_double(const std::string& key, const std::string& val) {
    try {
        size_t used = 0;
        double v = std::stod(val, &used);
        if (used == val.size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("config: malformed value for '" + key + "': '" + val +
                     "'");
}

int64_t config_int(const std::string& key, const std::string& val) {
    try {
        size_t used = 0;
        int64_t v = std::stoll(val, &used);
        if (used == val.size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("config: malformed value for '" + key + "': '" + val +
                     "'");
}

uint64_t config_uint(const std::string& key, const std::string& val) {
    if (val.empty() || val[0] == '-')
        throw UsageError("config: malformed value for '" + key + "': '" + val +
                         "'");
    try {
        size_t used = 0;
        uint64_t v = std::stoull(val, &used);
        if (used == val.size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("config: malformed value for '" + key + "': '" + val +
                     "'");
}

bool config_bool(const std::string& key, const std::string& val) {
    if (val == "true" || val == "1") return true;
    if (val == "false" || val == "0") return false;
    throw UsageError("config: malformed value for '" + key + "': '" + val +
                     "'");
}

// file values fill in every option the command line left unset
void apply_config_file(ExperimentConfig& cfg, const CLI::App* sub,
                       const std::string& path) {
    auto given = [&](const char* flag) { return sub->count(flag) > 0; };
    for (const auto& [key, val] : read_config_file(path)) {
        if (key == "lambda") {
            if (!given("--lambda")) cfg.lambda = config_double(key, val);
        } else if (key == "rho") {
            if (!given("--rho")) cfg.rho = config_double(key, val);
        } else if (key == "n") {
            if (!given("--n")) cfg.n = (int32_t)config_int(key, val);
        } else if (key == "t") {
            if (!given("--t")) cfg.t = config_double(key, val);
        } else if (key == "replicas") {
            if (!given("--replicas"))
                cfg.replicas = (int32_t)config_int(key, val);
        } else if (key == "seed") {
            if (!given("--seed")) cfg.seed = config_uint(key, val);
        } else if (key == "threads") {
            if (!given("--threads")) cfg.threads = (int32_t)config_int(key, val);
        } else if (key == "out") {
            if (!given("--out")) cfg.out = val;
        } else if (key == "format") {
            if (!given("--format")) cfg.format = val;
        } else if (key == "resume") {
            if (!given("--resume")) cfg.resume = config_bool(key, val);
        } else {
            throw UsageError("config: unknown key '" + key + "'");
        }
    }
}

} // namespace

// ----------------------------------------------------------- public api --

const char* experiment_name(Experiment e) { return info_for(e).name; }

Experiment experiment_from_name(const std::string& name) {
    for (const auto& info : kInfo)
        if (name == info.name) return info.id;
    throw UsageError("unknown experiment '" + name + "'");
}

RunReport run_experiment(const ExperimentConfig& config) {
    auto t0 = std::chrono::steady_clock::now();
    const ExperimentConfig c = finalize_config(config);

    fs::path out_path(c.out);
    if (!out_path.parent_path().empty())
        fs::create_directories(out_path.parent_path());
    fs::path workdir = fs::path(c.out + ".work");
    fs::path fingerprint_file = workdir / "config.txt";
    const std::string fingerprint = config_fingerprint(c);
    fs::create_directories(workdir);
    if (c.resume && fs::exists(fingerprint_file)) {
        std::ifstream in(fingerprint_file);
        std::stringstream ss;
        ss << in.rdbuf();
        if (ss.str() != fingerprint)
            throw UsageError("--resume found a manifest written by a "
                             "different configuration in " + workdir.string());
    }
    atomic_write(fingerprint_file, fingerprint);

    std::vector<ReplicaOutput> slots((size_t)c.replicas);
    if (c.resume)
        for (int64_t i = 0; i < c.replicas; ++i)
            load_replica_file(workdir, i, slots[(size_t)i]);

    std::atomic<int64_t> next{0};
    std::vector<std::exception_ptr> errs((size_t)c.replicas);
    auto worker = [&]() {
        for (;;) {
            int64_t i = next.fetch_add(1);
            if (i >= c.replicas) return;
            if (slots[(size_t)i].loaded) continue;
            try {
                slots[(size_t)i] = run_replica(c, i);
                write_replica_file(workdir, i, slots[(size_t)i]);
            } catch (...) {
                errs[(size_t)i] = std::current_exception();
            }
        }
    };
    if (c.threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve((size_t)c.threads);
        for (int32_t i = 0; i < c.threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e); // first failure in replica order

    RunReport rep;
    rep.config = c;
    for (int64_t i = 0; i < c.replicas; ++i) {
        const auto& s = slots[(size_t)i];
        if (s.retried) ++rep.replicas_retried;
        if (s.failed)
            rep.replicas_failed.push_back((int32_t)i);
        else
            ++rep.replicas_completed;
    }

    rep.verdicts = make_verdicts(c, slots);
    std::string note;
    for (int32_t i : rep.replicas_failed) {
        note = strf("replica %d: %s", i, slots[(size_t)i].error.c_str());
        break;
    }
    rep.verdicts.push_back(band_verdict("replica_completion",
                                        (double)rep.replicas_failed.size(),
                                        0.0, 0.0, note));
    rep.all_pass = true;
    for (const auto& v : rep.verdicts) rep.all_pass = rep.all_pass && v.pass;

    rep.rows_path = c.out;
    rep.report_path = c.out + ".report.json";
    atomic_write(out_path,
                 c.format == "csv" ? rows_csv(c, slots) : rows_json(c, slots));
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    atomic_write(fs::path(rep.report_path), report_json(rep));
    fs::remove_all(workdir);
    return rep;
}

std::optional<ExperimentConfig> parse_config(const std::vector<std::string>& args) {
    ExperimentConfig cfg;
    std::string config_path;
    CLI::App app{"corner growth laboratory: limit-law experiments for the "
                 "two-cluster exponential growth model",
                 "cglab"};
    app.require_subcommand(1);
    for (const auto& info : kInfo) {
        std::string desc = std::string(info.blurb);
        if (info.schema[0]) desc += strf(" [rows: %s]", info.schema);
        CLI::App* sub = app.add_subcommand(info.name, desc);
        sub->add_option("--config", config_path,
                        "key = value settings file ('#' comments); "
                        "command-line flags override it");
        sub->add_option("--lambda", cfg.lambda,
                        strf("left-arm density in (0, 1]; default %g",
                             info.def_lambda));
        sub->add_option("--rho", cfg.rho,
                        strf("right-arm density in [0, 1); default %g",
                             info.def_rho));
        sub->add_option("--n", cfg.n,
                        uses_box(info.id)
                            ? strf("box side; default %d", info.def_n)
                            : std::string("not applicable here"));
        sub->add_option("--t", cfg.t,
                        uses_box(info.id)
                            ? std::string("not applicable here")
                            : strf("time horizon; default %g", info.def_t));
        sub->add_option("--replicas", cfg.replicas,
                        "independent runs; default 100");
        sub->add_option("--seed", cfg.seed, "base rng seed; default 1");
        sub->add_option("--threads", cfg.threads,
                        "worker threads; 0 = all hardware threads");
        sub->add_option("--out", cfg.out,
                        "rows artifact path; default <experiment>.<format>");
        sub->add_option("--format", cfg.format, "csv or json; default csv")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_flag("--resume", cfg.resume,
                      "reuse completed replicas from <out>.work/");
    }
    // the vector overload consumes tokens back to front
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        auto subs = app.get_subcommands();
        std::cout << (subs.empty() ? app.help() : subs[0]->help());
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    const CLI::App* sub = app.get_subcommands().at(0);
    cfg.experiment = experiment_from_name(sub->get_name());
    if (!config_path.empty()) apply_config_file(cfg, sub, config_path);
    return finalize_config(cfg);
}

} // namespace cgl
