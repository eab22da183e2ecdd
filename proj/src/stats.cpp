#include "cgl/stats.hpp"

#include <algorithm>
#include <cmath>

namespace cgl {

double compensated_sum(const std::vector<double>& v) {
    double s = 0.0, c = 0.0;
    for (double x : v) {
        double t = s + x;
        if (std::fabs(s) >= std::fabs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    return s + c;
}

double median(std::vector<double> v) {
    if (v.empty()) throw UsageError("median: empty sample");
    size_t h = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + h, v.end());
    double hi = v[h];
    if (v.size() % 2) return hi;
    double lo = *std::max_element(v.begin(), v.begin() + h);
    return 0.5 * (lo + hi);
}

double kolmogorov_p(double d, double n_eff) {
    if (d <= 0.0) return 1.0;
    double sn = std::sqrt(n_eff);
    double lam = (sn + 0.12 + 0.11 / sn) * d;
    if (lam < 1e-3) return 1.0;
    if (lam < 1.18) {
        // theta-function branch, fast convergence for small lambda
        double f = std::sqrt(2.0 * 3.14159265358979312) / lam;
        double cdf = 0.0;
        for (int k = 1;; k += 2) {
            double e = (double)k * (double)k;
            double term = std::exp(-e * 9.86960440108935799 / (8.0 * lam * lam));
            cdf += term;
            if (term < 1e-6 * cdf || k > 99) break;
        }
        double p = 1.0 - f * cdf;
        return p < 0.0 ? 0.0 : p;
    }
    // alternating tail series for large lambda
    double p = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 99; ++k) {
        double term = std::exp(-2.0 * (double)k * (double)k * lam * lam);
        p += sign * term;
        if (term < 1e-6 * (p > 0 ? p : 1e-300)) break;
        sign = -sign;
    }
    p *= 2.0;
    if (p < 0.0) p = 0.0;
    if (p > 1.0) p = 1.0;
    return p;
}

KsResult ks_cdf_test(std::vector<double> xs,
                     const std::function<double(double)>& cdf) {
    if (xs.empty()) throw UsageError("ks_cdf_test: empty sample");
    std::sort(xs.begin(), xs.end());
    size_t n = xs.size();
    double d = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double f = cdf(xs[i]);
        double hi = (double)(i + 1) / (double)n - f;
        double lo = f - (double)i / (double)n;
        if (hi > d) d = hi;
        if (lo > d) d = lo;
    }
    KsResult r;
    r.d = d;
    r.n = n;
    r.p = kolmogorov_p(d, (double)n);
    return r;
}

KsResult ks_uniform_test(std::vector<double> xs, double lo, double hi,
                         double tol) {
    if (!(hi > lo)) throw ParameterError("ks_uniform_test: needs hi > lo");
    size_t bad = 0;
    for (double& x : xs) {
        if (x < lo - tol || x > hi + tol) ++bad;
        x = std::min(hi, std::max(lo, x));
    }
    double w = hi - lo;
    KsResult r = ks_cdf_test(std::move(xs), [lo, w](double x) {
        return (x - lo) / w;
    });
    r.out_of_support = bad;
    return r;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw UsageError("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    size_t i = 0, j = 0;
    double d = 0.0;
    const double na = (double)a.size(), nb = (double)b.size();
    while (i < a.size() && j < b.size()) {
        double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        double gap = std::fabs((double)i / na - (double)j / nb);
        if (gap > d) d = gap;
    }
    KsResult r;
    r.d = d;
    r.n = a.size() + b.size();
    r.p = kolmogorov_p(d, na * nb / (na + nb));
    return r;
}

MomentSummary covariance_summary(const std::vector<double>& xs,
                                 const std::vector<double>& ys) {
    if (xs.size() != ys.size())
        throw UsageError("covariance_summary: length mismatch");
    if (xs.size() < 2) throw UsageError("covariance_summary: needs n >= 2");
    MomentSummary m;
    m.n = xs.size();
    double n = (double)m.n;
    m.mean_x = compensated_sum(xs) / n;
    m.mean_y = compensated_sum(ys) / n;
    std::vector<double> xx(m.n), yy(m.n), xy(m.n);
    for (size_t i = 0; i < m.n; ++i) {
        double dx = xs[i] - m.mean_x;
        double dy = ys[i] - m.mean_y;
        xx[i] = dx * dx;
        yy[i] = dy * dy;
        xy[i] = dx * dy;
    }
    m.var_x = compensated_sum(xx) / (n - 1.0);
    m.var_y = compensated_sum(yy) / (n - 1.0);
    m.cov = compensated_sum(xy) / (n - 1.0);
    return m;
}

namespace {

// least squares of log(median) on log(radius)
void loglog_fit(const std::vector<double>& radii,
                const std::vector<double>& med, double& slope,
                double& intercept) {
    size_t n = radii.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        if (!(med[i] > 0.0))
            throw DomainError("fluctuation_exponent: nonpositive median deviation");
        double x = std::log(radii[i]);
        double y = std::log(med[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double nn = (double)n;
    double den = nn * sxx - sx * sx;
    slope = (nn * sxy - sx * sy) / den;
    intercept = (sy - slope * sx) / nn;
}

} // namespace

ExponentFit fluctuation_exponent(const std::vector<double>& radii,
                                 const std::vector<std::vector<double>>& deviations,
                                 RngStream boot_stream, int boot_rounds) {
    if (radii.size() < 2)
        throw UsageError("fluctuation_exponent: needs at least two radii");
    if (deviations.size() != radii.size())
        throw UsageError("fluctuation_exponent: radii/deviation shape mismatch");
    const size_t reps = deviations[0].size();
    if (reps == 0) throw UsageError("fluctuation_exponent: empty replicas");
    for (const auto& r : deviations)
        if (r.size() != reps)
            throw UsageError("fluctuation_exponent: ragged replica counts");
    for (size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] > radii[i - 1]))
            throw UsageError("fluctuation_exponent: radii must increase");

    ExponentFit fit;
    fit.medians.resize(radii.size());
    for (size_t r = 0; r < radii.size(); ++r) fit.medians[r] = median(deviations[r]);
    loglog_fit(radii, fit.medians, fit.slope, fit.intercept);

    if (boot_rounds < 1) {
        fit.boot_lo = fit.boot_hi = fit.slope;
        return fit;
    }
    SequentialRng rng(boot_stream, domain::bootstrap);
    std::vector<double> slopes;
    slopes.reserve(boot_rounds);
    std::vector<size_t> pick(reps);
    std::vector<double> col(reps), med(radii.size());
    for (int b = 0; b < boot_rounds; ++b) {
        for (size_t i = 0; i < reps; ++i) pick[i] = (size_t)(rng.next_u64() % reps);
        for (size_t r = 0; r < radii.size(); ++r) {
            for (size_t i = 0; i < reps; ++i) col[i] = deviations[r][pick[i]];
            med[r] = median(col);
        }
        double s, c;
        loglog_fit(radii, med, s, c);
        slopes.push_back(s);
    }
    std::sort(slopes.begin(), slopes.end());
    size_t lo_i = (size_t)(0.025 * (double)slopes.size());
    size_t hi_i = (size_t)(0.975 * (double)slopes.size());
    if (hi_i >= slopes.size()) hi_i = slopes.size() - 1;
    fit.boot_lo = slopes[lo_i];
    fit.boot_hi = slopes[hi_i];
    return fit;
}

} // namespace cgl
