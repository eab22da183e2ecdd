#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "cgl/errors.hpp"
#include "cgl/rng.hpp"

namespace cgl {

// Neumaier-compensated accumulation
double compensated_sum(const std::vector<double>& v);
// destructive median via nth_element; even sizes average the middle pair
double median(std::vector<double> v);

struct KsResult {
    double d = 0.0;        // sup-norm statistic
    double p = 0.0;        // asymptotic Kolmogorov p-value
    size_t n = 0;          // effective sample count
    size_t out_of_support = 0; // uniform test only: samples beyond tolerance
};

// survival function of the Kolmogorov distribution at the finite-n adjusted
// argument; n_eff = n for one sample, n*m/(n+m) for two
double kolmogorov_p(double d, double n_eff);

// one-sample tests; samples need not be sorted
KsResult ks_cdf_test(std::vector<double> xs,
                     const std::function<double(double)>& cdf);
// uniform on [lo, hi]; samples outside by more than tol are counted in
// out_of_support and clamped before the distance is taken
KsResult ks_uniform_test(std::vector<double> xs, double lo, double hi,
                         double tol = 1e-9);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct MomentSummary {
    size_t n = 0;
    double mean_x = 0.0, mean_y = 0.0;
    double var_x = 0.0, var_y = 0.0, cov = 0.0; // n-1 normalization
};
MomentSummary covariance_summary(const std::vector<double>& xs,
                                 const std::vector<double>& ys);

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    double boot_lo = 0.0, boot_hi = 0.0; // 2.5% / 97.5% bootstrap quantiles
    std::vector<double> medians;         // per-radius medians entering the fit
};

// Log-log least-squares slope of the per-radius median deviation.
// deviations[r][i] is replica i's deviation at radii[r]; every radius must
// carry the same replica count. Bootstrap resamples replica indices, shared
// across radii so cross-radius dependence within a replica is preserved.
ExponentFit fluctuation_exponent(const std::vector<double>& radii,
                                 const std::vector<std::vector<double>>& deviations,
                                 RngStream boot_stream, int boot_rounds = 1000);

} // namespace cgl
