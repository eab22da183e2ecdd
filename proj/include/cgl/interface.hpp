#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cgl/errors.hpp"
#include "cgl/lattice.hpp"
#include "cgl/rng.hpp"

namespace cgl {

// Two-sided initial staircase. alpha[k-1] is the column of the k-th corner
// above the axis (corner point A_k = (alpha_k + 1, k)); beta[m-1] is the row
// of the m-th corner right of the axis (B_m = (m, beta_m + 1)). Both
// sequences are nonincreasing and <= -1; (lambda, rho) in (0,1] x [0,1) are
// the arm densities the staircase represents.
struct InitialInterface {
    std::vector<int32_t> alpha;
    std::vector<int32_t> beta;
    double lambda = 1.0;
    double rho = 0.0;

    // empirical slopes -alpha_K/K, -beta_M/M at the truncation end
    double slope_alpha = 0.0;
    double slope_beta = 0.0;

    int32_t alpha_at(int32_t k) const; // k >= 1, throws CoverageError past truncation
    int32_t beta_at(int32_t m) const;
    Site corner_a(int32_t k) const { return {alpha_at(k) + 1, k}; }
    Site corner_b(int32_t m) const { return {m, beta_at(m) + 1}; }
};

// Occupation variables of the matched exclusion configuration. left[i] is
// eta0(-1-i) for sites -1, -2, ...; right[i] is eta0(1+i) for sites 1, 2,
// .... The conventions eta0(0) = 0 and eta0(1) = 1 are implicit (right[0]
// is always 1).
struct ExclusionProfile {
    std::vector<uint8_t> left;
    std::vector<uint8_t> right;

    // occupancy at site j != 0,1 inside the stored range; sites 0 and 1
    // answer the conventions
    int occupied(int64_t j) const;
    int64_t lo() const { return -(int64_t)left.size(); }
    int64_t hi() const { return (int64_t)right.size(); }
};

// Validate and wrap explicit corner sequences. Throws ValidationError
// naming the first offending 1-based index, or ParameterError for bad
// densities.
InitialInterface build_deterministic(std::vector<int32_t> alpha,
                                     std::vector<int32_t> beta, double lambda,
                                     double rho);

// Sample the nu_{lambda,rho} staircase: the alpha arm is the record of a
// walk from (-1, 0) that rises with probability lambda, the beta arm of a
// walk from (0, -1) that descends with probability rho. `length` corners
// per arm. lambda = 1, rho = 0 degenerate to the axes staircase.
InitialInterface sample_random_walk(double lambda, double rho, int32_t length,
                                    RngStream stream);

// Flat staircase alpha_k = beta_m = -L with metadata lambda = 1, rho = 0.
InitialInterface build_flat_L(int32_t L, int32_t length);

// Default truncation: 4 x (box side).
inline int32_t default_truncation(int32_t box_n) { return 4 * box_n; }

// Corner-by-corner bijection between staircases and exclusion
// configurations: gamma0(j) - gamma0(j-1) = (1 - eta0(j), -eta0(j)).
ExclusionProfile to_exclusion(const InitialInterface& ifc);
InitialInterface from_exclusion(const ExclusionProfile& prof, double lambda,
                                double rho);

// Text format: "alpha:" / "beta:" lines of integers, optional "lambda:" and
// "rho:" lines, '#' comments. Parsing is strict: unknown keys, malformed
// numbers and constraint violations all throw.
InitialInterface parse_interface_text(std::istream& in);
std::string format_interface_text(const InitialInterface& ifc);

} // namespace cgl
