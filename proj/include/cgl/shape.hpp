#pragma once

#include <iosfwd>

#include "cgl/errors.hpp"

namespace cgl {

// Arm densities: lambda in (0,1] governs the alpha arm, rho in [0,1) the
// beta arm. lambda = 1 / rho = 0 degenerate to the packed axes staircase.
struct DensityPair {
    double lambda = 1.0;
    double rho = 0.0;
};

void validate_densities(const DensityPair& d);

// limit of g(Nx, Ny)/N for the axes staircase
double mu_shape(double x, double y);

enum class ShapeRegime { curved, left_linear, right_linear };

struct ShapeValue {
    double p;  // max(p1, p2)
    double p1; // alpha-arm branch
    double p2; // beta-arm branch
    ShapeRegime regime;
};

// one-sided branch thresholds: the alpha branch is curved up to slope
// d_lambda^2, the beta branch down to slope d_rho^2
double d_lambda(const DensityPair& d);
double d_rho(const DensityPair& d);
// slope of the deterministic interface direction when lambda <= rho
double w_star(const DensityPair& d);

ShapeValue shape_p(const DensityPair& d, double x, double y);

struct DirectionPrediction {
    bool deterministic;  // lambda <= rho
    double tan_theta;    // deterministic case: w*
    double tan_lo, tan_hi; // random case support [d_rho^2, d_lambda^2]
    double u_lo, u_hi;     // U support [1-2*lambda, 1-2*rho]
};
DirectionPrediction direction_prediction(const DensityPair& d);

// U = (1 - sqrt(tan)) / (1 + sqrt(tan)); tan >= 0 (inf allowed, giving -1)
double u_from_tan(double tan_theta);
// inverse, u in (-1, 1]
double tan_from_u(double u);
// interface position scale in the fan regime: psi(t)/t -> (i_coord, j_coord)
double i_coord(double u);
double j_coord(double u);

// second-class speed and interface scaling in the shock regime lambda < rho
struct CltMoments {
    double mean_i_rate, mean_j_rate; // (1-rho)(1-lambda), rho*lambda
    double var_i_rate, var_j_rate, cov_rate;
    bool divergent; // rho - lambda too small for the variance formulas
};
CltMoments clt_moments(const DensityPair& d);

// the {p = 1} level curve as "angle,x,y,regime" rows
void dump_shape_curve(const DensityPair& d, int samples, std::ostream& out);

} // namespace cgl
