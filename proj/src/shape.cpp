#include "cgl/shape.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace cgl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const char* regime_name(ShapeRegime r) {
    switch (r) {
        case ShapeRegime::curved: return "curved";
        case ShapeRegime::left_linear: return "left_linear";
        default: return "right_linear";
    }
}

} // namespace

void validate_densities(const DensityPair& d) {
    if (!(d.lambda > 0.0) || d.lambda > 1.0)
        throw ParameterError("shape: lambda must be in (0,1]");
    if (!(d.rho >= 0.0) || d.rho >= 1.0)
        throw ParameterError("shape: rho must be in [0,1)");
}

double mu_shape(double x, double y) {
    if (!(x >= 0.0) || !(y >= 0.0))
        throw DomainError("mu_shape: needs x, y >= 0");
    double s = std::sqrt(x) + std::sqrt(y);
    return s * s;
}

double d_lambda(const DensityPair& d) {
    return d.lambda == 1.0 ? kInf : d.lambda / (1.0 - d.lambda);
}

double d_rho(const DensityPair& d) { return d.rho / (1.0 - d.rho); }

double w_star(const DensityPair& d) { return d_lambda(d) * d_rho(d); }

ShapeValue shape_p(const DensityPair& d, double x, double y) {
    validate_densities(d);
    if (!(x >= 0.0) || !(y >= 0.0))
        throw DomainError("shape_p: needs x, y >= 0");
    double mu = mu_shape(x, y);
    double ratio = y / x; // 0/0 -> NaN at the origin, both branches curved

    double dl = d_lambda(d);
    double dr = d_rho(d);

    // alpha branch: curved while y/x <= d_lambda^2, linear above; the NaN
    // ratio at the origin falls into the curved branch of both sides
    bool lin1 = ratio > dl * dl;
    double p1 = lin1 ? x / (1.0 - d.lambda) + y / d.lambda : mu;
    // beta branch: curved while y/x >= d_rho^2, linear below
    bool lin2 = ratio < dr * dr;
    double p2 = lin2 ? x / (1.0 - d.rho) + y / d.rho : mu;

    ShapeValue out;
    out.p1 = p1;
    out.p2 = p2;
    if (p1 >= p2) {
        out.p = p1;
        out.regime = lin1 ? ShapeRegime::left_linear : ShapeRegime::curved;
    } else {
        out.p = p2;
        out.regime = lin2 ? ShapeRegime::right_linear : ShapeRegime::curved;
    }
    return out;
}

DirectionPrediction direction_prediction(const DensityPair& d) {
    validate_densities(d);
    DirectionPrediction out;
    double dl = d_lambda(d);
    double dr = d_rho(d);
    out.deterministic = d.lambda <= d.rho;
    out.tan_theta = out.deterministic ? w_star(d)
                                      : std::numeric_limits<double>::quiet_NaN();
    out.tan_lo = dr * dr;
    out.tan_hi = dl * dl;
    out.u_lo = 1.0 - 2.0 * d.lambda;
    out.u_hi = 1.0 - 2.0 * d.rho;
    return out;
}

double u_from_tan(double tan_theta) {
    if (!(tan_theta >= 0.0))
        throw DomainError("u_from_tan: needs tan >= 0");
    if (std::isinf(tan_theta)) return -1.0;
    double s = std::sqrt(tan_theta);
    return (1.0 - s) / (1.0 + s);
}

double tan_from_u(double u) {
    if (!(u > -1.0) || u > 1.0)
        throw DomainError("tan_from_u: needs u in (-1, 1]");
    double s = (1.0 - u) / (1.0 + u);
    return s * s;
}

double i_coord(double u) { return (1.0 + u) * (1.0 + u) / 4.0; }
double j_coord(double u) { return (1.0 - u) * (1.0 - u) / 4.0; }

CltMoments clt_moments(const DensityPair& d) {
    validate_densities(d);
    if (!(d.lambda < d.rho))
        throw DomainError("clt_moments: defined for lambda < rho");
    CltMoments m;
    double la = d.lambda, ro = d.rho;
    m.mean_i_rate = (1.0 - ro) * (1.0 - la);
    m.mean_j_rate = ro * la;
    m.divergent = (ro - la) < 1e-6;
    double gap = ro - la;
    double common = ro * (1.0 - la) + la * (1.0 - ro);
    m.var_i_rate = (1.0 - ro) * (1.0 - la) * common / gap;
    m.var_j_rate = la * ro * common / gap;
    m.cov_rate = -2.0 * la * (1.0 - la) * ro * (1.0 - ro) / gap;
    return m;
}

void dump_shape_curve(const DensityPair& d, int samples, std::ostream& out) {
    validate_densities(d);
    if (samples < 1) throw ParameterError("dump_shape_curve: samples must be >= 1");
    out << "angle,x,y,regime\n";
    char buf[128];
    for (int s = 1; s <= samples; ++s) {
        double ang = (double)s / (double)(samples + 1) * 1.5707963267948966;
        double cx = std::cos(ang), cy = std::sin(ang);
        ShapeValue v = shape_p(d, cx, cy);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%s\n", ang, cx / v.p,
                      cy / v.p, regime_name(v.regime));
        out << buf;
    }
}

} // namespace cgl
