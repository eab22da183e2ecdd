#include "cgl/interface.hpp"

#include <cmath>
#include <istream>
#include <sstream>

namespace cgl {

int32_t InitialInterface::alpha_at(int32_t k) const {
    if (k < 1) throw DomainError("interface: alpha corners are 1-based");
    if ((size_t)k > alpha.size())
        throw CoverageError("interface: alpha corner A_" + std::to_string(k) +
                            " beyond truncation " + std::to_string(alpha.size()));
    return alpha[k - 1];
}

int32_t InitialInterface::beta_at(int32_t m) const {
    if (m < 1) throw DomainError("interface: beta corners are 1-based");
    if ((size_t)m > beta.size())
        throw CoverageError("interface: beta corner B_" + std::to_string(m) +
                            " beyond truncation " + std::to_string(beta.size()));
    return beta[m - 1];
}

int ExclusionProfile::occupied(int64_t j) const {
    if (j == 0) return 0;
    if (j == 1) return 1;
    if (j <= -1) {
        if (-j > (int64_t)left.size())
            throw DomainError("exclusion profile: site " + std::to_string(j) +
                              " outside stored range");
        return left[(size_t)(-j - 1)];
    }
    if (j > (int64_t)right.size())
        throw DomainError("exclusion profile: site " + std::to_string(j) +
                          " outside stored range");
    return right[(size_t)(j - 1)];
}

namespace {

void validate_arm(const std::vector<int32_t>& v, const char* name) {
    for (size_t i = 0; i < v.size(); ++i) {
        if (v[i] > -1)
            throw ValidationError(std::string("interface: ") + name + "_" +
                                      std::to_string(i + 1) + " = " +
                                      std::to_string(v[i]) + " is not <= -1",
                                  (long long)(i + 1));
        if (i > 0 && v[i] > v[i - 1])
            throw ValidationError(std::string("interface: ") + name + "_" +
                                      std::to_string(i + 1) +
                                      " increases past " + name + "_" +
                                      std::to_string(i),
                                  (long long)(i + 1));
    }
}

void validate_densities(double lambda, double rho) {
    if (!(lambda > 0.0) || lambda > 1.0)
        throw ParameterError("interface: lambda must be in (0,1]");
    if (!(rho >= 0.0) || rho >= 1.0)
        throw ParameterError("interface: rho must be in [0,1)");
}

void fill_slopes(InitialInterface& ifc) {
    ifc.slope_alpha =
        ifc.alpha.empty() ? 0.0 : -(double)ifc.alpha.back() / (double)ifc.alpha.size();
    ifc.slope_beta =
        ifc.beta.empty() ? 0.0 : -(double)ifc.beta.back() / (double)ifc.beta.size();
}

} // namespace

InitialInterface build_deterministic(std::vector<int32_t> alpha,
                                     std::vector<int32_t> beta, double lambda,
                                     double rho) {
    validate_densities(lambda, rho);
    validate_arm(alpha, "alpha");
    validate_arm(beta, "beta");
    InitialInterface ifc;
    ifc.alpha = std::move(alpha);
    ifc.beta = std::move(beta);
    ifc.lambda = lambda;
    ifc.rho = rho;
    fill_slopes(ifc);
    return ifc;
}

InitialInterface sample_random_walk(double lambda, double rho, int32_t length,
                                    RngStream stream) {
    validate_densities(lambda, rho);
    if (length < 1) throw ParameterError("sample_random_walk: length must be >= 1");
    InitialInterface ifc;
    ifc.lambda = lambda;
    ifc.rho = rho;
    ifc.alpha.reserve(length);
    ifc.beta.reserve(length);
    // alpha arm: from (-1, 0), rise w.p. lambda else step left
    SequentialRng ra(stream, domain::alpha_walk);
    int64_t x = -1;
    while ((int32_t)ifc.alpha.size() < length) {
        if (lambda >= 1.0 || ra.bernoulli(lambda))
            ifc.alpha.push_back((int32_t)x);
        else
            --x;
    }
    // beta arm: from (0, -1), descend w.p. rho else step right
    SequentialRng rb(stream, domain::beta_walk);
    int64_t y = -1;
    while ((int32_t)ifc.beta.size() < length) {
        if (rho > 0.0 && rb.bernoulli(rho))
            --y;
        else
            ifc.beta.push_back((int32_t)y);
    }
    fill_slopes(ifc);
    return ifc;
}

InitialInterface build_flat_L(int32_t L, int32_t length) {
    if (L < 1) throw ParameterError("build_flat_L: L must be >= 1");
    if (length < 1) throw ParameterError("build_flat_L: length must be >= 1");
    InitialInterface ifc;
    ifc.alpha.assign(length, -L);
    ifc.beta.assign(length, -L);
    ifc.lambda = 1.0;
    ifc.rho = 0.0;
    fill_slopes(ifc);
    return ifc;
}

ExclusionProfile to_exclusion(const InitialInterface& ifc) {
    ExclusionProfile prof;
    // Left arm, built from the top corner down to the origin. Traversed
    // forward (toward the origin), a down move is a particle and a right
    // move is a hole; the final step into (0,0) is site 0's implicit hole.
    {
        const auto& a = ifc.alpha;
        const size_t K = a.size();
        std::vector<uint8_t> fwd; // steps in forward order, 1 = particle
        fwd.reserve(K + (K ? (size_t)(-a.back()) : 0));
        for (size_t k = K; k >= 1; --k) {
            fwd.push_back(1); // riser at column alpha_k, level k -> k-1
            const int32_t run_to = (k == 1) ? 0 : a[k - 2];
            for (int32_t x = a[k - 1]; x < run_to; ++x) fwd.push_back(0);
        }
        if (!fwd.empty()) fwd.pop_back(); // drop the step into the origin
        // eta0(-1), eta0(-2), ... read the forward steps from the end
        prof.left.assign(fwd.rbegin(), fwd.rend());
    }
    // Right arm, built from the origin outward: down runs are particles,
    // each step right of a corner is a hole. eta0(1) = 1 comes out of the
    // first down move (beta_1 <= -1 always).
    {
        const auto& b = ifc.beta;
        int32_t y = 0;
        for (size_t m = 1; m <= b.size(); ++m) {
            for (; y > b[m - 1]; --y) prof.right.push_back(1);
            prof.right.push_back(0);
        }
    }
    return prof;
}

InitialInterface from_exclusion(const ExclusionProfile& prof, double lambda,
                                double rho) {
    std::vector<int32_t> alpha, beta;
    {
        // scan left sites from the origin; a particle at j marks the riser
        // of the next level at the current column
        int64_t x = -1;
        int32_t level = 0;
        for (size_t i = 0; i < prof.left.size(); ++i) {
            if (prof.left[i]) {
                alpha.push_back((int32_t)x);
                ++level;
            } else {
                --x;
            }
        }
        (void)level;
    }
    {
        // scan right sites; a hole at j closes the current column's riser
        int64_t y = 0;
        for (size_t i = 0; i < prof.right.size(); ++i) {
            if (prof.right[i])
                --y;
            else
                beta.push_back((int32_t)y);
        }
    }
    return build_deterministic(std::move(alpha), std::move(beta), lambda, rho);
}

namespace {

std::vector<int32_t> parse_int_list(const std::string& payload,
                                    const std::string& key, int lineno) {
    std::vector<int32_t> out;
    std::istringstream ss(payload);
    std::string tok;
    while (ss >> tok) {
        size_t pos = 0;
        long long v;
        try {
            v = std::stoll(tok, &pos);
        } catch (...) {
            throw ValidationError("interface text line " + std::to_string(lineno) +
                                      ": bad integer '" + tok + "' in " + key,
                                  lineno);
        }
        if (pos != tok.size() || v < INT32_MIN || v > INT32_MAX)
            throw ValidationError("interface text line " + std::to_string(lineno) +
                                      ": bad integer '" + tok + "' in " + key,
                                  lineno);
        out.push_back((int32_t)v);
    }
    return out;
}

double parse_double(const std::string& payload, const std::string& key,
                    int lineno) {
    std::istringstream ss(payload);
    double v;
    std::string rest;
    if (!(ss >> v) || (ss >> rest))
        throw ValidationError("interface text line " + std::to_string(lineno) +
                                  ": bad number for " + key,
                              lineno);
    return v;
}

} // namespace

InitialInterface parse_interface_text(std::istream& in) {
    std::vector<int32_t> alpha, beta;
    bool saw_alpha = false, saw_beta = false;
    double lambda = 1.0, rho = 0.0;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
        trimmed.erase(trimmed.find_last_not_of(" \t\r") + 1);
        if (trimmed.empty()) continue;
        const auto colon = trimmed.find(':');
        if (colon == std::string::npos)
            throw ValidationError("interface text line " + std::to_string(lineno) +
                                      ": expected 'key: values'",
                                  lineno);
        std::string key = trimmed.substr(0, colon);
        key.erase(key.find_last_not_of(" \t") + 1);
        const std::string payload = trimmed.substr(colon + 1);
        if (key == "alpha") {
            if (saw_alpha)
                throw ValidationError("interface text line " + std::to_string(lineno) +
                                          ": duplicate alpha",
                                      lineno);
            alpha = parse_int_list(payload, key, lineno);
            saw_alpha = true;
        } else if (key == "beta") {
            if (saw_beta)
                throw ValidationError("interface text line " + std::to_string(lineno) +
                                          ": duplicate beta",
                                      lineno);
            beta = parse_int_list(payload, key, lineno);
            saw_beta = true;
        } else if (key == "lambda") {
            lambda = parse_double(payload, key, lineno);
        } else if (key == "rho") {
            rho = parse_double(payload, key, lineno);
        } else {
            throw ValidationError("interface text line " + std::to_string(lineno) +
                                      ": unknown key '" + key + "'",
                                  lineno);
        }
    }
    if (!saw_alpha || !saw_beta)
        throw ValidationError("interface text: missing alpha or beta line", lineno);
    return build_deterministic(std::move(alpha), std::move(beta), lambda, rho);
}

std::string format_interface_text(const InitialInterface& ifc) {
    std::ostringstream out;
    out.precision(17);
    out << "alpha:";
    for (int32_t a : ifc.alpha) out << ' ' << a;
    out << "\nbeta:";
    for (int32_t b : ifc.beta) out << ' ' << b;
    out << "\nlambda: " << ifc.lambda << "\nrho: " << ifc.rho << "\n";
    return out.str();
}

} // namespace cgl
