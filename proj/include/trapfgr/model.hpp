#pragma once

#include <functional>
#include <string>

#include "trapfgr/lattice.hpp"

namespace tfgr {

// Local nonlinearity f with f(0) = 0; the equation carries f(|psi|^2) psi.
struct Nonlinearity {
    std::string name;
    std::function<double(double)> f, fp, fpp;
    std::function<double(double)> F;  // int_0^s f

    static Nonlinearity cubic();        // f(s) = s
    static Nonlinearity none();         // f = 0, linear equation
    static Nonlinearity power(double p); // f(s) = s^p
    static Nonlinearity by_name(const std::string& name);

    bool is_cubic() const { return name == "cubic"; }
    // max over sample range of |f(s)| / (1 + s^beta)
    double growth_ratio(double beta, double s_max) const;
};

// V(y) = -depth * exp(-y^2), sampled as V(h x)
struct PotentialSpec {
    double depth = 0.5;
    double h = 0.3;

    double value(double y) const;
    double at_origin() const { return -depth; }
    double curvature() const { return 2.0 * depth; }  // e = V''(0)
};

RVec evaluate_potential(const PotentialSpec& spec, const Grid& g);

struct WindowReport {
    double lambda = 0.0;
    double epsilon = 0.0;
    int N = 0;
    double upper_margin = 0.0;  // (N+1) eps - lambda
    double lower_margin = 0.0;  // lambda - N eps
    bool near_edge = false;
    bool valid = false;
    std::string reason;
};

WindowReport select_window(double lambda, double epsilon, double edge_tol_rel = 1e-3);

}  // namespace tfgr
