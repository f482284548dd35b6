#pragma once

#include <map>
#include <utility>

#include "trapfgr/lattice.hpp"

namespace tfgr {

// Polynomial in the independent symbols (z, zbar) with field-valued
// coefficients, truncated at a total degree.
struct Series {
    int n = 0;       // field length
    int degree = 0;  // truncation order
    std::map<std::pair<int, int>, CVec> c;

    Series() = default;
    Series(int n_, int degree_) : n(n_), degree(degree_) {}

    CVec get(int m, int k) const;
    void add(int m, int k, const CVec& v);
    Series operator+(const Series& o) const;
    Series scaled(cplx a) const;
    Series times_field(const CVec& f) const;
    Series operator*(const Series& o) const;
    // drop the (0, 0) coefficient
    Series without_constant() const;
};

struct Forcing {
    Series A;  // first component
    Series B;  // second component
};

// Taylor coefficients of the cubic nonlinearity around phi: with
// psi = phi + I1 + i I2 and S = 2 phi I1 + I1^2 + I2^2,
// A = -S I2, B = S (phi + I1) - 2 phi^2 I1.
Forcing cubic_forcing(const RVec& phi, const Series& I1, const Series& I2);

}  // namespace tfgr
