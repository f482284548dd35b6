#pragma once

#include <complex>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace tfgr {

using cplx = std::complex<double>;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

constexpr cplx I{0.0, 1.0};

// Uniform symmetric lattice on [-L, L] with an odd number of nodes.
class Grid {
public:
    Grid() = default;
    Grid(double half_width, int n_points);

    double half_width() const { return L_; }
    int size() const { return n_; }
    double dx() const { return dx_; }
    int center() const { return (n_ - 1) / 2; }
    const RVec& x() const { return x_; }
    const RVec& weights() const { return w_; }
    int mirror(int i) const { return n_ - 1 - i; }

    // same spacing, pad extra nodes on each side
    Grid extended(int pad) const;

    bool same_as(const Grid& o) const { return n_ == o.n_ && L_ == o.L_; }

private:
    double L_ = 0.0;
    int n_ = 0;
    double dx_ = 0.0;
    RVec x_;
    RVec w_;
};

// Vector function (u1, u2) acted on by the linearized operator.
struct PairField {
    CVec u1;
    CVec u2;

    PairField() = default;
    PairField(CVec a, CVec b) : u1(std::move(a)), u2(std::move(b)) {}
    static PairField zero(int n) { return {CVec::Zero(n), CVec::Zero(n)}; }

    int size() const { return static_cast<int>(u1.size()); }
    PairField operator+(const PairField& o) const { return {u1 + o.u1, u2 + o.u2}; }
    PairField operator-(const PairField& o) const { return {u1 - o.u1, u2 - o.u2}; }
    PairField operator-() const { return {-u1, -u2}; }
    PairField& operator+=(const PairField& o) { u1 += o.u1; u2 += o.u2; return *this; }
    PairField operator*(cplx c) const { return {c * u1, c * u2}; }
    double max_abs() const;
};
inline PairField operator*(cplx c, const PairField& p) { return p * c; }

// sigma1 (u1, u2) = (-u2, u1)
PairField sigma1(const PairField& u);

// trapezoid integral of a; <a, b> = int a conj(b); bilinear(a, b) = int a b
cplx integral(const Grid& g, const CVec& a);
double integral(const Grid& g, const RVec& a);
cplx inner(const Grid& g, const CVec& a, const CVec& b);
cplx inner(const Grid& g, const PairField& a, const PairField& b);
double inner(const Grid& g, const RVec& a, const RVec& b);
cplx bilinear(const Grid& g, const CVec& a, const CVec& b);
cplx bilinear(const Grid& g, const PairField& a, const PairField& b);

double l2_norm(const Grid& g, const CVec& a);
double l2_norm(const Grid& g, const RVec& a);
double l2_norm(const Grid& g, const PairField& a);

// 4th-order centered stencils, one-sided closure on the two outer nodes
RVec second_derivative(const Grid& g, const RVec& a);
CVec second_derivative(const Grid& g, const CVec& a);
RVec first_derivative(const Grid& g, const RVec& a);

std::pair<CVec, CVec> parity_split(const Grid& g, const CVec& a);
std::pair<RVec, RVec> parity_split(const Grid& g, const RVec& a);

// ||<x>^nu a||_2
double weighted_norm(const Grid& g, const CVec& a, double nu);
double weighted_norm(const Grid& g, const PairField& a, double nu);

// max |even or odd part| / max |a|, whichever is asked for
double odd_fraction(const Grid& g, const CVec& a);
double even_fraction(const Grid& g, const CVec& a);

// admissible: u1 real, u2 purely imaginary; returns max violation / max |u|
double admissibility_residual(const PairField& u);

CVec to_complex(const RVec& a);

// embed a field on g into the centered window of a larger grid (zeros outside)
CVec embed(const Grid& from, const Grid& to, const CVec& a);
RVec embed(const Grid& from, const Grid& to, const RVec& a);
CVec restrict_to(const Grid& from, const Grid& to, const CVec& a);

std::string field_csv(const Grid& g, const CVec& a);
std::string pair_csv(const Grid& g, const PairField& a);

}  // namespace tfgr
