#pragma once

#include <vector>

#include "trapfgr/lattice.hpp"

namespace tfgr {

// Real symmetric pentadiagonal matrix: main diagonal d0, first and second
// super-diagonals d1, d2.
struct SymPenta {
    RVec d0, d1, d2;

    int size() const { return static_cast<int>(d0.size()); }
    RVec apply(const RVec& u) const;
    CVec apply(const CVec& u) const;
    double at(int i, int j) const;

    // -d^2/dx^2, 4th order, zero extension past the boundary
    static SymPenta neg_laplacian(const Grid& g);
    SymPenta plus_diag(const RVec& v) const;
};

// General banded matrix in LAPACK band layout with room for LU fill-in.
template <class T>
class BandMatrix {
public:
    BandMatrix(int n, int kl, int ku);

    int size() const { return n_; }
    void add(int i, int j, T v);
    T get(int i, int j) const;
    Eigen::Matrix<T, Eigen::Dynamic, 1> apply(const Eigen::Matrix<T, Eigen::Dynamic, 1>& x) const;

    // factor in place; throws on exact singularity
    void factor();
    bool factored() const { return factored_; }
    // trans: 'N', 'T' or 'C'
    Eigen::Matrix<T, Eigen::Dynamic, 1> solve(const Eigen::Matrix<T, Eigen::Dynamic, 1>& b, char trans = 'N') const;

private:
    int n_, kl_, ku_, ldab_;
    std::vector<T> ab_;
    std::vector<int> ipiv_;
    bool factored_ = false;
};

using RBand = BandMatrix<double>;
using CBand = BandMatrix<cplx>;

// Interleaved (u1_0, u2_0, u1_1, ...) matrix of L + shift + diag(extra) where
// L(u1, u2) = (Lm u2, -Lp u1). extra may be empty.
CBand block_matrix(const SymPenta& Lm, const SymPenta& Lp, cplx shift, const CVec& extra = CVec());

CVec interleave(const PairField& u);
PairField deinterleave(const CVec& v);

}  // namespace tfgr
