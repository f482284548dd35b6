#include "trapfgr/banded.hpp"

#include <stdexcept>
#include <string>

#include <lapacke.h>

namespace tfgr {

template <class V>
static V penta_apply(const SymPenta& A, const V& u)
{
    const int n = A.size();
    V y(n);
    for (int i = 0; i < n; ++i) {
        auto s = A.d0[i] * u[i];
        if (i + 1 < n) s += A.d1[i] * u[i + 1];
        if (i >= 1) s += A.d1[i - 1] * u[i - 1];
        if (i + 2 < n) s += A.d2[i] * u[i + 2];
        if (i >= 2) s += A.d2[i - 2] * u[i - 2];
        y[i] = s;
    }
    return y;
}

RVec SymPenta::apply(const RVec& u) const { return penta_apply(*this, u); }
CVec SymPenta::apply(const CVec& u) const { return penta_apply(*this, u); }

double SymPenta::at(int i, int j) const
{
    const int d = std::abs(i - j);
    const int lo = std::min(i, j);
    if (d == 0) return d0[i];
    if (d == 1) return d1[lo];
    if (d == 2) return d2[lo];
    return 0.0;
}

SymPenta SymPenta::neg_laplacian(const Grid& g)
{
    const int n = g.size();
    const double h2 = g.dx() * g.dx();
    SymPenta A;
    A.d0 = RVec::Constant(n, 30.0 / (12.0 * h2));
    A.d1 = RVec::Constant(n - 1, -16.0 / (12.0 * h2));
    A.d2 = RVec::Constant(n - 2, 1.0 / (12.0 * h2));
    return A;
}

SymPenta SymPenta::plus_diag(const RVec& v) const
{
    SymPenta A = *this;
    A.d0 += v;
    return A;
}

template <class T>
BandMatrix<T>::BandMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
      ab_(static_cast<size_t>(ldab_) * n, T(0)), ipiv_(n, 0)
{
}

template <class T>
void BandMatrix<T>::add(int i, int j, T v)
{
    if (j - i > ku_ || i - j > kl_)
        throw std::out_of_range("band entry outside bandwidth");
    ab_[static_cast<size_t>(j) * ldab_ + (kl_ + ku_ + i - j)] += v;
}

template <class T>
T BandMatrix<T>::get(int i, int j) const
{
    if (j - i > ku_ || i - j > kl_) return T(0);
    return ab_[static_cast<size_t>(j) * ldab_ + (kl_ + ku_ + i - j)];
}

template <class T>
Eigen::Matrix<T, Eigen::Dynamic, 1> BandMatrix<T>::apply(const Eigen::Matrix<T, Eigen::Dynamic, 1>& x) const
{
    if (factored_) throw std::logic_error("apply on a factored band matrix");
    Eigen::Matrix<T, Eigen::Dynamic, 1> y = Eigen::Matrix<T, Eigen::Dynamic, 1>::Zero(n_);
    for (int j = 0; j < n_; ++j) {
        const int i0 = std::max(0, j - ku_), i1 = std::min(n_ - 1, j + kl_);
        for (int i = i0; i <= i1; ++i)
            y[i] += ab_[static_cast<size_t>(j) * ldab_ + (kl_ + ku_ + i - j)] * x[j];
    }
    return y;
}

template <>
void BandMatrix<double>::factor()
{
    const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_, ab_.data(), ldab_, ipiv_.data());
    if (info != 0) throw std::runtime_error("dgbtrf failed, info=" + std::to_string(info));
    factored_ = true;
}

template <>
void BandMatrix<cplx>::factor()
{
    const lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_,
                                           reinterpret_cast<lapack_complex_double*>(ab_.data()), ldab_, ipiv_.data());
    if (info != 0) throw std::runtime_error("zgbtrf failed, info=" + std::to_string(info));
    factored_ = true;
}

template <>
RVec BandMatrix<double>::solve(const RVec& b, char trans) const
{
    if (!factored_) throw std::logic_error("solve before factor");
    RVec x = b;
    const lapack_int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, trans, n_, kl_, ku_, 1, ab_.data(), ldab_,
                                           ipiv_.data(), x.data(), n_);
    if (info != 0) throw std::runtime_error("dgbtrs failed");
    return x;
}

template <>
CVec BandMatrix<cplx>::solve(const CVec& b, char trans) const
{
    if (!factored_) throw std::logic_error("solve before factor");
    CVec x = b;
    const lapack_int info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, trans, n_, kl_, ku_, 1,
                                           reinterpret_cast<const lapack_complex_double*>(ab_.data()), ldab_,
                                           ipiv_.data(), reinterpret_cast<lapack_complex_double*>(x.data()), n_);
    if (info != 0) throw std::runtime_error("zgbtrs failed");
    return x;
}

template class BandMatrix<double>;
template class BandMatrix<cplx>;

CBand block_matrix(const SymPenta& Lm, const SymPenta& Lp, cplx shift, const CVec& extra)
{
    const int n = Lm.size();
    CBand A(2 * n, 5, 5);
    for (int i = 0; i < n; ++i) {
        cplx d = shift;
        if (extra.size()) d += extra[i];
        A.add(2 * i, 2 * i, d);
        A.add(2 * i + 1, 2 * i + 1, d);
        for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j) {
            A.add(2 * i, 2 * j + 1, Lm.at(i, j));
            A.add(2 * i + 1, 2 * j, -Lp.at(i, j));
        }
    }
    return A;
}

CVec interleave(const PairField& u)
{
    const int n = u.size();
    CVec v(2 * n);
    for (int i = 0; i < n; ++i) {
        v[2 * i] = u.u1[i];
        v[2 * i + 1] = u.u2[i];
    }
    return v;
}

PairField deinterleave(const CVec& v)
{
    const int n = static_cast<int>(v.size() / 2);
    PairField u = PairField::zero(n);
    for (int i = 0; i < n; ++i) {
        u.u1[i] = v[2 * i];
        u.u2[i] = v[2 * i + 1];
    }
    return u;
}

}  // namespace tfgr
