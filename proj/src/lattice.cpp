#include "trapfgr/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tfgr {

Grid::Grid(double half_width, int n_points) : L_(half_width), n_(n_points)
{
    if (half_width <= 0.0)
        throw std::invalid_argument("grid half width must be positive");
    if (n_points < 5 || n_points % 2 == 0)
        throw std::invalid_argument("grid needs an odd node count >= 5");
    dx_ = 2.0 * L_ / (n_ - 1);
    x_.resize(n_);
    const int c = center();
    for (int i = 0; i < n_; ++i)
        x_[i] = (i - c) * dx_;
    w_ = RVec::Constant(n_, dx_);
    w_[0] = w_[n_ - 1] = 0.5 * dx_;
}

Grid Grid::extended(int pad) const
{
    Grid e(L_ + pad * dx_, n_ + 2 * pad);
    e.dx_ = dx_;
    const int c = e.center();
    for (int i = 0; i < e.n_; ++i)
        e.x_[i] = (i - c) * dx_;
    e.w_ = RVec::Constant(e.n_, dx_);
    e.w_[0] = e.w_[e.n_ - 1] = 0.5 * dx_;
    return e;
}

double PairField::max_abs() const
{
    double m = 0.0;
    if (u1.size()) m = std::max(m, u1.cwiseAbs().maxCoeff());
    if (u2.size()) m = std::max(m, u2.cwiseAbs().maxCoeff());
    return m;
}

PairField sigma1(const PairField& u) { return {-u.u2, u.u1}; }

static void check_size(const Grid& g, Eigen::Index n)
{
    if (n != g.size())
        throw std::invalid_argument("field length does not match grid");
}

cplx integral(const Grid& g, const CVec& a)
{
    check_size(g, a.size());
    return (g.weights().cast<cplx>().array() * a.array()).sum();
}

double integral(const Grid& g, const RVec& a)
{
    check_size(g, a.size());
    return g.weights().dot(a);
}

cplx inner(const Grid& g, const CVec& a, const CVec& b)
{
    check_size(g, a.size());
    check_size(g, b.size());
    cplx s = 0.0;
    const RVec& w = g.weights();
    for (int i = 0; i < g.size(); ++i)
        s += w[i] * a[i] * std::conj(b[i]);
    return s;
}

cplx inner(const Grid& g, const PairField& a, const PairField& b)
{
    return inner(g, a.u1, b.u1) + inner(g, a.u2, b.u2);
}

double inner(const Grid& g, const RVec& a, const RVec& b)
{
    check_size(g, a.size());
    check_size(g, b.size());
    return (g.weights().array() * a.array() * b.array()).sum();
}

cplx bilinear(const Grid& g, const CVec& a, const CVec& b)
{
    check_size(g, a.size());
    check_size(g, b.size());
    cplx s = 0.0;
    const RVec& w = g.weights();
    for (int i = 0; i < g.size(); ++i)
        s += w[i] * a[i] * b[i];
    return s;
}

cplx bilinear(const Grid& g, const PairField& a, const PairField& b)
{
    return bilinear(g, a.u1, b.u1) + bilinear(g, a.u2, b.u2);
}

double l2_norm(const Grid& g, const CVec& a) { return std::sqrt(std::abs(inner(g, a, a))); }
double l2_norm(const Grid& g, const RVec& a) { return std::sqrt(inner(g, a, a)); }
double l2_norm(const Grid& g, const PairField& a) { return std::sqrt(std::abs(inner(g, a, a))); }

template <class V>
static V d2_impl(const Grid& g, const V& a)
{
    check_size(g, a.size());
    const int n = g.size();
    const double h2 = g.dx() * g.dx();
    V r(n);
    for (int i = 2; i < n - 2; ++i)
        r[i] = (-a[i - 2] + 16.0 * a[i - 1] - 30.0 * a[i] + 16.0 * a[i + 1] - a[i + 2]) / (12.0 * h2);
    auto edge0 = [&](auto f) {
        return (45.0 * f(0) - 154.0 * f(1) + 214.0 * f(2) - 156.0 * f(3) + 61.0 * f(4) - 10.0 * f(5)) / (12.0 * h2);
    };
    auto edge1 = [&](auto f) {
        return (10.0 * f(0) - 15.0 * f(1) - 4.0 * f(2) + 14.0 * f(3) - 6.0 * f(4) + f(5)) / (12.0 * h2);
    };
    r[0] = edge0([&](int k) { return a[k]; });
    r[1] = edge1([&](int k) { return a[k]; });
    r[n - 1] = edge0([&](int k) { return a[n - 1 - k]; });
    r[n - 2] = edge1([&](int k) { return a[n - 1 - k]; });
    return r;
}

RVec second_derivative(const Grid& g, const RVec& a) { return d2_impl(g, a); }
CVec second_derivative(const Grid& g, const CVec& a) { return d2_impl(g, a); }

RVec first_derivative(const Grid& g, const RVec& a)
{
    check_size(g, a.size());
    const int n = g.size();
    const double h = g.dx();
    RVec r(n);
    for (int i = 2; i < n - 2; ++i)
        r[i] = (a[i - 2] - 8.0 * a[i - 1] + 8.0 * a[i + 1] - a[i + 2]) / (12.0 * h);
    r[0] = (-25.0 * a[0] + 48.0 * a[1] - 36.0 * a[2] + 16.0 * a[3] - 3.0 * a[4]) / (12.0 * h);
    r[1] = (-3.0 * a[0] - 10.0 * a[1] + 18.0 * a[2] - 6.0 * a[3] + a[4]) / (12.0 * h);
    r[n - 1] = -(-25.0 * a[n - 1] + 48.0 * a[n - 2] - 36.0 * a[n - 3] + 16.0 * a[n - 4] - 3.0 * a[n - 5]) / (12.0 * h);
    r[n - 2] = -(-3.0 * a[n - 1] - 10.0 * a[n - 2] + 18.0 * a[n - 3] - 6.0 * a[n - 4] + a[n - 5]) / (12.0 * h);
    return r;
}

template <class V>
static std::pair<V, V> split_impl(const Grid& g, const V& a)
{
    check_size(g, a.size());
    const int n = g.size();
    V e(n), o(n);
    for (int i = 0; i < n; ++i) {
        e[i] = 0.5 * (a[i] + a[n - 1 - i]);
        o[i] = a[i] - e[i];
    }
    return {e, o};
}

std::pair<CVec, CVec> parity_split(const Grid& g, const CVec& a) { return split_impl(g, a); }
std::pair<RVec, RVec> parity_split(const Grid& g, const RVec& a) { return split_impl(g, a); }

double weighted_norm(const Grid& g, const CVec& a, double nu)
{
    check_size(g, a.size());
    double s = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        const double wx = std::pow(1.0 + g.x()[i] * g.x()[i], nu);
        s += g.weights()[i] * wx * std::norm(a[i]);
    }
    return std::sqrt(s);
}

double weighted_norm(const Grid& g, const PairField& a, double nu)
{
    const double n1 = weighted_norm(g, a.u1, nu), n2 = weighted_norm(g, a.u2, nu);
    return std::sqrt(n1 * n1 + n2 * n2);
}

double odd_fraction(const Grid& g, const CVec& a)
{
    const double m = a.cwiseAbs().maxCoeff();
    if (m == 0.0) return 0.0;
    return parity_split(g, a).second.cwiseAbs().maxCoeff() / m;
}

double even_fraction(const Grid& g, const CVec& a)
{
    const double m = a.cwiseAbs().maxCoeff();
    if (m == 0.0) return 0.0;
    return parity_split(g, a).first.cwiseAbs().maxCoeff() / m;
}

double admissibility_residual(const PairField& u)
{
    const double m = u.max_abs();
    if (m == 0.0) return 0.0;
    const double bad = std::max(u.u1.imag().cwiseAbs().maxCoeff(), u.u2.real().cwiseAbs().maxCoeff());
    return bad / m;
}

CVec to_complex(const RVec& a) { return a.cast<cplx>(); }

template <class V>
static V embed_impl(const Grid& from, const Grid& to, const V& a)
{
    check_size(from, a.size());
    const int off = to.center() - from.center();
    if (off < 0) throw std::invalid_argument("embed target grid is smaller");
    V r = V::Zero(to.size());
    r.segment(off, from.size()) = a;
    return r;
}

CVec embed(const Grid& from, const Grid& to, const CVec& a) { return embed_impl(from, to, a); }
RVec embed(const Grid& from, const Grid& to, const RVec& a) { return embed_impl(from, to, a); }

CVec restrict_to(const Grid& from, const Grid& to, const CVec& a)
{
    check_size(from, a.size());
    const int off = from.center() - to.center();
    if (off < 0) throw std::invalid_argument("restrict target grid is larger");
    return a.segment(off, to.size());
}

std::string field_csv(const Grid& g, const CVec& a)
{
    std::ostringstream os;
    os.precision(17);
    os << "x,re,im\n";
    for (int i = 0; i < g.size(); ++i)
        os << g.x()[i] << ',' << a[i].real() << ',' << a[i].imag() << '\n';
    return os.str();
}

std::string pair_csv(const Grid& g, const PairField& a)
{
    std::ostringstream os;
    os.precision(17);
    os << "x,re_u1,im_u1,re_u2,im_u2\n";
    for (int i = 0; i < g.size(); ++i)
        os << g.x()[i] << ',' << a.u1[i].real() << ',' << a.u1[i].imag() << ','
           << a.u2[i].real() << ',' << a.u2[i].imag() << '\n';
    return os.str();
}

}  // namespace tfgr
