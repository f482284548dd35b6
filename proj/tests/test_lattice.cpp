#include <doctest.h>

#include <cmath>

#include "trapfgr/lattice.hpp"

using namespace tfgr;

namespace {

RVec sample(const Grid& g, double (*f)(double))
{
    RVec v(g.size());
    for (int i = 0; i < g.size(); ++i) v[i] = f(g.x()[i]);
    return v;
}

double sech(double x) { return 1.0 / std::cosh(x); }

}  // namespace

TEST_CASE("grid is symmetric with an exact zero node")
{
    const Grid g(10.0, 1001);
    CHECK(g.x()[g.center()] == 0.0);
    for (int i = 0; i < g.size(); ++i) CHECK(g.x()[i] == -g.x()[g.mirror(i)]);
    CHECK(g.dx() == doctest::Approx(0.02).epsilon(1e-14));
    CHECK_THROWS(Grid(10.0, 1000));
    CHECK_THROWS(Grid(-1.0, 101));
}

TEST_CASE("inner products")
{
    const Grid g(10.0, 1001);
    const CVec one = CVec::Ones(g.size());
    CHECK(std::abs(inner(g, one, one) - 20.0) < 1e-12);

    const Grid h(20.0, 4001);
    const CVec s = to_complex(sample(h, sech));
    CHECK(std::abs(inner(h, s, s) - 2.0) < 1e-8);

    RVec odd(h.size()), even(h.size());
    for (int i = 0; i < h.size(); ++i) {
        const double x = h.x()[i];
        odd[i] = x * std::exp(-x * x) + std::sin(3.0 * x) * sech(x);
        even[i] = std::cos(x) * sech(0.5 * x);
    }
    CHECK(std::abs(inner(h, odd, even)) < 1e-15 * l2_norm(h, odd) * l2_norm(h, even));
    // quadrature of an odd field
    CHECK(std::abs(integral(h, odd)) <= 1e-14 * l2_norm(h, odd));
}

TEST_CASE("fourth-order second derivative")
{
    const Grid g(5.0, 201);
    RVec q(g.size());
    for (int i = 0; i < g.size(); ++i) q[i] = g.x()[i] * g.x()[i];
    const RVec d = second_derivative(g, q);
    for (int i = 2; i < g.size() - 2; ++i) CHECK(d[i] == doctest::Approx(2.0).epsilon(1e-9));

    CHECK(second_derivative(g, RVec(RVec::Zero(g.size()))).cwiseAbs().maxCoeff() == 0.0);

    // sin: interior error ratio ~ 16 under halving dx
    double err[2];
    int k = 0;
    for (int n : {201, 401}) {
        const Grid gg(5.0, n);
        const RVec s = sample(gg, [](double x) { return std::sin(x); });
        const RVec ds = second_derivative(gg, s);
        double e = 0.0;
        for (int i = 2; i < n - 2; ++i) e = std::max(e, std::abs(ds[i] + s[i]));
        err[k++] = e;
    }
    CHECK(err[0] < 1e-5);
    CHECK(err[0] / err[1] > 14.0);
    CHECK(err[0] / err[1] < 18.0);
}

TEST_CASE("second derivative preserves parity")
{
    const Grid g(10.0, 801);
    RVec e(g.size()), o(g.size());
    for (int i = 0; i < g.size(); ++i) {
        const double x = g.x()[i];
        e[i] = std::exp(-x * x) * std::cos(x);
        o[i] = x * std::exp(-0.3 * x * x);
    }
    for (int i = 0; i < g.center(); ++i) {
        e[g.mirror(i)] = e[i];
        o[g.mirror(i)] = -o[i];
    }
    const RVec de = second_derivative(g, e), dn = second_derivative(g, o);
    double ae = 0.0, ao = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        ae = std::max(ae, std::abs(de[i] - de[g.mirror(i)]));
        ao = std::max(ao, std::abs(dn[i] + dn[g.mirror(i)]));
    }
    CHECK(ae <= 1e-12 * de.cwiseAbs().maxCoeff());
    CHECK(ao <= 1e-12 * dn.cwiseAbs().maxCoeff());
}

TEST_CASE("parity split")
{
    const Grid g(20.0, 2001);
    RVec xs(g.size()), s(g.size());
    for (int i = 0; i < g.size(); ++i) {
        s[i] = sech(g.x()[i]);
        xs[i] = g.x()[i] * s[i];
    }
    CHECK(parity_split(g, xs).first.cwiseAbs().maxCoeff() == 0.0);
    CHECK(parity_split(g, s).second.cwiseAbs().maxCoeff() == 0.0);
    const auto [ev, od] = parity_split(g, RVec(s + xs));
    CHECK((ev - s).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((od - xs).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(((ev + od) - (s + xs)).cwiseAbs().maxCoeff() <= 1e-16);

    CVec mixed(g.size());
    for (int i = 0; i < g.size(); ++i) mixed[i] = cplx(std::exp(-g.x()[i]) * s[i], std::sin(g.x()[i]) * s[i] + s[i]);
    const auto [a, b] = parity_split(g, mixed);
    CHECK(std::abs(inner(g, a, b)) <= 1e-13 * l2_norm(g, a) * l2_norm(g, b));
}

TEST_CASE("weighted norm")
{
    const Grid g(20.0, 2001);
    const CVec s = to_complex(sample(g, sech));
    CHECK(weighted_norm(g, s, 0.0) == doctest::Approx(l2_norm(g, s)).epsilon(1e-14));
    CHECK(weighted_norm(g, CVec(CVec::Zero(g.size())), 2.0) == 0.0);
    CHECK(weighted_norm(g, s, -1.0) <= l2_norm(g, s));
    CHECK(weighted_norm(g, s, 1.0) >= l2_norm(g, s));
}

TEST_CASE("pair fields and sigma1")
{
    const Grid g(5.0, 51);
    PairField u{CVec::Random(g.size()), CVec::Random(g.size())};
    const PairField s2 = sigma1(sigma1(u));
    CHECK(l2_norm(g, s2 + u) == 0.0);
    PairField adm{to_complex(RVec::Random(g.size())), cplx(0, 1) * to_complex(RVec::Random(g.size()))};
    CHECK(admissibility_residual(adm) == 0.0);
    CHECK(admissibility_residual(adm * cplx(0, 1)) > 0.1);
    const std::string csv = field_csv(g, u.u1);
    CHECK(csv.rfind("x,re,im", 0) == 0);
}
