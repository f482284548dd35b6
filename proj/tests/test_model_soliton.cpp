#include <doctest.h>

#include <cmath>

#include "trapfgr/linearization.hpp"
#include "trapfgr/soliton.hpp"

using namespace tfgr;

TEST_CASE("potential sampling")
{
    const Grid g(40.0, 4001);
    const PotentialSpec p{0.65, 0.36};
    const RVec V = evaluate_potential(p, g);
    CHECK(V[g.center()] == -0.65);
    CHECK(parity_split(g, V).second.cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(std::abs(V[0]) < 1e-50);
    // e = V''(0) by a centered difference of the profile
    const double d = 1e-4;
    const double e = (p.value(d) - 2.0 * p.value(0.0) + p.value(-d)) / (d * d);
    CHECK(e == doctest::Approx(p.curvature()).epsilon(1e-6));
    CHECK(p.curvature() == 1.3);
    CHECK_THROWS(evaluate_potential(PotentialSpec{0.5, 0.0}, g));
}

TEST_CASE("nonlinearity contract")
{
    for (const auto& f : {Nonlinearity::cubic(), Nonlinearity::power(2.0), Nonlinearity::none()}) {
        CHECK(f.f(0.0) == 0.0);
        CHECK(f.growth_ratio(f.name == "cubic" ? 1.0 : 2.0, 10.0) <= 1.0);
        // F' = f
        const double s = 0.7, d = 1e-5;
        CHECK((f.F(s + d) - f.F(s - d)) / (2 * d) == doctest::Approx(f.f(s)).epsilon(1e-8));
    }
    CHECK(Nonlinearity::by_name("quintic").f(2.0) == 4.0);
    CHECK_THROWS(Nonlinearity::by_name("cosine"));
}

TEST_CASE("window selection")
{
    const WindowReport a = select_window(1.0, 0.4);
    CHECK(a.N == 2);
    CHECK(a.valid);
    CHECK(a.upper_margin == doctest::Approx(0.2));
    CHECK(select_window(1.0, 0.3).N == 3);
    const WindowReport e = select_window(1.0, 0.5);
    CHECK(e.near_edge);
    CHECK_FALSE(e.valid);
    CHECK(select_window(1.0, 1.2).N == 0);
    CHECK_THROWS(select_window(-1.0, 0.3));
    // (N + 1) eps > lambda >= N eps on a sweep
    for (double eps = 0.05; eps < 1.0; eps += 0.0137) {
        const WindowReport w = select_window(1.0, eps);
        CHECK((w.N + 1) * eps > 1.0);
        CHECK(w.N * eps <= 1.0);
    }
}

TEST_CASE("window N is non-increasing in h")
{
    const Nonlinearity f = Nonlinearity::cubic();
    const Grid g(40.0, 2001);
    int last = 1000;
    for (double h : {0.15, 0.2, 0.25, 0.3, 0.35}) {
        const Soliton s = solve_trapped(1.0, {0.5, h}, g, f);
        const DiscreteModes m = discrete_modes(assemble(s, f));
        const int N = select_window(1.0, m.epsilon).N;
        CHECK(N <= last);
        last = N;
    }
}

TEST_CASE("free ground state")
{
    const Nonlinearity f = Nonlinearity::cubic();
    const Grid g(40.0, 8001);
    const Soliton s = solve_free(1.0, g, f);
    double err = 0.0, derr = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        const double x = g.x()[i];
        err = std::max(err, std::abs(s.profile[i] - std::sqrt(2.0) / std::cosh(x)));
        // d/dlambda sqrt(2 lambda) sech(sqrt(lambda) x) at lambda = 1
        const double dl = (1.0 / std::cosh(x) - x * std::tanh(x) / std::cosh(x)) / std::sqrt(2.0);
        derr = std::max(derr, std::abs(s.d_lambda[i] - dl));
    }
    CHECK(err <= 1e-9);
    CHECK(std::abs(s.mass - 4.0) <= 1e-8);
    CHECK(derr <= 1e-7);
    CHECK(s.delta_prime == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(s.residual_norm <= 1e-10);
    CHECK(s.profile.minCoeff() > 0.0);

    const Grid g4(40.0, 16001);
    const Soliton s4 = solve_free(4.0, g4, f);
    double e4 = 0.0;
    for (int i = 0; i < g4.size(); ++i)
        e4 = std::max(e4, std::abs(s4.profile[i] - std::sqrt(8.0) / std::cosh(2.0 * g4.x()[i])));
    CHECK(e4 <= 1e-8);
    CHECK(s4.delta_prime == doctest::Approx(0.5).epsilon(1e-6));
    CHECK_THROWS(solve_free(-1.0, g, f));
}

TEST_CASE("trapped ground state")
{
    const Nonlinearity f = Nonlinearity::cubic();
    const Grid g(40.0, 4001);
    const Soliton s = solve_trapped(1.0, {0.65, 0.36}, g, f);
    CHECK(s.residual_norm <= 1e-10);
    CHECK(s.profile.minCoeff() > 0.0);
    CHECK(parity_split(g, s.profile).second.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(s.delta_prime > 0.0);
    // monotone decay past the peak and an exponential tail with rate >= c sqrt(lambda)
    for (int i = g.center(); i + 1 < g.size(); ++i) CHECK(s.profile[i + 1] <= s.profile[i]);
    const int i1 = g.center() + 500, i2 = g.center() + 1000;  // x = 10, 20
    const double rate = std::log(s.profile[i1] / s.profile[i2]) / (g.x()[i2] - g.x()[i1]);
    CHECK(rate >= 0.9);
    const LinearizedSystem sys = assemble(s, f);
    CHECK(l2_norm(g, RVec(sys.Lp.apply(s.d_lambda) + s.profile)) <= 1e-10 * l2_norm(g, s.profile));
    CHECK(l2_norm(g, sys.Lm.apply(s.profile)) <= 1e-10 * l2_norm(g, s.profile));

    // vanishing h reduces to the free state at lambda + V(0)
    const Soliton flat = solve_trapped(1.0, {0.5, 1e-6}, g, f);
    const Soliton base = solve_free(0.5, g, f);
    CHECK((flat.profile - base.profile).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("distance to the free state scales like h^(3/2)")
{
    const Nonlinearity f = Nonlinearity::cubic();
    const Grid g(40.0, 4001);
    const Soliton base = solve_free(0.5, g, f);
    std::vector<double> X, Y;
    for (double h : {0.02, 0.04, 0.08, 0.12, 0.2}) {
        const Soliton s = solve_trapped(1.0, {0.5, h}, g, f);
        X.push_back(std::log(h));
        Y.push_back(std::log(l2_norm(g, RVec(s.profile - base.profile))));
    }
    double mx = 0, my = 0;
    for (size_t i = 0; i < X.size(); ++i) {
        mx += X[i] / X.size();
        my += Y[i] / Y.size();
    }
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < X.size(); ++i) {
        sxy += (X[i] - mx) * (Y[i] - my);
        sxx += (X[i] - mx) * (X[i] - mx);
    }
    const double slope = sxy / sxx;
    CHECK(slope >= 1.2);
    CHECK(slope <= 1.8);
}
