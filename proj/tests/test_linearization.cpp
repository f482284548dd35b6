#include <doctest.h>

#include <cmath>
#include <random>

#include "trapfgr/linearization.hpp"

using namespace tfgr;

namespace {

struct Setup {
    Soliton s;
    LinearizedSystem sys;
    DiscreteModes m;
};

const Setup& setup()
{
    static const Setup S = [] {
        Setup x;
        const Nonlinearity f = Nonlinearity::cubic();
        x.s = solve_trapped(1.0, {0.65, 0.36}, Grid(40.0, 4001), f);
        x.sys = assemble(x.s, f);
        x.m = discrete_modes(x.sys);
        return x;
    }();
    return S;
}

PairField random_pair(const Grid& g, unsigned seed, double width = 0.05)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    PairField u = PairField::zero(g.size());
    for (int i = 0; i < g.size(); ++i) {
        const double w = std::exp(-width * g.x()[i] * g.x()[i]);
        u.u1[i] = w * cplx(nd(rng), nd(rng));
        u.u2[i] = w * cplx(nd(rng), nd(rng));
    }
    return u;
}

}  // namespace

TEST_CASE("L_plus and L_minus are symmetric")
{
    const auto& S = setup();
    const int n = S.sys.grid.size();
    double asym = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j) {
            asym = std::max({asym, std::abs(S.sys.Lp.at(i, j) - S.sys.Lp.at(j, i)),
                             std::abs(S.sys.Lm.at(i, j) - S.sys.Lm.at(j, i))});
            scale = std::max(scale, std::abs(S.sys.Lp.at(i, j)));
        }
    CHECK(asym <= 1e-13 * scale);
}

TEST_CASE("sigma1 L^T sigma1 = L and the pairing identity")
{
    const auto& S = setup();
    const Grid& g = S.sys.grid;
    for (unsigned seed : {1u, 2u, 3u}) {
        const PairField u = random_pair(g, seed), v = random_pair(g, seed + 10);
        const PairField Lu = S.sys.apply(u);
        CHECK(l2_norm(g, sigma1(S.sys.apply_adjoint(sigma1(u))) - Lu) <= 1e-12 * l2_norm(g, Lu));
        CHECK(l2_norm(g, sigma1(sigma1(u)) + u) == 0.0);
        // bilinear form: B(sigma1 L u, v) = -B(sigma1 u, L v)
        const cplx a = bilinear(g, sigma1(Lu), v), b = bilinear(g, sigma1(u), S.sys.apply(v));
        CHECK(std::abs(a + b) <= 1e-11 * std::abs(a));
    }
}

TEST_CASE("zero modes and far field")
{
    const auto& S = setup();
    const Grid& g = S.sys.grid;
    CHECK(l2_norm(g, S.sys.Lm.apply(S.sys.phi)) <= 1e-10 * l2_norm(g, S.sys.phi));
    // essential-spectrum edge: the diagonal tends to lambda + 5/2 dx^-2 stencil weight
    const double stencil = 2.5 / (g.dx() * g.dx());
    CHECK(std::abs(S.sys.Lm.d0[0] - stencil - S.sys.lambda) < 1e-10);
    CHECK(std::abs(S.sys.Lp.d0[g.size() - 1] - stencil - S.sys.lambda) < 1e-10);

    const Nonlinearity f = Nonlinearity::cubic();
    const Grid g2(40.0, 8001);
    const Soliton free = solve_free(1.0, g2, f);
    const LinearizedSystem fs = assemble(free, f);
    const RVec dphi = first_derivative(g2, free.profile);
    // kernel up to the O(dx^4) consistency error of the two stencils
    CHECK(l2_norm(g2, fs.Lp.apply(dphi)) <= 1e-6 * l2_norm(g2, dphi));
}

TEST_CASE("internal mode")
{
    const auto& S = setup();
    const Grid& g = S.sys.grid;
    const auto& m = S.m;
    CHECK(m.epsilon > 0.0);
    CHECK(m.epsilon < S.sys.lambda);
    CHECK(l2_norm(g, RVec(S.sys.Lm.apply(m.eta) - m.epsilon * m.xi)) <= 1e-9 * m.epsilon * l2_norm(g, m.xi));
    CHECK(l2_norm(g, RVec(S.sys.Lp.apply(m.xi) - m.epsilon * m.eta)) <= 1e-9 * m.epsilon * l2_norm(g, m.eta));
    CHECK(m.pairing > 0.0);
    CHECK(inner(g, S.sys.Lp.apply(m.xi), m.xi) / m.epsilon == doctest::Approx(m.pairing).epsilon(1e-9));
    CHECK(std::abs(m.epsilon - m.epsilon_alt) <= 1e-10 * m.epsilon);
    CHECK(parity_split(g, m.xi).first.cwiseAbs().maxCoeff() <= 1e-12 * m.xi.cwiseAbs().maxCoeff());
    CHECK(parity_split(g, m.eta).first.cwiseAbs().maxCoeff() <= 1e-12 * m.eta.cwiseAbs().maxCoeff());
    CHECK(m.sa_ok);
    // normalization |xi| = sqrt2 |d_x phi_0| with phi_0 the free state at lambda + V(0)
    const Soliton base = solve_free(S.sys.lambda - 0.65, g, Nonlinearity::cubic());
    CHECK(l2_norm(g, m.xi) == doctest::Approx(std::sqrt(2.0) * l2_norm(g, first_derivative(g, base.profile))).epsilon(1e-6));

    const DiscreteModes m2 = scaled_modes(m, 2.0);
    CHECK(m2.pairing == doctest::Approx(4.0 * m.pairing));
}

TEST_CASE("eigenvalue asymptotics in h")
{
    const Nonlinearity f = Nonlinearity::cubic();
    const Grid g(40.0, 4001);
    std::vector<double> hs{0.02, 0.05, 0.1}, rel, overlap;
    for (double h : hs) {
        const PotentialSpec p{0.5, h};
        const DiscreteModes m = discrete_modes(assemble(solve_trapped(1.0, p, g, f), f));
        const double a = h * std::sqrt(2.0 * p.curvature());
        rel.push_back(std::abs(m.epsilon - a) / a);
        overlap.push_back(m.overlap);
    }
    CHECK(rel[0] < rel[1]);
    CHECK(rel[1] < rel[2]);
    CHECK(overlap[0] > overlap[1]);
    CHECK(overlap[1] > overlap[2]);
    CHECK(overlap[0] > 0.999);
    // |eps - a| / h -> 0 with a correction exponent of at least 1
    const double slope = std::log(rel[2] / rel[0]) / std::log(hs[2] / hs[0]);
    CHECK(slope >= 1.0);
}

TEST_CASE("continuous-spectrum projector")
{
    const auto& S = setup();
    const Grid& g = S.sys.grid;
    const Projector P(S.sys, S.m);
    const PairField mode{to_complex(S.m.xi), cplx(0, 1) * to_complex(S.m.eta)};
    CHECK(l2_norm(g, P.apply(mode)) <= 1e-9 * l2_norm(g, mode));
    CHECK(l2_norm(g, P.apply(PairField{CVec::Zero(g.size()), to_complex(S.sys.phi)})) <= 1e-9 * l2_norm(g, S.sys.phi));
    CHECK(l2_norm(g, P.apply(PairField{to_complex(S.sys.phi_lambda), CVec::Zero(g.size())})) <=
          1e-9 * l2_norm(g, S.sys.phi_lambda));
    const PairField u = random_pair(g, 5);
    const PairField Pu = P.apply(u);
    CHECK(l2_norm(g, P.apply(Pu) - Pu) <= 1e-11 * l2_norm(g, Pu));
    // bump supported where phi is negligible
    PairField far = PairField::zero(g.size());
    for (int i = 0; i < g.size(); ++i) far.u1[i] = std::exp(-(g.x()[i] - 30.0) * (g.x()[i] - 30.0));
    CHECK(l2_norm(g, P.apply(far) - far) <= 1e-6 * l2_norm(g, far));
}

TEST_CASE("resonance diagnostic")
{
    const auto& S = setup();
    const ResonanceDiagnostic d = resonance_diagnostic(S.sys, {0.05, 0.1, 0.2});
    CHECK(d.sigma_min[0] < d.sigma_min[1]);
    CHECK(d.sigma_min[1] < d.sigma_min[2]);
    const Nonlinearity f = Nonlinearity::cubic();
    const LinearizedSystem big = assemble(solve_trapped(1.0, {0.65, 0.36}, Grid(80.0, 8001), f), f);
    const ResonanceDiagnostic d2 = resonance_diagnostic(big, {0.05, 0.1, 0.2});
    CHECK(d2.value / d.value >= 0.5);
}
