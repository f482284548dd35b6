#include "trapfgr/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tfgr {

TaggedScalar TaggedScalar::operator+(const TaggedScalar& o) const
{
    TaggedScalar r = *this;
    r.value += o.value;
    for (const auto& [k, v] : o.tags) r.tags[k] += v;
    return r;
}

TaggedScalar TaggedScalar::operator-(const TaggedScalar& o) const { return *this + (-o); }

TaggedScalar TaggedScalar::operator*(cplx a) const
{
    TaggedScalar r = *this;
    r.value *= a;
    for (auto& kv : r.tags) kv.second *= a;
    return r;
}

TaggedScalar TaggedScalar::with_tag(const std::string& name, cplx coeff) const
{
    TaggedScalar r = *this;
    r.tags[name] += coeff;
    return r;
}

double TaggedScalar::real_leak() const
{
    double m = 0.0;
    for (const auto& kv : tags) m = std::max(m, std::abs(kv.second.real()));
    return m;
}

cplx CoefficientTable::p(int k, int m, int n) const
{
    auto it = P.find({k, m, n});
    return it == P.end() ? cplx(0.0) : it->second.value;
}

void CoefficientTable::set_p(int k, int m, int n, const TaggedScalar& v, const std::string& from)
{
    P[{k, m, n}] = v;
    provenance["P" + std::to_string(k) + "(" + std::to_string(m) + "," + std::to_string(n) + ")"] = from;
}

namespace {

using Arr = Eigen::ArrayXcd;

struct Ctx {
    const Resolvent& res;
    const Grid& g;
    Arr phi, phil, xi, eta;
    double eps, dp, xe, s;

    Ctx(const Resolvent& r, double sign)
        : res(r), g(r.system().grid), eps(r.epsilon()), dp(r.system().delta_prime),
          xe(r.modes().pairing), s(sign)
    {
        phi = to_complex(r.system().phi).array();
        phil = to_complex(r.system().phi_lambda).array();
        xi = to_complex(r.modes().xi).array();
        eta = to_complex(r.modes().eta).array();
    }

    cplx bil(const Arr& a, const Arr& b) const { return bilinear(g, CVec(a.matrix()), CVec(b.matrix())); }
    cplx ses(const Arr& a, const Arr& b) const { return inner(g, CVec(a.matrix()), CVec(b.matrix())); }
    cplx integ(const Arr& a) const { return integral(g, CVec(a.matrix())); }
    cplx pv(const PairField& a, const PairField& b) const { return inner(g, a, b); }

    static PairField pf(const Arr& a, const Arr& b) { return {a.matrix(), b.matrix()}; }

    // -(L + i k eps)^{-1} P_c N
    PairField regular(int k, const PairField& N) const { return -res.solve_regular(k, N); }

    // M R = (i phi eta R1 + phi xi R2, -3 phi xi R1 - i phi eta R2)
    PairField M(const PairField& R) const
    {
        const Arr r1 = R.u1.array(), r2 = R.u2.array();
        return pf(I * phi * eta * r1 + phi * xi * r2, -3.0 * phi * xi * r1 - I * phi * eta * r2);
    }
};

cplx p_formula(const Ctx& c, int k, int km, const PairField& N)
{
    const Arr n0 = N.u1.array(), n1 = N.u2.array();
    const double e = c.eps;
    const cplx ik(0.0, km);
    switch (k) {
    case 1: return c.bil(n0, c.phi) / (-ik * e * c.dp);
    case 2: return (c.bil(n1, c.phil) / c.dp + c.bil(n0, c.phi) / (-ik * e * c.dp)) / (-ik * e);
    case 3: return (-ik * c.bil(n0, c.eta) + c.bil(n1, c.xi)) / ((1.0 - km * km) * e * c.xe);
    case 4: return (ik * c.bil(n1, c.xi) + c.bil(n0, c.eta)) / ((km * km - 1.0) * e * c.xe);
    default: throw std::invalid_argument("P index must be 1..4");
    }
}

void fill_generic(const Ctx& c, CoefficientTable& T, int m, int n, std::initializer_list<int> ks,
                  const std::string& from)
{
    for (int k : ks) T.set_p(k, m, n, p_formula(c, k, m - n, T.Nvec.at({m, n})), from);
}

void mark_admissible(CoefficientTable& T)
{
    for (const auto& [key, f] : T.Nvec) {
        bool ok = admissibility_residual(f * I) <= 1e-9;
        auto r = T.R.find(key);
        if (r != T.R.end()) ok = ok && admissibility_residual(r->second) <= 1e-9;
        T.admissible[key] = ok;
    }
}

}  // namespace

cplx p_from_forcing(const Resolvent& res, int k, int m, int n, const PairField& N)
{
    if (m == n) throw std::invalid_argument("P from forcing needs m != n");
    if ((k == 3 || k == 4) && std::abs(m - n) == 1) throw std::invalid_argument("P^(3,4) undefined at |m - n| = 1");
    return p_formula(Ctx(res, -1.0), k, m - n, N);
}

PairField polynomial_forcing(const Resolvent& res, const CoefficientTable& T, int m, int n)
{
    const Ctx c(res, T.sign);
    const int deg = m + n;
    const int len = c.g.size();
    Series I1(len, deg), I2(len, deg);
    I1.add(1, 0, (c.xi / 2.0).matrix());
    I1.add(0, 1, (c.xi / 2.0).matrix());
    I2.add(1, 0, (c.eta / (2.0 * I)).matrix());
    I2.add(0, 1, (-c.eta / (2.0 * I)).matrix());
    for (const auto& [key, R] : T.R) {
        const int a = key.first, b = key.second;
        if (a + b < 2 || a + b >= deg) continue;
        I1.add(a, b, (T.p(1, a, b) * c.phil + T.p(3, a, b) * c.xi + R.u1.array()).matrix());
        I2.add(a, b, (T.p(2, a, b) * c.phi + T.p(4, a, b) * c.eta + R.u2.array()).matrix());
    }
    const Forcing F = cubic_forcing(res.system().phi, I1, I2);
    return PairField{F.A.get(m, n), F.B.get(m, n)} * cplx(-T.sign);
}

CoefficientTable chain_order2(const Resolvent& res, const ChainOptions& opt)
{
    const Ctx c(res, opt.forcing_sign);
    if (c.dp <= 0.0) throw std::domain_error("delta'(lambda) <= 0: soliton branch not orbitally stable");
    CoefficientTable T;
    T.sign = c.s;
    const Arr &phi = c.phi, &xi = c.xi, &eta = c.eta;

    T.Nvec[{2, 0}] = Ctx::pf(c.s * 0.25 * (-2.0 * I * phi * xi * eta), c.s * 0.25 * (-3.0 * phi * xi * xi + phi * eta * eta));
    T.provenance["N(2,0)"] = "quadratic forcing";
    T.R[{2, 0}] = c.regular(2, T.Nvec[{2, 0}]);
    T.provenance["R(2,0)"] = "regular solve, k = 2";
    fill_generic(c, T, 2, 0, {1, 2, 3, 4}, "mode pairings of N(2,0)");

    // (0,2) by conjugation
    T.Nvec[{0, 2}] = PairField{T.Nvec[{2, 0}].u1.conjugate(), T.Nvec[{2, 0}].u2.conjugate()};
    T.R[{0, 2}] = PairField{T.R[{2, 0}].u1.conjugate(), T.R[{2, 0}].u2.conjugate()};
    for (int k = 1; k <= 4; ++k) T.set_p(k, 0, 2, std::conj(T.p(k, 2, 0)), "conjugate of (2,0)");
    T.provenance["R(0,2)"] = T.provenance["N(0,2)"] = "conjugate of (2,0)";

    // (1,1): absorbed into the modulation equations, P = 0
    T.Nvec[{1, 1}] = polynomial_forcing(res, T, 1, 1);
    T.provenance["N(1,1)"] = "Taylor expansion of the nonlinearity";
    T.R[{1, 1}] = c.regular(0, T.Nvec[{1, 1}]);
    T.provenance["R(1,1)"] = "inverse of L on Ran P_c";
    for (int k = 1; k <= 4; ++k) T.set_p(k, 1, 1, 0.0, "modulation part, set to zero");
    mark_admissible(T);
    return T;
}

namespace {

// K1..K4 and N30 = -s (K1 + K2 + K3 + K4)
void order3_forcing(const Ctx& c, CoefficientTable& T, PairField K[4])
{
    const Arr &phi = c.phi, &phil = c.phil, &xi = c.xi, &eta = c.eta;
    const cplx P21 = T.p(1, 2, 0), P22 = T.p(2, 2, 0), P23 = T.p(3, 2, 0), P24 = T.p(4, 2, 0);
    const Arr r1 = T.R.at({2, 0}).u1.array(), r2 = T.R.at({2, 0}).u2.array();
    K[0] = Ctx::pf(-P22 * phi * phi * xi + I * P21 * phi * phil * eta, 3.0 * P21 * phi * phil * xi - I * P22 * phi * phi * eta);
    K[1] = Ctx::pf(I * phi * eta * r1 - phi * xi * r2, 3.0 * phi * xi * r1 - I * phi * eta * r2);
    K[2] = Ctx::pf((-I * eta * eta * eta + I * xi * xi * eta) / 8.0, (-xi * eta * eta + xi * xi * xi) / 8.0);
    K[3] = Ctx::pf(-phi * xi * eta * (P24 - I * P23), -I * phi * eta * eta * P24 + 3.0 * phi * xi * xi * P23);
    T.Nvec[{3, 0}] = (K[0] + K[1] + K[2] + K[3]) * cplx(-c.s);
    T.provenance["N(3,0)"] = "-(K1 + K2 + K3 + K4)";
}

}  // namespace

AuxBundleN2 chain_order3_N2(const Resolvent& res, CoefficientTable& T, const ChainOptions& opt)
{
    const Ctx c(res, T.sign);
    const Arr &phi = c.phi, &phil = c.phil, &xi = c.xi, &eta = c.eta;
    AuxBundleN2 B;
    PairField K[4];
    order3_forcing(c, T, K);
    B.K1 = K[0];
    B.K2 = K[1];
    B.K3 = K[2];
    B.K4 = K[3];
    const PairField& N30 = T.Nvec.at({3, 0});
    fill_generic(c, T, 3, 0, {1, 2, 3, 4}, "mode pairings of N(3,0)");

    const Probe probe = [&](const PairField& x) { return c.pv(sigma1(x), N30); };
    B.r30 = res.solve_embedded(3, N30, probe, false);
    T.R[{3, 0}] = -B.r30.value;
    T.provenance["R(3,0)"] = "limiting absorption, k = 3";
    const PairField& R30 = T.R.at({3, 0});

    B.form = -6.0 * c.pv(sigma1(R30), N30).imag();
    B.form_K = 6.0 * c.pv(sigma1(R30), K[0] + K[1] + K[2] + K[3]).imag();

    // (3,1) scalars
    TaggedScalar Q1 = c.s * c.pv(R30, Ctx::pf(-phi * phi * eta, -I * phi * phi * xi)) / (2.0 * c.eps * c.dp);
    if (opt.tag_junk) Q1 = Q1.with_tag("U31", 1.0);
    const TaggedScalar Q2 = Q1 * (-1.0 / (2.0 * I * c.eps)) +
                            TaggedScalar(c.s * (-I / (2.0 * c.eps * c.dp)) *
                                         c.pv(R30, Ctx::pf(3.0 * phi * phil * xi, -I * phi * phil * eta)));
    T.set_p(1, 3, 1, Q1, "R(3,0) pairing, (3,1) formula");
    T.set_p(2, 3, 1, Q2, "R(3,0) pairing, (3,1) formula");
    B.D1 = (Q1 * c.bil(phi * (eta * eta - 3.0 * xi * xi), phil) - Q2 * (I * c.bil(2.0 * xi * eta * phi, phi))) * I;

    const PairField Kw3 = K[0] + K[1] + K[2] * cplx(3.0) + K[3];
    const PairField Kw1 = K[0] + K[1] + K[2] + K[3];
    const cplx d2_3 = -2.0 * I * c.pv(sigma1(R30), Kw3);
    const cplx d2_1 = -2.0 * I * c.pv(sigma1(R30), Kw1);
    B.D2 = opt.k3_weight_three ? d2_3 : d2_1;
    B.D2_other = opt.k3_weight_three ? d2_1 : d2_3;

    B.K5 = c.M(R30) * cplx(c.s);
    B.G1 = PairField::zero(c.g.size());
    if (opt.with_g1 && c.s < 0.0) B.G1 = polynomial_forcing(res, T, 3, 1) - B.K5;
    T.Nvec[{3, 1}] = B.G1 + B.K5;
    T.provenance["N(3,1)"] = "G1 + K5";
    T.R[{3, 1}] = c.regular(2, T.Nvec[{3, 1}]);
    T.provenance["R(3,1)"] = "regular solve, k = 2";
    const PairField test3 = Ctx::pf(-I * (phi * eta * eta - 3.0 * phi * xi * xi), 2.0 * phi * xi * eta);
    B.D3 = c.pv(T.R[{3, 1}], test3);
    B.D3_without_g1 = c.pv(c.regular(2, B.K5), test3);
    fill_generic(c, T, 3, 1, {3, 4}, "mode pairings of N(3,1)");
    B.D4 = T.p(3, 3, 1) * (-3.0 * I * c.bil(phi * xi * xi, xi) + I * c.bil(phi * xi * eta, eta)) +
           T.p(4, 3, 1) * c.bil(2.0 * phi * eta * eta, xi);

    B.X32 = c.s * (B.D1.value + B.D2 + B.D3 + B.D4);
    B.X32_other = c.s * (B.D1.value + B.D2_other + B.D3 + B.D4);
    T.Z[{3, 2}] = B.X32 / c.xe;
    mark_admissible(T);
    return B;
}

AuxBundleN3 chain_order4_N3(const Resolvent& res, CoefficientTable& T, const ChainOptions& opt)
{
    const Ctx c(res, T.sign);
    const double s = c.s, eps = c.eps, xe = c.xe, dp = c.dp;
    const Arr &phi = c.phi, &phil = c.phil, &xi = c.xi, &eta = c.eta;
    AuxBundleN3 B;

    // order 3, below threshold
    PairField K[4];
    order3_forcing(c, T, K);
    fill_generic(c, T, 3, 0, {1, 2, 3, 4}, "mode pairings of N(3,0)");
    T.R[{3, 0}] = c.regular(3, T.Nvec.at({3, 0}));
    T.provenance["R(3,0)"] = "regular solve, k = 3";

    const cplx P21 = T.p(1, 2, 0), P22 = T.p(2, 2, 0), P33 = T.p(3, 3, 0), P34 = T.p(4, 3, 0);
    const Arr r1 = T.R.at({2, 0}).u1.array(), r2 = T.R.at({2, 0}).u2.array();
    const Arr q1 = T.R.at({3, 0}).u1.array(), q2 = T.R.at({3, 0}).u2.array();

    const Arr H11 = 2.0 * phi * phi * r1 * P22 + 2.0 * phi * r1 * r2 - 0.5 * I * xi * eta * r1 +
                    2.0 * phi * phil * P21 * r2 + 0.25 * xi * xi * r2 - 0.75 * eta * eta * r2 +
                    2.0 * phi * phi * phil * P21 * P22 + 0.25 * phi * xi * xi * P22 - 0.75 * phi * eta * eta * P22 -
                    0.5 * I * phil * xi * eta * P21;
    const Arr H21 = phi * xi * eta * (P34 - I * P33);
    const Arr H31 = phi * xi * q2 - I * phi * eta * q1;
    const Arr H12 = 3.0 * phi * r1 * r1 + 6.0 * phi * phil * P21 * r1 + 0.75 * xi * xi * r1 - 0.25 * eta * eta * r1 +
                    phi * r2 * r2 + 2.0 * phi * phi * r2 * P22 - 0.5 * I * xi * eta * r2 + phi * phi * phi * P22 * P22 +
                    3.0 * phi * phil * phil * P21 * P21 - 0.5 * I * phi * xi * eta * P22 +
                    0.75 * phil * xi * xi * P21 - 0.25 * phil * eta * eta * P21;
    const Arr H22 = 3.0 * phi * xi * xi * P33 - I * phi * eta * eta * P34;
    const Arr H32 = 3.0 * phi * xi * q1 - I * phi * eta * q2;
    B.H1[0] = H11.matrix();
    B.H1[1] = H21.matrix();
    B.H1[2] = H31.matrix();
    B.H2[0] = H12.matrix();
    B.H2[1] = H22.matrix();
    B.H2[2] = H32.matrix();
    T.Nvec[{4, 0}] = Ctx::pf(s * (H11 + H21 + H31), -s * (H12 + H22 + H32));
    T.provenance["N(4,0)"] = "H-field sums";
    const PairField& N40 = T.Nvec.at({4, 0});
    fill_generic(c, T, 4, 0, {1, 2, 3, 4}, "mode pairings of N(4,0)");

    const Probe probe = [&](const PairField& x) { return c.pv(sigma1(x), N40); };
    B.r40 = res.solve_embedded(4, N40, probe, false);
    T.R[{4, 0}] = -B.r40.value;
    T.provenance["R(4,0)"] = "limiting absorption, k = 4";
    const PairField& R40 = T.R.at({4, 0});
    const Arr a1 = R40.u1.array(), a2 = R40.u2.array();
    B.form = -8.0 * c.pv(sigma1(R40), N40).imag();

    const cplx P01 = std::conj(P21), P02c = std::conj(P22);
    const Arr s1 = r1.conjugate(), s2 = r2.conjugate();

    // (4,1)
    PairField N41 = c.M(R40) * cplx(s);
    if (opt.extra_N41.size()) N41 += opt.extra_N41;
    T.Nvec[{4, 1}] = N41;
    T.provenance["N(4,1)"] = "M R(4,0)";
    TaggedScalar P413 = p_formula(c, 3, 3, N41), P414 = p_formula(c, 4, 3, N41);
    if (opt.tag_junk) {
        P413 = P413.with_tag("U413", 1.0 / (-8.0 * eps * xe));
        P414 = P414.with_tag("U414", I / (8.0 * eps * xe));
    }
    T.set_p(3, 4, 1, P413, "mode pairings of N(4,1)");
    T.set_p(4, 4, 1, P414, "mode pairings of N(4,1)");
    for (int k : {1, 2}) T.set_p(k, 4, 1, p_formula(c, k, 3, N41), "mode pairings of N(4,1)");
    // 3 eps < lambda in the N = 3 window, so this solve is regular
    T.R[{4, 1}] = c.regular(3, N41);
    T.provenance["R(4,1)"] = "regular solve, k = 3";
    const Arr b1 = T.R.at({4, 1}).u1.array(), b2 = T.R.at({4, 1}).u2.array();

    // (4,2)
    const Arr cm11 = 2.0 * phi * s2 + 0.5 * I * xi * eta + 2.0 * phi * phi * P02c;
    const Arr cm12 = 0.25 * xi * xi - 0.75 * eta * eta + 2.0 * phi * phil * P01 + 2.0 * phi * s1;
    const Arr cm21 = -(0.75 * xi * xi + 6.0 * phi * phil * P01 - 0.25 * eta * eta + 6.0 * phi * s1);
    const Arr cm22 = -(2.0 * phi * s2 + 2.0 * phi * phi * P02c + 0.5 * I * xi * eta);
    B.calM_R40 = Ctx::pf(cm11 * a1 + cm12 * a2, cm21 * a1 + cm22 * a2);
    const PairField MR41 = c.M(T.R.at({4, 1}));
    const PairField MP = Ctx::pf(I * phi * xi * eta * P413.value + phi * xi * eta * P414.value,
                                 -3.0 * phi * xi * xi * P413.value - I * phi * eta * eta * P414.value);
    PairField N42 = (B.calM_R40 + MR41 + MP) * cplx(s);
    if (opt.extra_N42.size()) N42 += opt.extra_N42;
    T.Nvec[{4, 2}] = N42;
    T.provenance["N(4,2)"] = "calM R(4,0) + M R(4,1) + discrete-mode part";
    T.R[{4, 2}] = c.regular(2, N42);
    T.provenance["R(4,2)"] = "regular solve, k = 2";

    const Arr M11 = 2.0 * phi * phi * phi * P22 + 2.0 * phi * phi * r2 - 0.5 * I * phi * xi * eta;
    const Arr M21 = 2.0 * phi * phi * phil * P21 + 2.0 * phi * phi * r1 + 0.25 * phi * xi * xi - 0.75 * phi * eta * eta;
    const Arr M31 = -I * phi * phi * eta;
    const Arr M41 = phi * phi * xi;
    const Arr M12 = -6.0 * phi * phil * phil * P21 - 6.0 * phi * phil * r1 - 0.75 * phil * xi * xi + 0.25 * phil * eta * eta;
    const Arr M22 = -2.0 * phi * phi * phil * P22 - 2.0 * phi * phil * r2 + 0.5 * I * phil * xi * eta;
    const Arr M32 = -3.0 * phi * phil * xi;
    const Arr M42 = I * phi * phil * eta;
    B.M1[0] = M11.matrix();
    B.M1[1] = M21.matrix();
    B.M1[2] = M31.matrix();
    B.M1[3] = M41.matrix();
    B.M2[0] = M12.matrix();
    B.M2[1] = M22.matrix();
    B.M2[2] = M32.matrix();
    B.M2[3] = M42.matrix();
    B.W11 = I * c.integ(phi * phi * xi * eta);
    B.W21 = c.integ(phi * phi * xi * eta);
    B.W12 = -c.integ(3.0 * phi * phil * xi * xi);
    B.W22 = -I * c.integ(phi * phil * eta * eta);
    const cplx i2e = 2.0 * I * eps;

    TaggedScalar P421 = (P413 * B.W11 + P414 * B.W21 +
                         TaggedScalar(c.ses(a1, M11) + c.ses(a2, M21) + c.ses(b1, M31) + c.ses(b2, M41))) *
                        (s / (-i2e * dp));
    TaggedScalar P422 = (P413 * (B.W12 - B.W11 / i2e) + P414 * (B.W22 - B.W21 / i2e) +
                         TaggedScalar(c.ses(a1, M12 + M11 / i2e) + c.ses(a2, M22 + M21 / i2e) +
                                      c.ses(b1, M32 + M31 / i2e) + c.ses(b2, M42 + M41 / i2e))) *
                        (s / (-i2e * dp));
    if (opt.extra_N42.size()) {
        // the displayed formulas cover only the structured part of N(4,2)
        P421 += TaggedScalar(p_formula(c, 1, 2, opt.extra_N42));
        P422 += TaggedScalar(p_formula(c, 2, 2, opt.extra_N42));
    }
    if (opt.tag_junk) {
        P421 = P421.with_tag("U421", I / (-i2e * dp));
        P422 = P422.with_tag("U422", 1.0 / (-i2e * dp));
    }
    T.set_p(1, 4, 2, P421, "R(4,0), R(4,1) pairings, (4,2) display");
    T.set_p(2, 4, 2, P422, "R(4,0), R(4,1) pairings, (4,2) display");
    for (int k : {3, 4}) T.set_p(k, 4, 2, p_formula(c, k, 2, N42), "mode pairings of N(4,2)");

    const Arr F1 = -2.0 * phi * eta * eta * P34 - 6.0 * I * phi * xi * xi * P33 - 2.0 * phi * eta * q2 -
                   6.0 * I * phi * xi * q1 + I * phil * eta * eta * P21 - 2.0 * phi * xi * eta * P22 -
                   2.0 * xi * eta * r2 + I * eta * eta * r1 - 3.0 * I * xi * xi * r1 - 3.0 * I * phil * xi * xi * P21;
    const Arr F2 = -2.0 * phi * xi * eta * P33 - 2.0 * I * phi * xi * eta * P34 - 2.0 * phi * eta * q1 -
                   2.0 * I * phi * xi * q2 - 2.0 * phil * xi * eta * P21 - 2.0 * xi * eta * r1 +
                   3.0 * I * eta * eta * r2 - I * xi * xi * r2 + 3.0 * I * phi * eta * eta * P22 -
                   I * phi * xi * xi * P22;
    const Arr F3 = -2.0 * phi * phi * eta * P22 - 2.0 * phi * eta * r2 + 0.75 * I * xi * eta * eta -
                   0.75 * I * xi * xi * xi - 6.0 * I * phi * xi * r1 - 6.0 * I * phi * phil * xi * P21;
    const Arr F4 = -2.0 * phi * phil * eta * P21 - 2.0 * phi * eta * r1 - 0.75 * xi * xi * eta -
                   2.0 * I * P22 * phi * phi * xi + 0.75 * eta * eta * eta - 2.0 * I * phi * xi * r2;
    const Arr F5 = I * phi * eta * eta - 3.0 * I * phi * xi * xi;
    const Arr F6 = -2.0 * phi * xi * eta;
    const Arr Om1 = 3.0 * phi * xi * r1 - I * phi * eta * r2;
    const Arr Om2 = phi * xi * r2 - I * phi * eta * r1;
    const Arr* Fs[6] = {&F1, &F2, &F3, &F4, &F5, &F6};
    for (int j = 0; j < 6; ++j) B.F[j] = Fs[j]->matrix();
    B.Om1 = Om1.matrix();
    B.Om2 = Om2.matrix();

    auto& G = B.G;
    G[0] = -c.integ(2.0 * phi * phi * xi * eta * P02c) - 2.0 * c.integ(phi * xi * eta * s2) -
           0.75 * I * c.integ(xi * xi * eta * eta) + c.integ(6.0 * I * phi * phil * xi * xi) * P01 +
           0.75 * I * c.integ(xi * xi * xi * xi) + 6.0 * I * c.integ(phi * xi * xi * s1);
    G[1] = 2.0 * I * P02c * c.integ(phi * phi * xi * eta) - c.integ(2.0 * phi * phil * eta * eta) * P01 -
           2.0 * c.integ(phi * eta * eta * s1) + 0.75 * c.integ(eta * eta * eta * eta) -
           0.75 * c.integ(xi * xi * eta * eta) + I * c.integ(2.0 * phi * xi * eta * s2);
    G[2] = -I * c.integ(phi * phil * eta * eta) + 3.0 * I * c.integ(phi * phil * xi * xi);
    G[3] = -2.0 * c.integ(phi * phi * xi * eta);
    G[4] = 12.0 * I * c.ses(phi * xi * xi, r1) - 4.0 * c.ses(phi * xi * eta, r2);
    G[5] = -4.0 * c.ses(phi * eta * eta, r1) + 4.0 * I * c.ses(phi * xi * eta, r2);

    const PairField& R41 = T.R.at({4, 1});
    const PairField& R42 = T.R.at({4, 2});
    const PairField Om = Ctx::pf(Om1, Om2);
    const cplx omega41 = -4.0 * I * c.pv(R41, Om);
    B.E1 = TaggedScalar(c.pv(R40, Ctx::pf(F1, F2)) + c.pv(R42, Ctx::pf(F5, F6)) + omega41) - P413 * G[4] - P414 * G[5];
    B.E2 = P413 * (G[0] + G[4]) + P414 * (G[1] + G[5]) + P421 * G[2] + P422 * G[3];
    B.E3 = TaggedScalar(c.pv(R41, Ctx::pf(F3, F4)) - omega41);

    B.E40 = -4.0 * I * c.ses(a1, M11 * P02c + M12 * P01) - 4.0 * I * c.ses(a2, M21 * P02c + M22 * P01);
    B.E41 = -4.0 * I * c.ses(b1, M31 * P02c + M32 * P01) - 4.0 * I * c.ses(b2, M41 * P02c + M42 * P01);
    B.Y1 = -4.0 * I * B.W11 * P22 - 4.0 * I * B.W12 * P21 + G[0] + G[4];
    B.Y2 = -4.0 * I * B.W21 * P22 - 4.0 * I * B.W22 * P21 + G[1] + G[5];

    auto add = [&](const std::string& name, cplx lhs, cplx rhs, bool re_only) {
        IdentityCheck id;
        id.name = name;
        id.lhs = lhs;
        id.rhs = rhs;
        id.real_part_only = re_only;
        const double d = re_only ? std::abs(lhs.real() - rhs.real()) : std::abs(lhs - rhs);
        const double sc = re_only ? std::max(std::abs(lhs.real()), std::abs(rhs.real())) : std::max(std::abs(lhs), std::abs(rhs));
        id.residual = sc > 0.0 ? d / sc : d;
        B.identities.push_back(id);
    };
    const cplx P413v = P413.value, P414v = P414.value;
    add("e2", B.E2.value, B.E40 + B.E41 + P413v * B.Y1 + P414v * B.Y2, true);
    add("y1y2", P413v * B.Y1 + P414v * B.Y2, c.ses(a1, -6.0 * I * H22) + c.ses(a2, -6.0 * I * H21), true);
    add("e1", B.E1.value + B.E40,
        c.ses(a1, -8.0 * I * H12 - 2.0 * I * H22 - 2.0 * I * H32) + c.ses(a2, -8.0 * I * H11 - 2.0 * I * H21 - 2.0 * I * H31),
        true);
    add("e3", B.E3.value + B.E41, c.ses(a1, -6.0 * I * H32) + c.ses(a2, -6.0 * I * H31), true);
    add("y1y2form_Y1", B.Y1, s * 6.0 * I * eps * xe * (3.0 * I * P34 - P33), false);
    add("y1y2form_Y2", B.Y2, s * 6.0 * I * eps * xe * (3.0 * I * P33 + P34), false);
    if (!opt.extra_N42.size()) {
        add("p42_display_1", P421.value, p_formula(c, 1, 2, N42), false);
        add("p42_display_2", P422.value, p_formula(c, 2, 2, N42), false);
    }

    T.Z[{4, 3}] = -s * (B.E1.value + B.E2.value + B.E3.value) / xe;
    mark_admissible(T);
    return B;
}

TableCheck check_table(const Resolvent& res, const CoefficientTable& T, int N)
{
    const Grid& g = res.system().grid;
    TableCheck C;
    for (const auto& [key, v] : T.P) {
        const auto [k, m, n] = key;
        if (T.has_p(k, n, m)) C.conjugation = std::max(C.conjugation, std::abs(v.value - std::conj(T.p(k, n, m))));
        const double scale = std::max(1.0, std::abs(v.value));
        if (m <= N && n <= N && m != n) {
            const double viol = (k == 1 || k == 3) ? std::abs(v.value.imag()) : std::abs(v.value.real());
            C.reality = std::max(C.reality, viol / scale);
        }
        const bool even = (m + n) % 2 == 0;
        if ((even && (k == 3 || k == 4)) || (!even && (k == 1 || k == 2)))
            C.vanishing = std::max(C.vanishing, std::abs(v.value) / scale);
    }
    auto parity_res = [&](const PairField& f, bool even) {
        const double a = even ? odd_fraction(g, f.u1) : even_fraction(g, f.u1);
        const double b = even ? odd_fraction(g, f.u2) : even_fraction(g, f.u2);
        return std::max(a, b);
    };
    for (const auto& [key, f] : T.Nvec) {
        if (f.max_abs() == 0.0) continue;
        const bool even = (key.first + key.second) % 2 == 0;
        C.parity = std::max(C.parity, parity_res(f, even));
        if (key.first <= N && key.second <= N)
            C.admissibility = std::max(C.admissibility, admissibility_residual(f * I));
    }
    for (const auto& [key, f] : T.R) {
        if (f.max_abs() == 0.0) continue;
        const bool even = (key.first + key.second) % 2 == 0;
        C.parity = std::max(C.parity, parity_res(f, even));
        if (key.first <= N && key.second <= N) C.admissibility = std::max(C.admissibility, admissibility_residual(f));
    }
    return C;
}

}  // namespace tfgr
