#include "trapfgr/linearization.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <lapacke.h>

namespace tfgr {

PairField LinearizedSystem::apply(const PairField& u) const
{
    return {Lm.apply(u.u2), -Lp.apply(u.u1)};
}

PairField LinearizedSystem::apply_adjoint(const PairField& u) const
{
    return {-Lp.apply(u.u2), Lm.apply(u.u1)};
}

LinearizedSystem assemble(const Soliton& s, const Nonlinearity& f)
{
    LinearizedSystem sys;
    sys.grid = s.grid;
    sys.lambda = s.lambda;
    sys.h = s.h;
    sys.potential = s.potential;
    sys.f = f;
    sys.V = s.V;
    sys.phi = s.profile;
    sys.phi_lambda = s.d_lambda;
    sys.delta_prime = s.delta_prime;
    sys.Lm = build_Lminus(s.grid, s.lambda, s.V, s.profile, f);
    sys.Lp = build_Lplus(s.grid, s.lambda, s.V, s.profile, f);
    return sys;
}

namespace {

// symmetric pentadiagonal restricted to odd functions, unknowns on x > 0
SymPenta odd_restrict(const SymPenta& A, int c)
{
    const int n = A.size();
    const int m = n - 1 - c;
    SymPenta B;
    B.d0 = A.d0.segment(c + 1, m);
    B.d1 = A.d1.segment(c + 1, m - 1);
    B.d2 = A.d2.segment(c + 1, m - 2);
    B.d0[0] -= A.at(c + 1, c - 1);
    return B;
}

// lower Cholesky factor of an SPD pentadiagonal matrix, dense-band layout (kd = 2)
Eigen::MatrixXd band_cholesky(const SymPenta& A)
{
    const int m = A.size();
    Eigen::MatrixXd ab = Eigen::MatrixXd::Zero(3, m);
    for (int j = 0; j < m; ++j) {
        ab(0, j) = A.d0[j];
        if (j + 1 < m) ab(1, j) = A.d1[j];
        if (j + 2 < m) ab(2, j) = A.d2[j];
    }
    const lapack_int info = LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'L', m, 2, ab.data(), 3);
    if (info != 0) throw std::runtime_error("odd-sector operator is not positive definite");
    return ab;
}

// lowest k eigenvalues of C^T B C with C from band_cholesky(A); i.e. of A B
std::vector<double> product_eigenvalues(const SymPenta& A, const SymPenta& B, int k)
{
    const int m = A.size();
    const Eigen::MatrixXd C = band_cholesky(A);  // C(r, j) = L(j + r, j)
    auto Lat = [&](int i, int j) -> double {
        const int r = i - j;
        return (r >= 0 && r <= 2 && i < m) ? C(r, j) : 0.0;
    };
    const int kd = 4;
    Eigen::MatrixXd ab = Eigen::MatrixXd::Zero(kd + 1, m);  // lower storage
    std::vector<double> v(m, 0.0), w(m, 0.0);
    for (int j = 0; j < m; ++j) {
        for (int r = 0; r <= 2 && j + r < m; ++r) v[j + r] = Lat(j + r, j);
        const int w0 = std::max(0, j - 2), w1 = std::min(m - 1, j + 4);
        for (int i = w0; i <= w1; ++i) {
            double s = 0.0;
            for (int q = std::max(0, i - 2); q <= std::min(m - 1, i + 2); ++q)
                if (q >= j && q <= j + 2) s += B.at(i, q) * v[q];
            w[i] = s;
        }
        for (int i = j; i <= std::min(m - 1, j + kd); ++i) {
            double s = 0.0;
            for (int q = i; q <= std::min(m - 1, i + 2); ++q)
                if (q >= w0 && q <= w1) s += Lat(q, i) * w[q];
            ab(i - j, j) = s;
        }
        for (int r = 0; r <= 2 && j + r < m; ++r) v[j + r] = 0.0;
        for (int i = w0; i <= w1; ++i) w[i] = 0.0;
    }
    std::vector<double> ev(m);
    lapack_int found = 0;
    std::vector<lapack_int> ifail(m);
    const lapack_int info = LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'N', 'I', 'L', m, kd, ab.data(), kd + 1, nullptr, 1,
                                           0.0, 0.0, 1, k, 0.0, &found, ev.data(), nullptr, 1, ifail.data());
    if (info != 0) throw std::runtime_error("dsbevx failed");
    ev.resize(found);
    return ev;
}

RBand real_block(const SymPenta& Lm, const SymPenta& Lp, double shift)
{
    const int n = Lm.size();
    RBand A(2 * n, 5, 5);
    for (int i = 0; i < n; ++i) {
        A.add(2 * i, 2 * i, -shift);
        A.add(2 * i + 1, 2 * i + 1, -shift);
        for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j) {
            A.add(2 * i, 2 * j + 1, Lm.at(i, j));
            A.add(2 * i + 1, 2 * j, Lp.at(i, j));
        }
    }
    return A;
}

}  // namespace

DiscreteModes discrete_modes(const LinearizedSystem& sys)
{
    const Grid& g = sys.grid;
    const int c = g.center();
    const int n = g.size();
    const double lam2 = sys.lambda * sys.lambda;

    const SymPenta Am = odd_restrict(sys.Lm, c);
    const SymPenta Ap = odd_restrict(sys.Lp, c);
    const std::vector<double> mu = product_eigenvalues(Am, Ap, 2);
    if (mu.empty() || mu[0] <= 0.0 || mu[0] >= lam2)
        throw std::runtime_error("no internal mode: no odd eigenvalue of L_- L_+ in (0, lambda^2)");

    DiscreteModes md;
    md.second_odd = mu.size() > 1 ? mu[1] : INFINITY;
    md.sa_ok = md.second_odd > lam2;
    if (!md.sa_ok) md.sa_message = "more than one internal mode: a second odd eigenvalue lies below lambda^2";

    // inverse iteration on (xi, eta) -> (L_- eta, L_+ xi) at the coarse eigenvalue
    double eps = std::sqrt(mu[0]);
    const RVec dphi = first_derivative(g, sys.phi);
    RVec y(2 * n);
    for (int i = 0; i < n; ++i) {
        y[2 * i] = dphi[i];
        y[2 * i + 1] = g.x()[i] * sys.phi[i];
    }
    for (int it = 0; it < 4; ++it) {
        RBand B = real_block(sys.Lm, sys.Lp, eps);
        B.factor();
        y = B.solve(y);
        y /= y.norm();
        RVec xi(n), eta(n);
        for (int i = 0; i < n; ++i) {
            xi[i] = y[2 * i];
            eta[i] = y[2 * i + 1];
        }
        // two-sided Rayleigh quotient with left vector (eta, xi)
        eps = (eta.dot(sys.Lm.apply(eta)) + xi.dot(sys.Lp.apply(xi))) / (2.0 * xi.dot(eta));
    }
    RVec xi(n), eta(n);
    for (int i = 0; i < n; ++i) {
        xi[i] = y[2 * i];
        eta[i] = y[2 * i + 1];
    }
    // odd symmetrization removes rounding drift
    xi = parity_split(g, xi).second;
    eta = parity_split(g, eta).second;

    const RVec phi0 = free_profile(g, sys.lambda + sys.potential.at_origin());
    const double target = std::sqrt(2.0) * l2_norm(g, RVec(first_derivative(g, phi0)));
    double scale = target / l2_norm(g, xi);
    if (inner(g, xi, dphi) < 0.0) scale = -scale;

    md.epsilon = eps;
    md.xi = scale * xi;
    md.eta = scale * eta;
    {
        // Rayleigh quotient of the L_+ L_- ordering: eta^T L_- eta / eta^T L_+^{-1} eta on odd functions
        const int mh = n - 1 - c;
        RBand Bp(mh, 2, 2);
        for (int i = 0; i < mh; ++i)
            for (int j = std::max(0, i - 2); j <= std::min(mh - 1, i + 2); ++j) Bp.add(i, j, Ap.at(i, j));
        Bp.factor();
        const RVec eh = md.eta.segment(c + 1, mh);
        const double num = eh.dot(Am.apply(eh));
        const double den = eh.dot(Bp.solve(eh));
        md.epsilon_alt = std::sqrt(num / den);
    }
    md.pairing = inner(g, md.xi, md.eta);
    md.overlap = std::abs(inner(g, xi, dphi)) / (l2_norm(g, xi) * l2_norm(g, dphi));
    if (md.pairing <= 0.0) throw std::runtime_error("<xi, eta> is not positive");
    return md;
}

DiscreteModes scaled_modes(const DiscreteModes& m, double c)
{
    DiscreteModes r = m;
    r.xi *= c;
    r.eta *= c;
    r.pairing *= c * c;
    return r;
}

Projector::Projector(const LinearizedSystem& sys, const DiscreteModes& modes)
    : grid_(sys.grid), phi_(sys.phi), phil_(sys.phi_lambda), xi_(modes.xi), eta_(modes.eta)
{
    const Grid& g = grid_;
    A1_ << inner(g, phil_, phi_), inner(g, xi_, phi_), inner(g, phil_, eta_), inner(g, xi_, eta_);
    A2_ << inner(g, phi_, phil_), inner(g, eta_, phil_), inner(g, phi_, xi_), inner(g, eta_, xi_);
    if (std::abs(A1_.determinant()) < 1e-10 || std::abs(A2_.determinant()) < 1e-10 ||
        std::abs(inner(g, xi_, eta_)) < 1e-10)
        throw std::runtime_error("degenerate discrete-mode pairing");
}

PairField Projector::apply(const PairField& u) const
{
    const Grid& g = grid_;
    const CVec phi = to_complex(phi_), phil = to_complex(phil_), xi = to_complex(xi_), eta = to_complex(eta_);
    const Eigen::Matrix2cd A1 = A1_.cast<cplx>(), A2 = A2_.cast<cplx>();
    const Eigen::Vector2cd r1(bilinear(g, u.u1, phi), bilinear(g, u.u1, eta));
    const Eigen::Vector2cd r2(bilinear(g, u.u2, phil), bilinear(g, u.u2, xi));
    const Eigen::Vector2cd c1 = A1.partialPivLu().solve(r1);
    const Eigen::Vector2cd c2 = A2.partialPivLu().solve(r2);
    return {u.u1 - c1[0] * phil - c1[1] * xi, u.u2 - c2[0] * phi - c2[1] * eta};
}

ResonanceDiagnostic resonance_diagnostic(const LinearizedSystem& sys, const std::vector<double>& eta0)
{
    ResonanceDiagnostic d;
    const int n = sys.grid.size();
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    for (double e0 : eta0) {
        CBand B = block_matrix(sys.Lm, sys.Lp, cplx(e0, -sys.lambda));
        B.factor();
        CVec x(2 * n);
        for (int i = 0; i < 2 * n; ++i) x[i] = cplx(nd(rng), nd(rng));
        x /= x.norm();
        double s = 0.0;
        for (int it = 0; it < 30; ++it) {
            CVec y = B.solve(B.solve(x, 'C'));
            const double nrm = y.norm();
            s = 1.0 / std::sqrt(nrm);
            x = y / nrm;
        }
        d.eta0.push_back(e0);
        d.sigma_min.push_back(s);
    }
    d.value = d.sigma_min.empty() ? 0.0 : *std::min_element(d.sigma_min.begin(), d.sigma_min.end());
    return d;
}

}  // namespace tfgr
