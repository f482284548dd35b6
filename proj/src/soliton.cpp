#include "trapfgr/soliton.hpp"

#include <cmath>

namespace tfgr {

SymPenta build_Lminus(const Grid& g, double lambda, const RVec& V, const RVec& phi, const Nonlinearity& f)
{
    RVec d(g.size());
    for (int i = 0; i < g.size(); ++i)
        d[i] = lambda + V[i] - f.f(phi[i] * phi[i]);
    return SymPenta::neg_laplacian(g).plus_diag(d);
}

SymPenta build_Lplus(const Grid& g, double lambda, const RVec& V, const RVec& phi, const Nonlinearity& f)
{
    RVec d(g.size());
    for (int i = 0; i < g.size(); ++i) {
        const double s = phi[i] * phi[i];
        d[i] = lambda + V[i] - f.f(s) - 2.0 * f.fp(s) * s;
    }
    return SymPenta::neg_laplacian(g).plus_diag(d);
}

RVec free_profile(const Grid& g, double lambda, double p)
{
    RVec phi(g.size());
    const double amp = std::pow((p + 1.0) * lambda, 1.0 / (2.0 * p));
    for (int i = 0; i < g.size(); ++i)
        phi[i] = amp * std::pow(1.0 / std::cosh(p * std::sqrt(lambda) * g.x()[i]), 1.0 / p);
    return phi;
}

static double power_of(const Nonlinearity& f)
{
    if (f.is_cubic()) return 1.0;
    if (f.name.rfind("power:", 0) == 0) return std::stod(f.name.substr(6));
    return 1.0;
}

static RBand to_band(const SymPenta& A)
{
    const int n = A.size();
    RBand B(n, 2, 2);
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j)
            B.add(i, j, A.at(i, j));
    return B;
}

RVec soliton_residual(const Soliton& s, const Nonlinearity& f)
{
    return build_Lminus(s.grid, s.lambda, s.V, s.profile, f).apply(s.profile);
}

Soliton solve_from_seed(double lambda, const PotentialSpec& spec, const Grid& g, const Nonlinearity& f,
                        const RVec& seed)
{
    Soliton s;
    s.grid = g;
    s.lambda = lambda;
    s.h = spec.depth == 0.0 ? 0.0 : spec.h;
    s.potential = spec;
    s.V = spec.depth == 0.0 ? RVec(RVec::Zero(g.size())) : evaluate_potential(spec, g);
    s.profile = seed;

    std::vector<double> history;
    const double floor_tol = 1e-13;
    // attainable residual given rounding in the stencil
    const double stall_tol = std::max(1e-11, 50.0 * 2.2e-16 * 16.0 / (3.0 * g.dx() * g.dx()));
    auto resnorm = [&](const RVec& phi) {
        return l2_norm(g, build_Lminus(g, lambda, s.V, phi, f).apply(phi)) / l2_norm(g, phi);
    };
    double r = resnorm(s.profile);
    history.push_back(r);
    for (int it = 0; it < 50; ++it) {
        if (r <= floor_tol) break;
        const RVec F = build_Lminus(g, lambda, s.V, s.profile, f).apply(s.profile);
        RBand J = to_band(build_Lplus(g, lambda, s.V, s.profile, f));
        J.factor();
        // ground states are even; dropping the odd part removes translation drift
        const RVec step = parity_split(g, RVec(J.solve(-F))).first;
        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
            RVec trial = s.profile + t * step;
            const double scale = trial.cwiseAbs().maxCoeff();
            if (trial.minCoeff() < -1e-12 * scale) continue;  // sign change
            const double rt = resnorm(trial);
            if (rt < r || rt <= floor_tol) {
                s.profile = trial;
                r = rt;
                accepted = true;
                break;
            }
        }
        history.push_back(r);
        s.newton_iterations = it + 1;
        if (!accepted) {
            if (r <= stall_tol) break;  // stagnated at rounding level
            throw NewtonFailure("Newton line search failed", history);
        }
    }
    if (r > stall_tol) throw NewtonFailure("Newton did not converge in 50 iterations", history);
    s.residual_norm = r;
    s.mass = inner(g, s.profile, s.profile);
    lambda_derivative(s, f);
    return s;
}

Soliton solve_free(double lambda, const Grid& g, const Nonlinearity& f)
{
    if (lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
    PotentialSpec none;
    none.depth = 0.0;
    return solve_from_seed(lambda, none, g, f, free_profile(g, lambda, power_of(f)));
}

Soliton solve_trapped(double lambda, const PotentialSpec& spec, const Grid& g, const Nonlinearity& f)
{
    const double base = lambda + spec.at_origin();
    if (base <= 0.0) throw std::invalid_argument("lambda + V(0) must be positive");
    // continuation in h from the flat well V = V(0)
    RVec phi = free_profile(g, base, power_of(f));
    double h_done = 0.0;
    double step = spec.h;
    Soliton last;
    int guard = 0;
    while (h_done < spec.h) {
        if (++guard > 200) throw std::runtime_error("h continuation stalled");
        const double h_try = std::min(spec.h, h_done + step);
        PotentialSpec ps = spec;
        ps.h = h_try;
        try {
            last = solve_from_seed(lambda, ps, g, f, phi);
            phi = last.profile;
            h_done = h_try;
            step *= 1.5;
        } catch (const NewtonFailure&) {
            step *= 0.5;
            if (step < 1e-6 * std::max(spec.h, 1e-3)) throw;
        }
    }
    return last;
}

void lambda_derivative(Soliton& s, const Nonlinearity& f)
{
    const SymPenta Lp = build_Lplus(s.grid, s.lambda, s.V, s.profile, f);
    RBand J = to_band(Lp);
    J.factor();
    // the odd part is a multiple of the near-kernel phi' when V = 0
    s.d_lambda = parity_split(s.grid, RVec(J.solve(-s.profile))).first;
    const double rel = l2_norm(s.grid, RVec(Lp.apply(s.d_lambda) + s.profile)) / l2_norm(s.grid, s.profile);
    if (!std::isfinite(rel) || rel > 1e-6)
        throw std::runtime_error("L_+ is numerically singular; near-zero mode blocks phi_lambda");
    s.delta_prime = inner(s.grid, s.profile, s.d_lambda);
}

}  // namespace tfgr
