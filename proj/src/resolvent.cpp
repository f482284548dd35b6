#include "trapfgr/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tfgr {

namespace {

std::vector<double> lagrange_at_zero(const std::vector<double>& t)
{
    const size_t m = t.size();
    std::vector<double> w(m, 1.0);
    for (size_t j = 0; j < m; ++j)
        for (size_t i = 0; i < m; ++i)
            if (i != j) w[j] *= t[i] / (t[i] - t[j]);
    return w;
}

PairField combine(const std::vector<PairField>& f, const std::vector<double>& w, size_t first)
{
    PairField r = PairField::zero(f[first].size());
    for (size_t j = 0; j < w.size(); ++j) r += f[first + j] * cplx(w[j]);
    return r;
}

}  // namespace

cplx extrapolate_to_zero(const std::vector<double>& t, const std::vector<cplx>& y)
{
    if (t.size() != y.size() || t.empty()) throw std::invalid_argument("extrapolation needs matching samples");
    const std::vector<double> w = lagrange_at_zero(t);
    cplx s = 0.0;
    for (size_t j = 0; j < t.size(); ++j) s += w[j] * y[j];
    return s;
}

Resolvent::Resolvent(const LinearizedSystem& sys, const DiscreteModes& modes, ResolventOptions opt)
    : sys_(sys), modes_(modes), Pc_(sys, modes), opt_(std::move(opt)), eps_(modes.epsilon)
{
    for (size_t j = 1; j < opt_.eta_factors.size(); ++j)
        if (!(opt_.eta_factors[j] < opt_.eta_factors[j - 1]) || opt_.eta_factors[j] <= 0.0)
            throw std::invalid_argument("eta schedule must be strictly decreasing and positive");
}

ResolventQuery Resolvent::query(int k) const
{
    ResolventQuery q;
    q.k = k;
    q.shift = cplx(0.0, k * eps_);
    q.regime = std::abs(k) * eps_ > sys_.lambda ? Regime::embedded : Regime::below_threshold;
    for (double f : opt_.eta_factors) q.eta_schedule.push_back(f * eps_);
    return q;
}

PairField Resolvent::solve_regular(int k, const PairField& rhs) const
{
    const double tol = opt_.edge_tol_rel * sys_.lambda;
    if (std::abs(k) * eps_ > sys_.lambda - tol)
        throw std::domain_error("shift at or beyond the essential spectrum edge; use the embedded solver");
    const PairField f = Pc_.apply(rhs);
    if (f.max_abs() == 0.0) return PairField::zero(rhs.size());
    if (k == 0) {
        // L_- u2 = f1, -L_+ u1 = f2; the gauge direction of L_- is removed by P_c
        auto solve_real = [](const SymPenta& S, const CVec& b) {
            const int n = S.size();
            RBand B(n, 2, 2);
            for (int i = 0; i < n; ++i)
                for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j) B.add(i, j, S.at(i, j));
            B.factor();
            const RVec re = B.solve(RVec(b.real())), im = B.solve(RVec(b.imag()));
            CVec x(n);
            for (int i = 0; i < n; ++i) x[i] = cplx(re[i], im[i]);
            return x;
        };
        return Pc_.apply(PairField{-solve_real(sys_.Lp, f.u2), solve_real(sys_.Lm, f.u1)});
    }
    CBand A = block_matrix(sys_.Lm, sys_.Lp, cplx(0.0, k * eps_));
    A.factor();
    return Pc_.apply(deinterleave(A.solve(interleave(f))));
}

SymPenta Resolvent::padded_operator(const Grid& ge, bool minus) const
{
    const RVec V = evaluate_potential(sys_.potential, ge);
    const RVec phi = embed(sys_.grid, ge, sys_.phi);
    return minus ? build_Lminus(ge, sys_.lambda, V, phi, sys_.f) : build_Lplus(ge, sys_.lambda, V, phi, sys_.f);
}

PairField Resolvent::padded_solve(cplx shift, const PairField& rhs, int pad, const CVec& extra_tail) const
{
    const Grid& g = sys_.grid;
    const Grid ge = g.extended(pad);
    const PairField f = Pc_.apply(rhs);
    const PairField fe{embed(g, ge, f.u1), embed(g, ge, f.u2)};
    CBand A = block_matrix(padded_operator(ge, true), padded_operator(ge, false), shift, extra_tail);
    A.factor();
    const PairField xe = deinterleave(A.solve(interleave(fe)));
    return Pc_.apply(PairField{restrict_to(ge, g, xe.u1), restrict_to(ge, g, xe.u2)});
}

PairField Resolvent::cap_solve(int k, const PairField& f, double width_scale, bool anticausal) const
{
    const Grid& g = sys_.grid;
    const double kw2 = std::abs(k) * eps_ - sys_.lambda;
    const double kw = std::sqrt(kw2);
    const double wl = 2.0 * M_PI / kw;
    const double x0 = g.half_width() + 2.0 * wl;
    const double w = width_scale * opt_.cap_wavelengths * wl;
    const double W0 = opt_.cap_strength * kw2;
    const int pad = static_cast<int>(std::ceil((2.0 * wl + 1.25 * w) / g.dx()));
    const Grid ge = g.extended(pad);
    CVec W(ge.size());
    for (int i = 0; i < ge.size(); ++i) {
        const double d = std::max(0.0, (std::abs(ge.x()[i]) - x0) / w);
        W[i] = W0 * std::pow(std::min(d, 1.0), 4);
    }
    if (!anticausal) W = -W;
    return padded_solve(cplx(0.0, k * eps_), f, pad, W);
}

ResolventAnswer Resolvent::solve_embedded(int k, const PairField& rhs, const Probe& probe_in, bool anticausal) const
{
    const Grid& g = sys_.grid;
    Probe probe = probe_in;
    if (!probe) probe = [&](const PairField& x) { return inner(g, sigma1(x), rhs); };

    ResolventAnswer ans;
    const ResolventQuery q = query(k);
    if (q.regime == Regime::below_threshold) {
        ans.value = solve_regular(k, rhs);
        ans.value_lower_order = ans.value;
        ans.cap_value = ans.value;
        ans.probe_limit = ans.probe_cap = probe(ans.value);
        ans.trace_monotone = true;
        ans.note = "below threshold: regular solve";
        return ans;
    }
    if (rhs.max_abs() == 0.0) {
        ans.value = ans.value_lower_order = ans.cap_value = PairField::zero(rhs.size());
        ans.trace_monotone = true;
        return ans;
    }
    const double kw2 = std::abs(k) * eps_ - sys_.lambda;
    if (kw2 < opt_.edge_tol_rel * sys_.lambda)
        throw std::domain_error("shift within threshold tolerance of the essential spectrum edge");

    const double sgn = anticausal ? 1.0 : -1.0;
    for (double eta : q.eta_schedule) {
        // damped outgoing wavenumber sqrt(kw2 + i eta)
        const double imq = std::sqrt(cplx(kw2, eta)).imag();
        const double reach = std::log(1.0 / opt_.reach_tol) / (2.0 * imq);
        const int pad = static_cast<int>(std::ceil(reach / g.dx()));
        PairField x = padded_solve(cplx(sgn * eta, k * eps_), rhs, pad, CVec());
        ans.eta_trace.push_back(probe(x));
        ans.eta_fields.push_back(std::move(x));
        ans.eta_schedule.push_back(eta);
    }
    const size_t m = ans.eta_schedule.size();
    if (m < 3) throw std::invalid_argument("eta schedule needs at least three values");
    std::vector<double> t = ans.eta_schedule;
    for (double& v : t) v *= sgn;
    const std::vector<double> w_all = lagrange_at_zero(t);
    const std::vector<double> t3(t.end() - 3, t.end());
    const std::vector<double> w3 = lagrange_at_zero(t3);
    ans.value = combine(ans.eta_fields, w_all, 0);
    ans.value_lower_order = combine(ans.eta_fields, w3, m - 3);
    ans.probe_limit = probe(ans.value);
    ans.extrapolation_error = std::abs(ans.probe_limit - probe(ans.value_lower_order));

    int sign_changes = 0;
    for (size_t j = 2; j < m; ++j) {
        const double d1 = ans.eta_trace[j - 1].imag() - ans.eta_trace[j - 2].imag();
        const double d2 = ans.eta_trace[j].imag() - ans.eta_trace[j - 1].imag();
        if (d1 * d2 < 0.0) ++sign_changes;
    }
    ans.trace_monotone = sign_changes == 0;

    ans.cap_value = cap_solve(k, rhs, 1.0, anticausal);
    ans.probe_cap = probe(ans.cap_value);
    ans.cap_error = std::abs(ans.probe_cap - probe(cap_solve(k, rhs, 1.5, anticausal)));
    ans.method_agreement = std::abs(ans.probe_limit - ans.probe_cap);
    const double bar = ans.extrapolation_error + ans.cap_error + 1e-14 * std::abs(ans.probe_limit);
    if (ans.method_agreement > 100.0 * bar) {
        ans.flagged = true;
        ans.note = "shift and absorbing-potential methods disagree";
    }
    if (!ans.trace_monotone) {
        ans.flagged = true;
        ans.note += ans.note.empty() ? "non-monotone eta trace" : "; non-monotone eta trace";
    }
    return ans;
}

double Resolvent::conjugate_flip_check(int k, const PairField& rhs, double* extrapolation_error, double* absolute) const
{
    if (rhs.max_abs() == 0.0) {
        if (extrapolation_error) *extrapolation_error = 0.0;
        if (absolute) *absolute = 0.0;
        return 0.0;
    }
    const Grid& g = sys_.grid;
    Probe probe = [&](const PairField& x) { return bilinear(g, sigma1(x), rhs); };
    const ResolventAnswer a = solve_embedded(k, rhs, probe, false);
    const ResolventAnswer b = solve_embedded(-k, rhs, probe, true);
    if (extrapolation_error) *extrapolation_error = std::max(a.extrapolation_error, b.extrapolation_error);
    const double va = a.probe_limit.imag(), vb = b.probe_limit.imag();
    if (absolute) *absolute = std::abs(va - vb);
    const double scale = std::max(std::abs(va), 1e-300);
    return std::abs(va - vb) / scale;
}

}  // namespace tfgr
