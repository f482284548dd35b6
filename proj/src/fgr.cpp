#include "trapfgr/fgr.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace tfgr {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void fill_resolvent_diagnostics(FgrReport& r, const ResolventAnswer& a, double factor)
{
    r.extrapolation_error = factor * a.extrapolation_error;
    r.cap_error = factor * a.cap_error;
    r.method_agreement = factor * std::abs(a.probe_limit.imag() - a.probe_cap.imag());
    r.methods_agree = r.method_agreement <= r.extrapolation_error + r.cap_error + 1e-12 * std::abs(r.route_A);
    r.trace_monotone = a.trace_monotone;
    if (a.flagged) {
        r.flagged = true;
        r.note += a.note;
    }
}

void finish(FgrReport& r)
{
    const double scale = std::max(std::abs(r.route_B), 1e-300);
    r.route_rel_diff = std::abs(r.route_A - r.route_B) / scale;
    r.error_bar = r.extrapolation_error + std::abs(r.route_A - r.route_B) + 1e-13 * std::abs(r.route_A);
    r.sign_ok = r.route_A <= r.error_bar;
    r.strictly_negative = r.route_A < -r.error_bar;
}

void flip(FgrReport& r, const Resolvent& res, int k, const PairField& N, double factor)
{
    double ext = 0.0, abs_diff = 0.0;
    res.conjugate_flip_check(k, N, &ext, &abs_diff);
    r.flip_discrepancy = factor * abs_diff;
    r.flip_extrapolation_error = factor * ext;
    r.flip_ok = r.flip_discrepancy <= 10.0 * r.flip_extrapolation_error + 1e-12 * std::abs(r.route_A);
    if (!r.flip_ok) {
        r.flagged = true;
        r.note += r.note.empty() ? "conjugate orientation mismatch" : "; conjugate orientation mismatch";
    }
}

}  // namespace

FgrReport fgr_n2(const Resolvent& res, const CoefficientTable& T, const AuxBundleN2& B, bool flip_check)
{
    FgrReport r;
    r.N = 2;
    const LinearizedSystem& sys = res.system();
    r.lambda = sys.lambda;
    r.h = sys.h;
    r.depth = sys.potential.depth;
    r.epsilon = res.epsilon();
    r.pairing = res.modes().pairing;
    r.window = select_window(r.lambda, r.epsilon, res.options().edge_tol_rel);
    const double xe = r.pairing;
    r.route_A = B.form / xe;
    r.route_B = B.X32.real() / xe;
    r.route_B_other = B.X32_other.real() / xe;
    fill_resolvent_diagnostics(r, B.r30, 6.0 / xe);
    r.junk_leak = B.D1.real_leak() / xe;
    r.g1_shift = std::abs(B.D3.real() - B.D3_without_g1.real()) / xe / std::max(std::abs(r.route_B), 1e-300);
    IdentityCheck id;
    id.name = "proposition_K_sum";
    id.lhs = B.X32;
    id.rhs = T.sign * B.form_K;
    id.residual = std::abs(id.lhs.real() - id.rhs.real()) / std::max(std::abs(id.rhs.real()), 1e-300);
    r.identities.push_back(id);
    r.table = check_table(res, T, 2);
    finish(r);
    if (flip_check) flip(r, res, 3, T.Nvec.at({3, 0}), 6.0 / xe);
    return r;
}

FgrReport fgr_n3(const Resolvent& res, const CoefficientTable& T, const AuxBundleN3& B, bool flip_check)
{
    FgrReport r;
    r.N = 3;
    const LinearizedSystem& sys = res.system();
    r.lambda = sys.lambda;
    r.h = sys.h;
    r.depth = sys.potential.depth;
    r.epsilon = res.epsilon();
    r.pairing = res.modes().pairing;
    r.window = select_window(r.lambda, r.epsilon, res.options().edge_tol_rel);
    const double xe = r.pairing;
    r.route_A = B.form / xe;
    r.route_B = T.Z.at({4, 3}).real();
    fill_resolvent_diagnostics(r, B.r40, 8.0 / xe);
    r.junk_leak = std::max({B.E1.real_leak(), B.E2.real_leak(), B.E3.real_leak(),
                            (B.E1 + B.E2 + B.E3).real_leak()}) / xe;
    r.identities = B.identities;
    for (const auto& id : B.identities)
        if (id.residual > 1e-6) {
            r.flagged = true;
            r.note += (r.note.empty() ? "" : "; ") + ("identity " + id.name + " violated");
        }
    r.table = check_table(res, T, 3);
    finish(r);
    if (flip_check) flip(r, res, 4, T.Nvec.at({4, 0}), 8.0 / xe);
    return r;
}

FgrRun run_fgr(int N, const FgrConfig& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    if (N != 2 && N != 3) throw std::invalid_argument("FGR chains exist for N = 2 and N = 3 only");
    FgrRun run;
    const Grid g(cfg.half_width, cfg.n_points);
    const Nonlinearity f = Nonlinearity::cubic();
    run.soliton = solve_trapped(cfg.lambda, cfg.potential, g, f);
    if (run.soliton.delta_prime <= 0.0) throw std::domain_error("delta'(lambda) <= 0");
    run.sys = assemble(run.soliton, f);
    run.modes = discrete_modes(run.sys);
    if (!run.modes.sa_ok) throw std::domain_error(run.modes.sa_message);
    const WindowReport w = select_window(cfg.lambda, run.modes.epsilon, cfg.resolvent.edge_tol_rel);
    if (!w.valid || w.N != N) {
        std::ostringstream os;
        os << "window violation: lambda = " << cfg.lambda << ", eps = " << run.modes.epsilon << " gives N = " << w.N
           << (w.reason.empty() ? "" : " (" + w.reason + ")") << ", requested N = " << N;
        throw std::domain_error(os.str());
    }
    if (cfg.mode_scale != 1.0) run.modes = scaled_modes(run.modes, cfg.mode_scale);
    const Resolvent res(run.sys, run.modes, cfg.resolvent);
    run.table = chain_order2(res, cfg.chain);
    if (N == 2) {
        const AuxBundleN2 B = chain_order3_N2(res, run.table, cfg.chain);
        run.report = fgr_n2(res, run.table, B, cfg.flip_check);
    } else {
        const AuxBundleN3 B = chain_order4_N3(res, run.table, cfg.chain);
        run.report = fgr_n3(res, run.table, B, cfg.flip_check);
    }
    run.report.seconds = seconds_since(t0);
    return run;
}

double vector_junk_shift(const Resolvent& res, const ChainOptions& base, unsigned seed, double* imag_shift)
{
    const Grid& g = res.system().grid;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    // smooth localized random fields of a prescribed parity
    auto field = [&](bool odd) {
        RVec v(g.size());
        const double c[4] = {nd(rng), nd(rng), nd(rng), nd(rng)};
        for (int i = 0; i < g.size(); ++i) {
            const double x = g.x()[i];
            const double env = std::exp(-0.1 * x * x);
            v[i] = odd ? env * (c[0] * x + c[1] * x * x * x * 0.1) : env * (c[2] + c[3] * x * x * 0.1);
        }
        return v;
    };
    auto co_admissible = [&](bool odd) {
        return PairField{to_complex(field(odd)) * cplx(0.0, -1.0), to_complex(field(odd))};
    };
    ChainOptions plain = base;
    plain.extra_N41 = PairField();
    plain.extra_N42 = PairField();
    ChainOptions probe = plain;
    probe.extra_N41 = co_admissible(true) * cplx(0.01);
    probe.extra_N42 = co_admissible(false) * cplx(0.01);

    CoefficientTable T0 = chain_order2(res, plain);
    chain_order4_N3(res, T0, plain);
    CoefficientTable T1 = chain_order2(res, probe);
    chain_order4_N3(res, T1, probe);
    const cplx z0 = T0.Z.at({4, 3}), z1 = T1.Z.at({4, 3});
    if (imag_shift) *imag_shift = std::abs(z1.imag() - z0.imag()) / std::max(std::abs(z0.real()), 1e-300);
    return std::abs(z1.real() - z0.real()) / std::max(std::abs(z0.real()), 1e-300);
}

std::vector<ScanPoint> scan(const std::vector<double>& lambdas, const std::vector<double>& hs, const FgrConfig& base,
                            int threads)
{
    std::vector<ScanPoint> pts;
    for (double l : lambdas)
        for (double h : hs) {
            ScanPoint p;
            p.lambda = l;
            p.h = h;
            pts.push_back(p);
        }
    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (size_t i = next++; i < pts.size(); i = next++) {
            ScanPoint& p = pts[i];
            FgrConfig cfg = base;
            cfg.lambda = p.lambda;
            cfg.potential.h = p.h;
            try {
                const Grid g(cfg.half_width, cfg.n_points);
                const Nonlinearity f = Nonlinearity::cubic();
                const Soliton s = solve_trapped(cfg.lambda, cfg.potential, g, f);
                const DiscreteModes m = discrete_modes(assemble(s, f));
                const WindowReport w = select_window(cfg.lambda, m.epsilon, cfg.resolvent.edge_tol_rel);
                p.report.window = w;
                if (!m.sa_ok) {
                    p.reason = m.sa_message;
                    continue;
                }
                if (!w.valid) {
                    p.reason = "window: " + w.reason;
                    continue;
                }
                if (w.N != 2 && w.N != 3) {
                    p.reason = "window N = " + std::to_string(w.N) + " has no chain";
                    continue;
                }
                p.report = run_fgr(w.N, cfg).report;
                std::ostringstream id;
                id << "l" << p.lambda << "_h" << p.h;
                p.report.scan_id = id.str();
                p.evaluated = true;
            } catch (const std::exception& e) {
                p.reason = e.what();
            }
        }
    };
    const int nt = std::max(1, std::min<int>(threads, static_cast<int>(pts.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return pts;
}

std::string report_json(const FgrReport& r)
{
    nlohmann::ordered_json j;
    j["N"] = r.N;
    j["lambda"] = r.lambda;
    j["h"] = r.h;
    j["depth"] = r.depth;
    j["epsilon"] = r.epsilon;
    j["pairing"] = r.pairing;
    j["re_Z_route_A"] = r.route_A;
    j["re_Z_route_B"] = r.route_B;
    if (r.N == 2) j["re_Z_route_B_single_K3"] = r.route_B_other;
    j["route_rel_diff"] = r.route_rel_diff;
    j["error_bar"] = r.error_bar;
    j["sign_ok"] = r.sign_ok;
    j["strictly_negative"] = r.strictly_negative;
    j["window"] = {{"N", r.window.N},
                   {"upper_margin", r.window.upper_margin},
                   {"lower_margin", r.window.lower_margin},
                   {"near_edge", r.window.near_edge},
                   {"valid", r.window.valid}};
    j["extrapolation_error"] = r.extrapolation_error;
    j["cap_error"] = r.cap_error;
    j["method_agreement"] = r.method_agreement;
    j["methods_agree"] = r.methods_agree;
    j["flip_discrepancy"] = r.flip_discrepancy;
    j["flip_extrapolation_error"] = r.flip_extrapolation_error;
    j["flip_ok"] = r.flip_ok;
    j["trace_monotone"] = r.trace_monotone;
    j["junk_leak"] = r.junk_leak;
    if (r.N == 2) j["g1_shift"] = r.g1_shift;
    nlohmann::ordered_json ids = nlohmann::ordered_json::array();
    for (const auto& id : r.identities)
        ids.push_back({{"name", id.name}, {"residual", id.residual}});
    j["identities"] = ids;
    j["table"] = {{"conjugation", r.table.conjugation},
                  {"reality", r.table.reality},
                  {"admissibility", r.table.admissibility},
                  {"parity", r.table.parity},
                  {"vanishing", r.table.vanishing}};
    j["flagged"] = r.flagged;
    j["note"] = r.note;
    j["scan_id"] = r.scan_id;
    j["seconds"] = r.seconds;
    return j.dump(2);
}

std::string scan_csv(const std::vector<ScanPoint>& pts)
{
    std::ostringstream os;
    os.precision(12);
    os << "lambda,h,evaluated,N,epsilon,re_Z_A,re_Z_B,error_bar,sign_ok,flagged,reason\n";
    for (const auto& p : pts) {
        os << p.lambda << ',' << p.h << ',' << (p.evaluated ? 1 : 0) << ',' << p.report.window.N << ','
           << p.report.epsilon << ',' << p.report.route_A << ',' << p.report.route_B << ',' << p.report.error_bar << ','
           << (p.report.sign_ok ? 1 : 0) << ',' << (p.report.flagged ? 1 : 0) << ",\"" << p.reason << "\"\n";
    }
    return os.str();
}

}  // namespace tfgr
