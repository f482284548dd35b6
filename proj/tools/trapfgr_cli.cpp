#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "acceptance_suite.hpp"
#include "trapfgr/config.hpp"

using namespace tfgr;
using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct Session {
    RunConfig cfg;
    RunManifest manifest;
    fs::path out_dir;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    void write(const std::string& name, const std::string& body)
    {
        fs::create_directories(out_dir);
        const fs::path p = out_dir / name;
        std::ofstream(p) << body;
        manifest.outputs.push_back(p.string());
    }

    void write_json(const std::string& name, ojson j)
    {
        j["manifest_hash"] = manifest.hash();
        write(name, j.dump(2) + "\n");
    }

    void write_csv(const std::string& name, const std::string& csv)
    {
        write(name, "# manifest " + manifest.hash() + "\n" + csv);
    }

    void finish()
    {
        manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        fs::create_directories(out_dir);
        std::ofstream(out_dir / (manifest.command + "_manifest.json")) << manifest.to_json().dump(2) << "\n";
    }
};

ojson strip_timing(ojson j)
{
    j.erase("seconds");
    return j;
}

ojson identity_json(const std::vector<IdentityCheck>& v)
{
    ojson a = ojson::array();
    for (const auto& c : v)
        a.push_back({{"name", c.name},
                     {"lhs", {c.lhs.real(), c.lhs.imag()}},
                     {"rhs", {c.rhs.real(), c.rhs.imag()}},
                     {"real_part_only", c.real_part_only},
                     {"residual", c.residual}});
    return a;
}

struct Prepared {
    Soliton sol;
    LinearizedSystem sys;
    DiscreteModes modes;
};

Prepared prepare(const RunConfig& c)
{
    const Grid g(c.half_width, c.n_points);
    const Nonlinearity f = Nonlinearity::by_name(c.nonlinearity);
    Prepared p;
    p.sol = solve_trapped(c.lambda, c.potential, g, f);
    p.sys = assemble(p.sol, f);
    p.modes = discrete_modes(p.sys);
    return p;
}

void cmd_soliton(Session& s, bool free)
{
    const Grid g(s.cfg.half_width, s.cfg.n_points);
    const Nonlinearity f = Nonlinearity::by_name(s.cfg.nonlinearity);
    const Soliton sol = free ? solve_free(s.cfg.lambda, g, f) : solve_trapped(s.cfg.lambda, s.cfg.potential, g, f);
    ojson j;
    j["lambda"] = sol.lambda;
    j["h"] = free ? 0.0 : s.cfg.potential.h;
    j["free"] = free;
    j["residual"] = sol.residual_norm;
    j["mass"] = sol.mass;
    j["delta_prime"] = sol.delta_prime;
    j["newton_iterations"] = sol.newton_iterations;
    j["phi_at_origin"] = sol.profile[g.center()];
    s.write_json("soliton.json", j);
    s.write_csv("soliton.csv", field_csv(g, to_complex(sol.profile)));
    std::cout << j.dump(2) << "\n";
}

void cmd_spectrum(Session& s)
{
    const Prepared p = prepare(s.cfg);
    const Grid& g = p.sys.grid;
    const WindowReport w = select_window(s.cfg.lambda, p.modes.epsilon, s.cfg.tol.edge);
    const PairField xi{to_complex(p.modes.xi), CVec::Zero(g.size())};
    const Projector P(p.sys, p.modes);
    const PairField u{to_complex(RVec(p.sys.phi.array() * g.x().array().cos())),
                      to_complex(RVec(p.sys.phi.array() * g.x().array().sin()))};
    const PairField Pu = P.apply(u);
    ojson j;
    j["epsilon"] = p.modes.epsilon;
    j["epsilon_alt"] = p.modes.epsilon_alt;
    j["pairing"] = p.modes.pairing;
    j["second_odd"] = p.modes.second_odd;
    j["sa_check"] = p.modes.sa_ok;
    j["sa_message"] = p.modes.sa_message;
    const ResonanceDiagnostic rd = resonance_diagnostic(p.sys, {1e-2, 1e-3, 1e-4});
    j["sb_diagnostic"] = rd.value;
    j["sb_sigma_min"] = rd.sigma_min;
    j["window_N"] = w.N;
    j["window_valid"] = w.valid;
    j["L_minus_phi"] = l2_norm(g, p.sys.Lm.apply(p.sys.phi)) / l2_norm(g, p.sys.phi);
    j["L_plus_phi_lambda"] = l2_norm(g, RVec(p.sys.Lp.apply(p.sys.phi_lambda) + p.sys.phi)) / l2_norm(g, p.sys.phi);
    j["L_minus_eta"] = l2_norm(g, RVec(p.sys.Lm.apply(p.modes.eta) - p.modes.epsilon * p.modes.xi)) /
                       (p.modes.epsilon * l2_norm(g, p.modes.xi));
    j["L_plus_xi"] = l2_norm(g, RVec(p.sys.Lp.apply(p.modes.xi) - p.modes.epsilon * p.modes.eta)) /
                     (p.modes.epsilon * l2_norm(g, p.modes.eta));
    j["Pc_idempotence"] = l2_norm(g, P.apply(Pu) - Pu) / l2_norm(g, Pu);
    j["Pc_kills_xi"] = l2_norm(g, P.apply(xi)) / l2_norm(g, xi);
    s.write_json("spectrum.json", j);
    s.write_csv("modes.csv", pair_csv(g, {to_complex(p.modes.xi), to_complex(p.modes.eta)}));
    std::cout << j.dump(2) << "\n";
}

void cmd_resolvent(Session& s, int k)
{
    const Prepared p = prepare(s.cfg);
    const Resolvent res(p.sys, p.modes, s.cfg.resolvent);
    const CoefficientTable T = chain_order2(res);
    const PairField& rhs = T.Nvec.at({2, 0});
    const ResolventQuery q = res.query(k);
    ojson j;
    j["k"] = k;
    j["epsilon"] = res.epsilon();
    j["regime"] = q.regime == Regime::embedded ? "embedded" : "below_threshold";
    PairField sol;
    if (q.regime == Regime::embedded) {
        const ResolventAnswer a = res.solve_embedded(k, rhs);
        sol = a.value;
        j["probe_limit"] = {a.probe_limit.real(), a.probe_limit.imag()};
        j["probe_cap"] = {a.probe_cap.real(), a.probe_cap.imag()};
        j["extrapolation_error"] = a.extrapolation_error;
        j["cap_error"] = a.cap_error;
        j["method_agreement"] = a.method_agreement;
        j["trace_monotone"] = a.trace_monotone;
        j["flagged"] = a.flagged;
        j["note"] = a.note;
    } else {
        sol = res.solve_regular(k, rhs);
    }
    const PairField back = res.system().apply(sol) + sol * cplx(0.0, k * res.epsilon());
    const PairField target = res.projector().apply(rhs);
    j["rhs"] = "N(2,0)";
    j["equation_residual"] = l2_norm(p.sys.grid, back - target) / l2_norm(p.sys.grid, target);
    s.write_json("resolvent.json", j);
    s.write_csv("resolvent.csv", pair_csv(p.sys.grid, sol));
    std::cout << j.dump(2) << "\n";
}

std::string entry_name(int m, int n) { return "(" + std::to_string(m) + "," + std::to_string(n) + ")"; }

void cmd_coefficients(Session& s, int order)
{
    if (order < 2 || order > 4) throw std::invalid_argument("--order must be 2, 3 or 4");
    const Prepared p = prepare(s.cfg);
    const Resolvent res(p.sys, p.modes, s.cfg.resolvent);
    CoefficientTable T = chain_order2(res);
    const int N = order == 4 ? 3 : 2;
    ojson j;
    j["order"] = order;
    j["N"] = N;
    j["epsilon"] = res.epsilon();
    if (order == 3) {
        const AuxBundleN2 B = chain_order3_N2(res, T);
        j["D"] = {{"D1", {B.D1.value.real(), B.D1.value.imag()}},
                  {"D2", {B.D2.real(), B.D2.imag()}},
                  {"D3", {B.D3.real(), B.D3.imag()}},
                  {"D4", {B.D4.real(), B.D4.imag()}}};
        j["quadratic_form"] = B.form;
    } else if (order == 4) {
        const AuxBundleN3 B = chain_order4_N3(res, T);
        j["E"] = {{"E1", {B.E1.value.real(), B.E1.value.imag()}},
                  {"E2", {B.E2.value.real(), B.E2.value.imag()}},
                  {"E3", {B.E3.value.real(), B.E3.value.imag()}}};
        j["quadratic_form"] = B.form;
        j["identities"] = identity_json(B.identities);
    }
    ojson P = ojson::array();
    for (const auto& [key, v] : T.P) {
        const auto [k, m, n] = key;
        const auto src = T.provenance.find("P" + std::to_string(k) + entry_name(m, n));
        P.push_back({{"k", k}, {"m", m}, {"n", n}, {"re", v.value.real()}, {"im", v.value.imag()},
                     {"source", src == T.provenance.end() ? "" : src->second}});
    }
    j["P"] = P;
    ojson Z = ojson::array();
    for (const auto& [key, z] : T.Z) Z.push_back({{"m", key.first}, {"n", key.second}, {"re", z.real()}, {"im", z.imag()}});
    j["Z"] = Z;
    ojson fields = ojson::array();
    for (const auto& [key, f] : T.R) {
        const std::string tag = std::to_string(key.first) + "_" + std::to_string(key.second);
        s.write_csv("R_" + tag + ".csv", pair_csv(p.sys.grid, f));
        const auto nv = T.Nvec.find(key);
        if (nv != T.Nvec.end()) s.write_csv("N_" + tag + ".csv", pair_csv(p.sys.grid, nv->second));
        const auto ad = T.admissible.find(key);
        fields.push_back({{"m", key.first},
                          {"n", key.second},
                          {"admissible", ad != T.admissible.end() && ad->second},
                          {"source", T.provenance.count("R" + entry_name(key.first, key.second))
                                         ? T.provenance.at("R" + entry_name(key.first, key.second))
                                         : ""}});
    }
    j["fields"] = fields;
    const TableCheck c = check_table(res, T, N);
    j["checks"] = {{"conjugation", c.conjugation},
                   {"reality", c.reality},
                   {"admissibility", c.admissibility},
                   {"parity", c.parity},
                   {"vanishing", c.vanishing}};
    s.write_json("coefficients.json", j);
    std::cout << j.dump(2) << "\n";
}

void cmd_fgr(Session& s, int N)
{
    const FgrRun run = run_fgr(N, s.cfg.fgr());
    ojson j = strip_timing(ojson::parse(report_json(run.report)));
    s.write_json("fgr.json", j);
    std::cout << j.dump(2) << "\n";
}

std::string gnuplot_scan(const std::string& csv)
{
    return "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'h'\nset ylabel 'Re Z'\n"
           "plot '" + csv + "' using 2:7 with linespoints title 'Re Z (D/E sum)'\n";
}

void cmd_scan(Session& s)
{
    const auto pts = scan(s.cfg.scan_lambdas, s.cfg.scan_hs, s.cfg.fgr(), s.cfg.threads);
    s.write_csv("fgr_scan.csv", scan_csv(pts));
    s.write("fgr_scan.gp", gnuplot_scan((s.out_dir / "fgr_scan.csv").string()));
    int ok = 0;
    for (const auto& p : pts) ok += p.evaluated;
    std::cout << "evaluated " << ok << " of " << pts.size() << " points; table in "
              << (s.out_dir / "fgr_scan.csv").string() << "\n";
}

void cmd_evolve(Session& s)
{
    const TrajectoryRecord r = evolve(s.cfg.evolution);
    s.write_csv("trajectory.csv", trajectory_csv(r));
    s.write_json("trajectory.json", strip_timing(ojson::parse(trajectory_json(r))));
    s.write("trajectory_plot.py", plot_script((s.out_dir / "trajectory.csv").string()));
    std::cout << trajectory_json(r) << "\n";
}

int cmd_verify(Session& s, bool quick)
{
    const auto results = acceptance::run_all(quick, std::cout);
    ojson j = ojson::array();
    bool all = true;
    for (const auto& r : results) {
        j.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        all = all && r.pass;
    }
    s.write_json("verify.json", {{"quick", quick}, {"all_pass", all}, {"criteria", j}});
    std::cout << (all ? "ALL PASS" : "FAILURES PRESENT") << "\n";
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"trapped-soliton relaxation: ground states, spectra, FGR coefficients and dynamics"};
    app.require_subcommand(1);
    app.fallthrough();
    // -h is taken by the potential scale
    app.set_help_flag("--help", "print this help message and exit");
    std::string config_path, out_dir = "out";
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", out_dir, "output directory");

    double lambda = 0.0, depth = 0.0, h = 0.0, half_width = 0.0;
    int n_points = 0, threads = 0;
    auto add_model_flags = [&](CLI::App* sc) {
        sc->add_option("--lambda", lambda, "soliton frequency");
        sc->add_option("--depth", depth, "potential depth V0");
        sc->add_option("--h", h, "potential scale");
        sc->add_option("--L", half_width, "grid half width");
        sc->add_option("--n", n_points, "grid points (odd)");
    };

    auto* sol = app.add_subcommand("soliton", "ground state on the lattice");
    auto* spec = app.add_subcommand("spectrum", "internal mode, window and structural identities");
    auto* resv = app.add_subcommand("resolvent", "resolvent applied to the quadratic forcing");
    auto* coef = app.add_subcommand("coefficients", "normal-form coefficient table");
    auto* fgr = app.add_subcommand("fgr", "FGR coefficient by both routes");
    auto* fscan = app.add_subcommand("fgr-scan", "FGR coefficient over a (lambda, h) grid");
    auto* evo = app.add_subcommand("evolve", "time integration and decay fit");
    auto* ver = app.add_subcommand("verify", "acceptance suite");
    for (auto* sc : {sol, spec, resv, coef, fgr}) add_model_flags(sc);
    bool free = false;
    sol->add_flag("--free", free, "translation-invariant problem, V = 0");
    int k = 2, N = 2;
    resv->add_option("--k", k, "frequency multiple k of eps");
    int order = 0;
    coef->add_option("--order", order, "chain order (2, 3 or 4)");
    coef->add_option("--N", N, "window order (2 or 3), same as --order N+1");
    fgr->add_option("--N", N, "window order (2 or 3)");
    fscan->add_option("--threads", threads, "worker threads");
    bool quick = false;
    ver->add_flag("--quick", quick, "skip the long time integration");

    if (argc <= 1) {
        std::cerr << app.help();
        return 2;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return 2;
    }

    Session s;
    s.out_dir = out_dir;
    std::string command;
    try {
        s.cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (lambda > 0.0) s.cfg.lambda = lambda;
        if (depth > 0.0) s.cfg.potential.depth = depth;
        if (h > 0.0) s.cfg.potential.h = h;
        if (half_width > 0.0) s.cfg.half_width = half_width;
        if (n_points > 0) s.cfg.n_points = n_points;
        if (threads > 0) s.cfg.threads = threads;
        command = app.get_subcommands().front()->get_name();
        s.manifest.command = command;
        s.manifest.config = config_to_json(s.cfg);
        s.manifest.version = code_version();

        int rc = 0;
        if (command == "soliton") cmd_soliton(s, free);
        else if (command == "spectrum") cmd_spectrum(s);
        else if (command == "resolvent") cmd_resolvent(s, k);
        else if (command == "coefficients") cmd_coefficients(s, order > 0 ? order : N + 1);
        else if (command == "fgr") cmd_fgr(s, N);
        else if (command == "fgr-scan") cmd_scan(s);
        else if (command == "evolve") cmd_evolve(s);
        else if (command == "verify") rc = cmd_verify(s, quick);
        s.finish();
        return rc;
    } catch (const std::exception& e) {
        ojson d;
        d["command"] = command;
        d["error"] = e.what();
        std::cout << d.dump(2) << "\n";
        return 1;
    }
}
