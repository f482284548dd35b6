#include "trapfgr/config.hpp"

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace tfgr {

namespace {

template <class T>
void take(const nlohmann::json& j, const char* key, T& out)
{
    if (j.contains(key)) out = j.at(key).get<T>();
}

const nlohmann::json& section(const nlohmann::json& j, const char* key)
{
    static const nlohmann::json empty = nlohmann::json::object();
    return j.contains(key) ? j.at(key) : empty;
}

}  // namespace

FgrConfig RunConfig::fgr() const
{
    FgrConfig f;
    f.lambda = lambda;
    f.potential = potential;
    f.half_width = half_width;
    f.n_points = n_points;
    f.resolvent = resolvent;
    f.resolvent.edge_tol_rel = tol.edge;
    return f;
}

RunConfig config_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    RunConfig c;
    take(j, "lambda", c.lambda);
    take(section(j, "potential"), "depth", c.potential.depth);
    take(section(j, "potential"), "h", c.potential.h);
    take(section(j, "nonlinearity"), "name", c.nonlinearity);
    take(section(j, "grid"), "half_width", c.half_width);
    take(section(j, "grid"), "n_points", c.n_points);
    take(j, "nu", c.nu);
    take(j, "threads", c.threads);

    const auto& t = section(j, "tolerances");
    take(t, "newton", c.tol.newton);
    take(t, "frame", c.tol.frame);
    take(t, "mass", c.tol.mass);
    take(t, "identity", c.tol.identity);
    take(t, "admissibility", c.tol.admissibility);
    take(t, "parity", c.tol.parity);
    take(t, "route_n2", c.tol.route_n2);
    take(t, "route_n3", c.tol.route_n3);
    take(t, "chain_identity", c.tol.chain_identity);
    take(t, "junk", c.tol.junk);
    take(t, "edge", c.tol.edge);

    const auto& r = section(j, "resolvent");
    take(r, "eta_factors", c.resolvent.eta_factors);
    take(r, "reach_tol", c.resolvent.reach_tol);
    take(r, "cap_wavelengths", c.resolvent.cap_wavelengths);
    take(r, "cap_strength", c.resolvent.cap_strength);
    c.resolvent.edge_tol_rel = c.tol.edge;

    EvolutionConfig& e = c.evolution;
    const auto& d = section(j, "evolution");
    take(d, "lambda0", e.lambda0);
    if (d.contains("potential")) {
        take(d.at("potential"), "depth", e.potential.depth);
        take(d.at("potential"), "h", e.potential.h);
    }
    take(d, "z1", e.z1);
    take(d, "z2", e.z2);
    take(d, "gamma0", e.gamma0);
    take(d, "z_bound", e.z_bound);
    take(d, "half_width", e.half_width);
    take(d, "n_points", e.n_points);
    take(d, "dt", e.dt);
    take(d, "t_final", e.t_final);
    take(d, "output_every", e.output_every);
    take(d, "sponge_width", e.sponge_width);
    take(d, "sponge_strength", e.sponge_strength);
    take(d, "include_p", e.include_p);
    take(d, "branch_span", e.branch_span);
    take(d, "branch_nodes", e.branch_nodes);
    take(d, "refine", e.refine);
    take(d, "soliton_half_width", e.soliton_half_width);
    take(d, "fgr_half_width", e.fgr_half_width);
    take(d, "fgr_points", e.fgr_points);
    take(d, "window_lo", e.window_lo);
    take(d, "window_hi", e.window_hi);
    e.nonlinearity = c.nonlinearity;
    e.mass_tol = c.tol.mass;
    e.nu = c.nu;
    e.threads = c.threads;

    const auto& s = section(j, "scan");
    take(s, "lambdas", c.scan_lambdas);
    take(s, "hs", c.scan_hs);

    if (c.n_points < 5 || c.n_points % 2 == 0) throw std::invalid_argument("grid.n_points must be odd and >= 5");
    if (c.half_width <= 0.0) throw std::invalid_argument("grid.half_width must be positive");
    if (c.potential.h <= 0.0) throw std::invalid_argument("potential.h must be positive");
    Nonlinearity::by_name(c.nonlinearity);
    return c;
}

nlohmann::ordered_json config_to_json(const RunConfig& c)
{
    nlohmann::ordered_json j;
    j["lambda"] = c.lambda;
    j["potential"] = {{"depth", c.potential.depth}, {"h", c.potential.h}};
    j["nonlinearity"] = {{"name", c.nonlinearity}};
    j["grid"] = {{"half_width", c.half_width}, {"n_points", c.n_points}};
    j["nu"] = c.nu;
    j["threads"] = c.threads;
    j["tolerances"] = {{"newton", c.tol.newton},
                       {"frame", c.tol.frame},
                       {"mass", c.tol.mass},
                       {"identity", c.tol.identity},
                       {"admissibility", c.tol.admissibility},
                       {"parity", c.tol.parity},
                       {"route_n2", c.tol.route_n2},
                       {"route_n3", c.tol.route_n3},
                       {"chain_identity", c.tol.chain_identity},
                       {"junk", c.tol.junk},
                       {"edge", c.tol.edge}};
    j["resolvent"] = {{"eta_factors", c.resolvent.eta_factors},
                      {"reach_tol", c.resolvent.reach_tol},
                      {"cap_wavelengths", c.resolvent.cap_wavelengths},
                      {"cap_strength", c.resolvent.cap_strength}};
    const EvolutionConfig& e = c.evolution;
    j["evolution"] = {{"lambda0", e.lambda0},
                      {"potential", {{"depth", e.potential.depth}, {"h", e.potential.h}}},
                      {"z1", e.z1},
                      {"z2", e.z2},
                      {"gamma0", e.gamma0},
                      {"z_bound", e.z_bound},
                      {"half_width", e.half_width},
                      {"n_points", e.n_points},
                      {"dt", e.dt},
                      {"t_final", e.t_final},
                      {"output_every", e.output_every},
                      {"sponge_width", e.sponge_width},
                      {"sponge_strength", e.sponge_strength},
                      {"include_p", e.include_p},
                      {"branch_span", e.branch_span},
                      {"branch_nodes", e.branch_nodes},
                      {"refine", e.refine},
                      {"soliton_half_width", e.soliton_half_width},
                      {"fgr_half_width", e.fgr_half_width},
                      {"fgr_points", e.fgr_points},
                      {"window_lo", e.window_lo},
                      {"window_hi", e.window_hi}};
    j["scan"] = {{"lambdas", c.scan_lambdas}, {"hs", c.scan_hs}};
    return j;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config parse error: " + std::string(e.what()));
    }
    return config_from_json(j);
}

std::string code_version() { return "0.1.0"; }

std::string RunManifest::hash() const
{
    const std::string s = command + '\n' + config.dump() + '\n' + version;
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

nlohmann::ordered_json RunManifest::to_json() const
{
    nlohmann::ordered_json j;
    j["command"] = command;
    j["version"] = version;
    j["hash"] = hash();
    j["config"] = config;
    j["outputs"] = outputs;
    j["wall_seconds"] = wall_seconds;
    return j;
}

}  // namespace tfgr
