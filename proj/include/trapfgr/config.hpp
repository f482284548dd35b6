#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "trapfgr/dynamics.hpp"
#include "trapfgr/fgr.hpp"

namespace tfgr {

// Every numerical threshold used by the command-line pipelines.
struct Tolerances {
    double newton = 1e-10;         // soliton residual
    double frame = 1e-11;          // frame-extraction pairings
    double mass = 1e-8;            // relative mass drift
    double identity = 1e-8;        // structural identities
    double admissibility = 1e-9;
    double parity = 1e-10;
    double route_n2 = 1e-6;
    double route_n3 = 1e-5;
    double chain_identity = 1e-6;
    double junk = 1e-8;
    double edge = 1e-3;            // |N eps - lambda| / lambda
};

struct RunConfig {
    double lambda = 1.0;
    PotentialSpec potential{0.65, 0.36};
    std::string nonlinearity = "cubic";
    double half_width = 40.0;
    int n_points = 4001;
    double nu = 2.0;
    int threads = 4;
    Tolerances tol;
    ResolventOptions resolvent;
    EvolutionConfig evolution;

    // fgr-scan
    std::vector<double> scan_lambdas{1.0};
    std::vector<double> scan_hs{0.3, 0.33, 0.36};

    FgrConfig fgr() const;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const RunConfig& c);
RunConfig load_config(const std::string& path);

struct RunManifest {
    std::string command;
    nlohmann::ordered_json config;
    std::string version;
    std::vector<std::string> outputs;
    double wall_seconds = 0.0;

    // FNV-1a over command, config dump and version
    std::string hash() const;
    nlohmann::ordered_json to_json() const;
};

std::string code_version();

}  // namespace tfgr
