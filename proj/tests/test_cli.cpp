#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include <json.hpp>

#include "trapfgr/config.hpp"

using namespace tfgr;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args, const fs::path& log)
{
    const std::string cmd = std::string(TRAPFGR_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("trapfgr_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("config parsing")
{
    const RunConfig d = config_from_json(nlohmann::json::object());
    CHECK(d.lambda == 1.0);
    CHECK(d.potential.depth == 0.65);
    CHECK(d.n_points == 4001);

    const auto j = nlohmann::json::parse(R"({"lambda": 2.0, "potential": {"h": 0.3},
        "grid": {"n_points": 2001}, "tolerances": {"mass": 1e-9}, "evolution": {"z1": 0.04}})");
    const RunConfig c = config_from_json(j);
    CHECK(c.lambda == 2.0);
    CHECK(c.potential.h == 0.3);
    CHECK(c.potential.depth == 0.65);
    CHECK(c.n_points == 2001);
    CHECK(c.evolution.mass_tol == 1e-9);
    CHECK(c.evolution.z1 == 0.04);

    // round trip
    const RunConfig r = config_from_json(nlohmann::json::parse(config_to_json(c).dump()));
    CHECK(config_to_json(r).dump() == config_to_json(c).dump());

    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"grid": {"n_points": 2000}})")), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"potential": {"h": -1}})")), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"nonlinearity": {"name": "quintic?"}})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), std::invalid_argument);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), std::invalid_argument);
}

TEST_CASE("manifest hash")
{
    RunManifest a;
    a.command = "fgr";
    a.config = config_to_json(RunConfig{});
    a.version = code_version();
    RunManifest b = a;
    b.wall_seconds = 12.0;
    b.outputs = {"x"};
    CHECK(a.hash() == b.hash());
    CHECK(a.hash().size() == 16);
    b.command = "soliton";
    CHECK(a.hash() != b.hash());
    const auto j = a.to_json();
    CHECK(j.at("hash").get<std::string>() == a.hash());
}

TEST_CASE("command line exit codes")
{
    const fs::path dir = scratch("codes");
    CHECK(run("", dir / "none.log") == 2);
    CHECK(run("soliton --bogus", dir / "bogus.log") == 2);
    CHECK(run("nosuchcommand", dir / "cmd.log") == 2);
    CHECK(run("--out " + dir.string() + " fgr --N 3", dir / "fgr3.log") == 1);
    const std::string err = slurp(dir / "fgr3.log");
    CHECK(err.find("window violation") != std::string::npos);
    CHECK(nlohmann::json::parse(err).at("command") == "fgr");
    CHECK(run("--config /nonexistent.json soliton", dir / "cfg.log") == 1);
}

TEST_CASE("soliton command output is reproducible")
{
    const fs::path a = scratch("sol_a"), b = scratch("sol_b");
    REQUIRE(run("--out " + a.string() + " soliton --n 1001 --L 20", a / "log") == 0);
    REQUIRE(run("--out " + b.string() + " soliton --n 1001 --L 20", b / "log") == 0);
    for (const char* f : {"soliton.json", "soliton.csv"}) {
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    const auto j = nlohmann::json::parse(slurp(a / "soliton.json"));
    const auto m = nlohmann::json::parse(slurp(a / "soliton_manifest.json"));
    CHECK(j.at("manifest_hash") == m.at("hash"));
    CHECK(!j.contains("seconds"));
    CHECK(j.at("residual").get<double>() <= 1e-10);
    CHECK(slurp(a / "soliton.csv").rfind("# manifest " + m.at("hash").get<std::string>(), 0) == 0);
}
