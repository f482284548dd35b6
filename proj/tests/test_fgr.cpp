#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "trapfgr/fgr.hpp"

using namespace tfgr;

namespace {

FgrConfig point(double depth, double h)
{
    FgrConfig c;
    c.potential = {depth, h};
    return c;
}

}  // namespace

TEST_CASE("N = 2 report at the reference point")
{
    const FgrRun run = run_fgr(2, point(0.65, 0.36));
    const FgrReport& r = run.report;
    CHECK(r.N == 2);
    CHECK(r.window.valid);
    CHECK(r.window.N == 2);
    CHECK(r.route_A < 0.0);
    CHECK(r.strictly_negative);
    CHECK(r.sign_ok);
    CHECK(r.route_rel_diff <= 1e-6);
    CHECK(std::abs(r.route_A - r.route_B) <= r.error_bar);
    CHECK(r.methods_agree);
    CHECK(r.flip_ok);
    CHECK(r.junk_leak <= 1e-8);
    CHECK(r.g1_shift > 0.0);
    CHECK(2 * r.epsilon < r.lambda);
    CHECK(3 * r.epsilon > r.lambda);
    // the discarded K3 reading breaks the route agreement
    CHECK(std::abs(r.route_B_other - r.route_A) > 100 * r.error_bar);

    const auto j = nlohmann::json::parse(report_json(r));
    CHECK(j.at("N").get<int>() == 2);
    CHECK(j.at("window").at("valid").get<bool>());
}

TEST_CASE("N = 3 report")
{
    const FgrRun run = run_fgr(3, point(0.5, 0.25));
    const FgrReport& r = run.report;
    CHECK(r.N == 3);
    CHECK(r.route_A < 0.0);
    CHECK(r.sign_ok);
    CHECK(r.route_rel_diff <= 1e-5);
    CHECK(!r.identities.empty());
    for (const auto& id : r.identities) CHECK(id.residual <= 1e-6);
    double imag_shift = 0.0;
    const Resolvent res(run.sys, run.modes);
    CHECK(vector_junk_shift(res, ChainOptions{}, 7u, &imag_shift) <= 1e-8);
    CHECK(imag_shift > 1e-6);
}

TEST_CASE("window mismatch throws")
{
    CHECK_THROWS_AS(run_fgr(3, point(0.65, 0.36)), std::domain_error);
    CHECK_THROWS_AS(run_fgr(2, point(0.5, 0.25)), std::domain_error);
    try {
        run_fgr(3, point(0.65, 0.36));
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("window violation") != std::string::npos);
    }
}

TEST_CASE("mode normalization changes the coefficient by the expected power")
{
    FgrConfig c = point(0.65, 0.36);
    c.flip_check = false;
    const double base = run_fgr(2, c).report.route_A;
    c.mode_scale = 2.0;
    const double scaled = run_fgr(2, c).report.route_A;
    CHECK(scaled / base == doctest::Approx(16.0).epsilon(1e-6));
}

TEST_CASE("scan")
{
    FgrConfig base;
    base.flip_check = false;
    CHECK(scan({}, {0.3}, base).empty());
    CHECK(scan({1.0}, {}, base).empty());

    base.potential.depth = 0.5;
    const auto pts = scan({1.0}, {0.22, 0.25, 0.3, 0.34}, base, 2);
    REQUIRE(pts.size() == 4);
    int n2 = 0, n3 = 0;
    for (const auto& p : pts) {
        CHECK(p.lambda == 1.0);
        if (!p.evaluated) {
            CHECK(!p.reason.empty());
            continue;
        }
        CHECK(p.report.route_A < 0.0);
        n2 += p.report.N == 2;
        n3 += p.report.N == 3;
    }
    CHECK(n2 >= 1);
    CHECK(n3 >= 1);
    // N is non-increasing in h
    int last = 99;
    for (const auto& p : pts)
        if (p.evaluated) {
            CHECK(p.report.N <= last);
            last = p.report.N;
        }
    const std::string csv = scan_csv(pts);
    CHECK(std::count(csv.begin(), csv.end(), '\n') >= 5);
}
