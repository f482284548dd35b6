#pragma once

#include <string>
#include <vector>

#include "trapfgr/coefficients.hpp"

namespace tfgr {

struct FgrConfig {
    double lambda = 1.0;
    PotentialSpec potential;
    double half_width = 40.0;
    int n_points = 4001;
    ResolventOptions resolvent;
    ChainOptions chain;
    bool flip_check = true;
    double mode_scale = 1.0;  // (xi, eta) -> c (xi, eta)
};

struct FgrReport {
    int N = 0;
    double lambda = 0.0, h = 0.0, depth = 0.0, epsilon = 0.0, pairing = 0.0;
    double route_A = 0.0;        // quadratic form
    double route_B = 0.0;        // D-sum (N = 2) or E-sum (N = 3)
    double route_B_other = 0.0;  // N = 2, discarded K3 reading
    double route_rel_diff = 0.0;
    double error_bar = 0.0;
    bool sign_ok = false;
    bool strictly_negative = false;
    WindowReport window;
    std::string scan_id;

    double extrapolation_error = 0.0;  // of the probe, absolute
    double cap_error = 0.0;
    double method_agreement = 0.0;     // |probe(eta limit) - probe(CAP)|
    bool methods_agree = false;
    double flip_discrepancy = -1.0;    // absolute; negative if not run
    double flip_extrapolation_error = 0.0;
    bool flip_ok = true;
    bool trace_monotone = false;

    double junk_leak = 0.0;    // max |Re coefficient| of tagged constants, scaled like the output
    double g1_shift = 0.0;     // N = 2: |Re D3 with G1 - Re D3 without G1| / |route_B|
    std::vector<IdentityCheck> identities;
    TableCheck table;
    bool flagged = false;
    std::string note;
    double seconds = 0.0;
};

struct FgrRun {
    Soliton soliton;
    LinearizedSystem sys;
    DiscreteModes modes;
    CoefficientTable table;
    FgrReport report;
};

// builds soliton, modes and the chain for the requested N; throws std::domain_error
// if the window does not match
FgrRun run_fgr(int N, const FgrConfig& cfg);

FgrReport fgr_n2(const Resolvent& res, const CoefficientTable& table, const AuxBundleN2& bundle, bool flip_check = true);
FgrReport fgr_n3(const Resolvent& res, const CoefficientTable& table, const AuxBundleN3& bundle, bool flip_check = true);

// N = 3: relative Re route_B shift caused by adding fields u to N_{4,1} and N_{4,2} with i u
// admissible; imag_shift receives the (nonzero) shift of the imaginary part
double vector_junk_shift(const Resolvent& res, const ChainOptions& base, unsigned seed, double* imag_shift = nullptr);

struct ScanPoint {
    double lambda = 0.0, h = 0.0;
    bool evaluated = false;
    std::string reason;  // why the point was excluded
    FgrReport report;
};

// all (lambda, h) pairs; N taken from the window; failures are isolated
std::vector<ScanPoint> scan(const std::vector<double>& lambdas, const std::vector<double>& hs, const FgrConfig& base,
                            int threads = 1);

std::string report_json(const FgrReport& r);
std::string scan_csv(const std::vector<ScanPoint>& pts);

}  // namespace tfgr
