#pragma once

#include <functional>
#include <string>
#include <vector>

#include "trapfgr/linearization.hpp"

namespace tfgr {

struct ResolventOptions {
    std::vector<double> eta_factors{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};  // eta_j = factor * eps
    double reach_tol = 1e-10;       // decay of the damped outgoing wave across the padding
    double cap_wavelengths = 40.0;  // quartic ramp width in outgoing wavelengths
    double cap_strength = 2.0;      // ramp height in units of (k eps - lambda)
    double edge_tol_rel = 1e-3;
};

enum class Regime { below_threshold, embedded };

struct ResolventQuery {
    int k = 0;
    cplx shift;  // i k eps
    Regime regime = Regime::below_threshold;
    std::vector<double> eta_schedule;
};

struct ResolventAnswer {
    PairField value;              // Richardson limit on the base grid
    PairField value_lower_order;  // limit from the three smallest eta
    PairField cap_value;          // absorbing-potential solve
    std::vector<PairField> eta_fields;
    std::vector<double> eta_schedule;
    std::vector<cplx> eta_trace;  // probe functional per eta
    cplx probe_limit;
    cplx probe_cap;
    double extrapolation_error = 0.0;  // |probe(4pt) - probe(3pt)|
    double cap_error = 0.0;            // change of probe_cap under a wider ramp
    double method_agreement = 0.0;     // |probe_limit - probe_cap|
    bool trace_monotone = false;
    bool flagged = false;
    std::string note;
};

// Im<sigma1 x, rhs> is the default probe
using Probe = std::function<cplx(const PairField& x)>;

class Resolvent {
public:
    Resolvent(const LinearizedSystem& sys, const DiscreteModes& modes, ResolventOptions opt = {});

    ResolventQuery query(int k) const;
    const Projector& projector() const { return Pc_; }
    const LinearizedSystem& system() const { return sys_; }
    const DiscreteModes& modes() const { return modes_; }
    const ResolventOptions& options() const { return opt_; }
    double epsilon() const { return eps_; }

    // (L + i k eps)^{-1} P_c rhs, re-projected; k = 0 inverts L on the range of P_c
    PairField solve_regular(int k, const PairField& rhs) const;

    // limiting absorption (L + i k eps - 0)^{-1} P_c rhs on a padded lattice.
    // anticausal = true gives (L + i k eps + 0)^{-1}.
    ResolventAnswer solve_embedded(int k, const PairField& rhs, const Probe& probe = {},
                                   bool anticausal = false) const;

    // relative discrepancy of Im B(sigma1 x, rhs) between (L + i k eps - 0)^{-1} and
    // (L - i k eps + 0)^{-1}, B the bilinear pairing
    double conjugate_flip_check(int k, const PairField& rhs, double* extrapolation_error = nullptr,
                                double* absolute = nullptr) const;

    // one damped solve (L + shift + extra)^{-1} P_c rhs on a padded lattice
    PairField padded_solve(cplx shift, const PairField& rhs, int pad, const CVec& extra_tail) const;

private:
    LinearizedSystem sys_;
    DiscreteModes modes_;
    Projector Pc_;
    ResolventOptions opt_;
    double eps_;

    SymPenta padded_operator(const Grid& ge, bool minus) const;
    PairField cap_solve(int k, const PairField& f, double width_scale, bool anticausal) const;
};

// Neville extrapolation of samples (t_j, y_j) to t = 0
cplx extrapolate_to_zero(const std::vector<double>& t, const std::vector<cplx>& y);

}  // namespace tfgr
