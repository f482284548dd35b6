#pragma once

#include <string>
#include <vector>

#include "trapfgr/soliton.hpp"

namespace tfgr {

struct LinearizedSystem {
    Grid grid;
    double lambda = 0.0;
    double h = 0.0;
    PotentialSpec potential;
    Nonlinearity f;
    RVec V;
    RVec phi;
    RVec phi_lambda;
    double delta_prime = 0.0;
    SymPenta Lm, Lp;

    // L(u1, u2) = (L_- u2, -L_+ u1)
    PairField apply(const PairField& u) const;
    // L^T, the real transpose (adjoint for real L)
    PairField apply_adjoint(const PairField& u) const;
    // ess_gap edge
    double gap_edge() const { return lambda; }
};

LinearizedSystem assemble(const Soliton& s, const Nonlinearity& f);

struct DiscreteModes {
    double epsilon = 0.0;
    double epsilon_alt = 0.0;  // from the L_+ L_- ordering
    RVec xi, eta;
    double pairing = 0.0;      // <xi, eta>
    double second_odd = 0.0;   // next odd eigenvalue of L_- L_+ (squared frequency)
    bool sa_ok = false;
    std::string sa_message;
    double overlap = 0.0;      // |<xi, phi_x>| / (|xi| |phi_x|)
};

// Throws if there is no odd eigenvalue of L_- L_+ below lambda^2.
DiscreteModes discrete_modes(const LinearizedSystem& sys);

// Rescale (xi, eta) -> (c xi, c eta).
DiscreteModes scaled_modes(const DiscreteModes& m, double c);

// Continuous-spectrum projector, complementary to (0, phi), (phi_lambda, 0),
// (xi, 0) and (0, eta) through bilinear pairings.
class Projector {
public:
    Projector(const LinearizedSystem& sys, const DiscreteModes& modes);
    PairField apply(const PairField& u) const;
    const Grid& grid() const { return grid_; }

private:
    Grid grid_;
    RVec phi_, phil_, xi_, eta_;
    Eigen::Matrix2d A1_, A2_;
};

struct ResonanceDiagnostic {
    std::vector<double> eta0;
    std::vector<double> sigma_min;
    double value = 0.0;  // min over eta0
};

// smallest singular value of (L - i lambda + eta0) for a few eta0
ResonanceDiagnostic resonance_diagnostic(const LinearizedSystem& sys, const std::vector<double>& eta0);

}  // namespace tfgr
