#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "trapfgr/coefficients.hpp"

namespace tfgr {

// Periodic lattice x_j = -L + j dx, j = 0..n-1, n even; x = 0 sits at j = n/2.
struct PeriodicGrid {
    double L = 0.0;
    int n = 0;
    double dx = 0.0;
    RVec x, k;

    PeriodicGrid() = default;
    PeriodicGrid(double half_width, int n_points);
    double sum(const RVec& a) const { return dx * a.sum(); }
};

struct EvolutionConfig {
    double lambda0 = 9.0;
    PotentialSpec potential{5.85, 1.08};
    std::string nonlinearity = "cubic";
    double z1 = 0.05, z2 = 0.0, gamma0 = 0.0;
    double z_bound = 0.1;

    double half_width = 32.0;
    int n_points = 640;
    double dt = 0.0;           // 0: dx^2 / 4
    double t_final = 0.0;      // 0: window_hi * t_star
    double output_every = 2.0;
    double sponge_width = 16.0;
    double sponge_strength = 8.0;
    double mass_tol = 1e-8;
    bool include_p = true;     // quadratic p_k corrections in the frame

    // soliton branch used by the frame
    double branch_span = 0.06;  // relative half-range in lambda
    int branch_nodes = 17;
    int refine = 8;             // fine lattice spacing dx / refine
    double soliton_half_width = 16.0;

    // FGR coefficient for the reduced law
    double fgr_half_width = 40.0 / 3.0;
    int fgr_points = 4001;

    double window_lo = 2.5, window_hi = 25.0;  // fit window in units of t_star
    double nu = 2.0;
    int threads = 4;
    int batch = 256;  // snapshots per extraction pass
};

class SplitStep {
public:
    SplitStep(const PeriodicGrid& g, RVec V, Nonlinearity f, double dt, RVec sponge);
    ~SplitStep();
    SplitStep(const SplitStep&) = delete;
    SplitStep& operator=(const SplitStep&) = delete;

    void set_state(const CVec& psi);
    const CVec& state() const { return psi_; }
    void advance(long steps);

    double time() const { return t_; }
    double mass() const;
    double energy();
    double absorbed() const { return static_cast<double>(absorbed_); }

private:
    struct Plan;
    PeriodicGrid g_;
    RVec V_, sponge_;
    Nonlinearity f_;
    double dt_;
    double t_ = 0.0;
    long double absorbed_ = 0.0;
    CVec psi_;
    RVec kin_re_, kin_im_;
    std::vector<int> sponge_idx_;
    std::unique_ptr<Plan> plan_;

    void potential_step(double tau);
    void kinetic_step();
};

RVec sponge_profile(const PeriodicGrid& g, double width, double strength);

struct BranchPoint {
    double lambda = 0.0;
    RVec phi, phil, xi, eta;
    cplx P1 = 0.0, P2 = 0.0;  // P^(1)_{2,0}, P^(2)_{2,0}
    double epsilon = 0.0;
};

// ground states and modes on a lambda grid, sampled on a periodic lattice
class SolitonBranch {
public:
    SolitonBranch(const PeriodicGrid& g, const PotentialSpec& spec, const Nonlinearity& f, double lambda0,
                  double span, int nodes, int refine, double soliton_half_width, double mode_scale = 1.0);
    BranchPoint at(double lambda) const;
    double lambda_min() const { return nodes_.front().lambda; }
    double lambda_max() const { return nodes_.back().lambda; }
    const PeriodicGrid& grid() const { return g_; }
    const std::vector<BranchPoint>& nodes() const { return nodes_; }

private:
    PeriodicGrid g_;
    std::vector<BranchPoint> nodes_;
};

struct Frame {
    double lambda = 0.0, gamma = 0.0;
    cplx z = 0.0;
    CVec R;
    double residual = 0.0;  // max |pairing|
    int iterations = 0;
};

class FrameLoss : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// unknowns (lambda, gamma, z1, z2) with R orthogonal to phi, phi_lambda (Im part) and eta, xi
Frame extract_frame(const CVec& psi, const SolitonBranch& branch, double lambda_guess, bool include_p = true,
                    double tol = 1e-11, int max_iter = 30);

// e^{i gamma} (phi + z1 xi + i z2 eta + p1 phi_lambda + i p2 phi)
CVec frame_field(const BranchPoint& b, double gamma, cplx z, bool include_p = true);

struct DecayFit {
    double exponent = 0.0;
    double confidence = 0.0;  // 95% half-width
    double t_lo = 0.0, t_hi = 0.0;
    double decades = 0.0;
    int bins = 0;
    bool inconclusive = true;
    std::string reason;
    bool envelope_nonincreasing = false;
};

// slope of log|z| against log(T0 + t) on log-spaced bin averages inside [t_lo, t_hi]
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& absz, double T0, double t_lo, double t_hi,
                   int bins = 40);

// |z|(t) of (1/2) d/dt |z|^2 = Re Z |z|^{2N+2} from |z|(t0) = a0
double reduced_ode(double a0, double t0, double t, double reZ, int N);

struct TrajectoryRecord {
    std::vector<double> t, lambda, gamma, mass, energy, absorbed, r_weighted, frame_residual;
    std::vector<cplx> z;

    int N = 2;
    double epsilon = 0.0, reZ = 0.0, t_star = 0.0, T0 = 0.0, dt = 0.0;
    DecayFit fit;
    double lambda_inf = 0.0;
    double lambda_slope = 0.0;          // envelope slope of |lambda - lambda_inf|
    bool lambda_envelope_ok = false;
    double lambda_last_decade = 0.0;    // sup |lambda(t) - lambda(t_final)| over the last decade
    double ode_ratio_min = 0.0, ode_ratio_max = 0.0;
    double mass_drift = 0.0;            // |mass + absorbed - mass0| / mass0, worst
    double energy_drift = 0.0;          // relative, before anything reaches the sponge
    double max_frame_residual = 0.0;
    double seconds = 0.0;
};

class MassDrift : public std::runtime_error {
public:
    MassDrift(const std::string& what, TrajectoryRecord partial)
        : std::runtime_error(what), record(std::move(partial)) {}
    TrajectoryRecord record;
};

// FGR coefficient, branch, evolution, frame extraction and fits
TrajectoryRecord evolve(const EvolutionConfig& cfg);

std::string trajectory_csv(const TrajectoryRecord& r);
std::string trajectory_json(const TrajectoryRecord& r);
std::string plot_script(const std::string& csv_path);

}  // namespace tfgr
