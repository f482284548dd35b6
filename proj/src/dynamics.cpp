#include "trapfgr/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <fftw3.h>
#include <json.hpp>

#include "trapfgr/fgr.hpp"

namespace tfgr {

PeriodicGrid::PeriodicGrid(double half_width, int n_points) : L(half_width), n(n_points)
{
    if (n < 8 || n % 2 != 0) throw std::invalid_argument("periodic lattice needs an even number of nodes >= 8");
    if (L <= 0.0) throw std::invalid_argument("periodic lattice needs L > 0");
    dx = 2.0 * L / n;
    x.resize(n);
    k.resize(n);
    const double dk = M_PI / L;
    for (int j = 0; j < n; ++j) {
        x[j] = -L + j * dx;
        k[j] = (j < n / 2 ? j : j - n) * dk;
    }
}

RVec sponge_profile(const PeriodicGrid& g, double width, double strength)
{
    RVec s = RVec::Zero(g.n);
    if (width <= 0.0) return s;
    const double x0 = g.L - width;
    for (int j = 0; j < g.n; ++j) {
        const double r = (std::abs(g.x[j]) - x0) / width;
        if (r > 0.0) s[j] = strength * r * r;
    }
    return s;
}

struct SplitStep::Plan {
    fftw_plan fwd = nullptr, bwd = nullptr, probe = nullptr;
    CVec scratch;
    ~Plan()
    {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (probe) fftw_destroy_plan(probe);
    }
};

namespace {
fftw_complex* as_fftw(CVec& v) { return reinterpret_cast<fftw_complex*>(v.data()); }
}  // namespace

SplitStep::SplitStep(const PeriodicGrid& g, RVec V, Nonlinearity f, double dt, RVec sponge)
    : g_(g), V_(std::move(V)), sponge_(std::move(sponge)), f_(std::move(f)), dt_(dt), plan_(std::make_unique<Plan>())
{
    if (dt <= 0.0) throw std::invalid_argument("time step must be positive");
    if (V_.size() != g.n || sponge_.size() != g.n) throw std::invalid_argument("potential/sponge size mismatch");
    psi_ = CVec::Zero(g.n);
    plan_->scratch = CVec::Zero(g.n);
    plan_->fwd = fftw_plan_dft_1d(g.n, as_fftw(psi_), as_fftw(psi_), FFTW_FORWARD, FFTW_MEASURE);
    plan_->bwd = fftw_plan_dft_1d(g.n, as_fftw(psi_), as_fftw(psi_), FFTW_BACKWARD, FFTW_MEASURE);
    plan_->probe = fftw_plan_dft_1d(g.n, as_fftw(psi_), as_fftw(plan_->scratch), FFTW_FORWARD, FFTW_ESTIMATE);
    kin_re_.resize(g.n);
    kin_im_.resize(g.n);
    for (int j = 0; j < g.n; ++j) {
        const double a = -g.k[j] * g.k[j] * dt;
        kin_re_[j] = std::cos(a) / g.n;
        kin_im_[j] = std::sin(a) / g.n;
    }
    for (int j = 0; j < g.n; ++j)
        if (sponge_[j] > 0.0) sponge_idx_.push_back(j);
}

SplitStep::~SplitStep() = default;

void SplitStep::set_state(const CVec& psi)
{
    if (psi.size() != g_.n) throw std::invalid_argument("state size mismatch");
    psi_ = psi;  // same buffer, plans stay valid
    t_ = 0.0;
    absorbed_ = 0.0;
}

void SplitStep::potential_step(double tau)
{
    cplx* p = psi_.data();
    const bool cubic = f_.is_cubic(), linear = f_.name == "none";
    for (int j = 0; j < g_.n; ++j) {
        const double s = std::norm(p[j]);
        const double fv = cubic ? s : (linear ? 0.0 : f_.f(s));
        const double a = -(V_[j] - fv) * tau;
        p[j] *= cplx(std::cos(a), std::sin(a));
    }
    long double lost = 0.0;
    for (int j : sponge_idx_) {
        const double d = std::exp(-sponge_[j] * tau);
        const double s = std::norm(p[j]);
        lost += s * (1.0 - d * d);
        p[j] *= d;
    }
    absorbed_ += lost * g_.dx;
}

void SplitStep::kinetic_step()
{
    fftw_execute(plan_->fwd);
    cplx* p = psi_.data();
    for (int j = 0; j < g_.n; ++j) p[j] *= cplx(kin_re_[j], kin_im_[j]);
    fftw_execute(plan_->bwd);
}

void SplitStep::advance(long steps)
{
    if (steps <= 0) return;
    potential_step(0.5 * dt_);
    for (long i = 0; i < steps; ++i) {
        kinetic_step();
        potential_step(i + 1 < steps ? dt_ : 0.5 * dt_);
    }
    t_ += steps * dt_;
}

double SplitStep::mass() const { return g_.dx * psi_.squaredNorm(); }

double SplitStep::energy()
{
    fftw_execute(plan_->probe);
    double kin = 0.0;
    for (int j = 0; j < g_.n; ++j) kin += g_.k[j] * g_.k[j] * std::norm(plan_->scratch[j]);
    kin *= g_.dx / g_.n;
    double pot = 0.0;
    for (int j = 0; j < g_.n; ++j) {
        const double s = std::norm(psi_[j]);
        pot += V_[j] * s - f_.F(s);
    }
    return kin + g_.dx * pot;
}

// ---------------------------------------------------------------- branch

SolitonBranch::SolitonBranch(const PeriodicGrid& g, const PotentialSpec& spec, const Nonlinearity& f, double lambda0,
                             double span, int nodes, int refine, double soliton_half_width, double mode_scale)
    : g_(g)
{
    if (nodes < 4) throw std::invalid_argument("branch needs at least 4 nodes");
    const int m = static_cast<int>(std::lround(soliton_half_width / g.dx));
    if (m >= g.n / 2) throw std::invalid_argument("soliton window exceeds the periodic lattice");
    const Grid fine(m * g.dx, 2 * m * refine + 1);
    RVec seed;
    for (int i = 0; i < nodes; ++i) {
        const double lam = lambda0 * (1.0 - span + 2.0 * span * i / (nodes - 1));
        Soliton s = seed.size() ? solve_from_seed(lam, spec, fine, f, seed) : solve_trapped(lam, spec, fine, f);
        seed = s.profile;
        const LinearizedSystem sys = assemble(s, f);
        DiscreteModes md = discrete_modes(sys);
        if (mode_scale != 1.0) md = scaled_modes(md, mode_scale);
        const Resolvent res(sys, md);
        const CoefficientTable T = chain_order2(res);

        BranchPoint b;
        b.lambda = lam;
        b.epsilon = md.epsilon;
        b.P1 = T.p(1, 2, 0);
        b.P2 = T.p(2, 2, 0);
        auto sample = [&](const RVec& a) {
            RVec out = RVec::Zero(g.n);
            for (int j = g.n / 2 - m; j <= g.n / 2 + m; ++j) out[j] = a[(j - g.n / 2 + m) * refine];
            return out;
        };
        b.phi = sample(s.profile);
        b.phil = sample(s.d_lambda);
        b.xi = sample(md.xi);
        b.eta = sample(md.eta);
        nodes_.push_back(std::move(b));
    }
}

BranchPoint SolitonBranch::at(double lambda) const
{
    const int M = static_cast<int>(nodes_.size());
    const double l0 = nodes_.front().lambda, step = (nodes_.back().lambda - l0) / (M - 1);
    if (lambda < l0 - 1e-12 * l0 || lambda > nodes_.back().lambda + 1e-12 * l0)
        throw FrameLoss("lambda = " + std::to_string(lambda) + " left the precomputed branch");
    const double u = (lambda - l0) / step;
    const int i0 = std::clamp(static_cast<int>(std::floor(u)) - 1, 0, M - 4);
    double w[4];
    for (int a = 0; a < 4; ++a) {
        w[a] = 1.0;
        for (int b = 0; b < 4; ++b)
            if (b != a) w[a] *= (u - (i0 + b)) / double(a - b);
    }
    BranchPoint r;
    r.lambda = lambda;
    r.phi = RVec::Zero(g_.n);
    r.phil = r.phi;
    r.xi = r.phi;
    r.eta = r.phi;
    for (int a = 0; a < 4; ++a) {
        const BranchPoint& b = nodes_[i0 + a];
        r.phi += w[a] * b.phi;
        r.phil += w[a] * b.phil;
        r.xi += w[a] * b.xi;
        r.eta += w[a] * b.eta;
        r.P1 += w[a] * b.P1;
        r.P2 += w[a] * b.P2;
        r.epsilon += w[a] * b.epsilon;
    }
    return r;
}

// ---------------------------------------------------------------- frame

CVec frame_field(const BranchPoint& b, double gamma, cplx z, bool include_p)
{
    double p1 = 0.0, p2 = 0.0;
    if (include_p) {
        p1 = 2.0 * std::real(b.P1 * z * z);
        p2 = 2.0 * std::real(b.P2 * z * z);
    }
    const RVec re = b.phi + z.real() * b.xi + p1 * b.phil;
    const RVec im = z.imag() * b.eta + p2 * b.phi;
    CVec u(re.size());
    for (int j = 0; j < re.size(); ++j) u[j] = cplx(re[j], im[j]);
    return std::polar(1.0, gamma) * u;
}

namespace {

Eigen::Vector4d frame_conditions(const CVec& psi, const BranchPoint& b, double gamma, cplx z, bool include_p,
                                 double dx, CVec* R = nullptr)
{
    const CVec r = std::polar(1.0, -gamma) * psi - frame_field(b, 0.0, z, include_p);
    const RVec re = r.real(), im = r.imag();
    if (R) *R = r;
    return {dx * re.dot(b.phi), dx * im.dot(b.phil), dx * re.dot(b.eta), dx * im.dot(b.xi)};
}

}  // namespace

Frame extract_frame(const CVec& psi, const SolitonBranch& branch, double lambda_guess, bool include_p, double tol,
                    int max_iter)
{
    const double dx = branch.grid().dx;
    Eigen::Vector4d th;
    {
        const BranchPoint b = branch.at(lambda_guess);
        const cplx ov = dx * (psi.array() * b.phi.array()).sum();
        const double gamma = std::arg(ov);
        const CVec u = std::polar(1.0, -gamma) * psi;
        const double pair = dx * b.xi.dot(b.eta);
        th << lambda_guess, gamma, dx * RVec(u.real()).dot(b.eta) / pair, dx * RVec(u.imag()).dot(b.xi) / pair;
    }
    auto eval = [&](const Eigen::Vector4d& v, CVec* R = nullptr) {
        const BranchPoint b = branch.at(v[0]);
        return frame_conditions(psi, b, v[1], cplx(v[2], v[3]), include_p, dx, R);
    };
    Frame fr;
    Eigen::Vector4d F = eval(th);
    for (int it = 0; it < max_iter; ++it) {
        fr.iterations = it;
        if (F.cwiseAbs().maxCoeff() <= tol) break;
        Eigen::Matrix4d J;
        const double steps[4] = {1e-7 * th[0], 1e-7, 1e-7, 1e-7};
        for (int c = 0; c < 4; ++c) {
            Eigen::Vector4d tp = th, tm = th;
            tp[c] += steps[c];
            tm[c] -= steps[c];
            J.col(c) = (eval(tp) - eval(tm)) / (2.0 * steps[c]);
        }
        th -= J.partialPivLu().solve(F);
        if (!th.allFinite()) throw FrameLoss("frame Newton produced non-finite parameters");
        F = eval(th);
    }
    fr.residual = F.cwiseAbs().maxCoeff();
    if (fr.residual > tol)
        throw FrameLoss("frame Newton stalled at residual " + std::to_string(fr.residual));
    fr.lambda = th[0];
    fr.gamma = th[1];
    fr.z = cplx(th[2], th[3]);
    eval(th, &fr.R);
    return fr;
}

// ---------------------------------------------------------------- fits

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& absz, double T0, double t_lo, double t_hi,
                   int bins)
{
    DecayFit fit;
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    if (t.empty() || t_lo <= 0.0 || t_hi <= t_lo) {
        fit.reason = "empty or degenerate window";
        return fit;
    }
    const double t_end = std::min(t_hi, t.back());
    fit.t_hi = t_end;
    fit.decades = t_end > t_lo ? std::log10(t_end / t_lo) : 0.0;
    const double a = std::log(t_lo), b = std::log(t_end);
    std::vector<double> X, Y;
    for (int k = 0; k < bins && t_end > t_lo; ++k) {
        const double lo = std::exp(a + (b - a) * k / bins), hi = std::exp(a + (b - a) * (k + 1) / bins);
        double s = 0.0, st = 0.0;
        int c = 0;
        for (size_t i = 0; i < t.size(); ++i)
            if (t[i] >= lo && (t[i] < hi || (k == bins - 1 && t[i] <= hi))) {
                s += absz[i];
                st += t[i];
                ++c;
            }
        if (c == 0) continue;
        X.push_back(std::log(T0 + st / c));
        Y.push_back(std::log(s / c));
    }
    fit.bins = static_cast<int>(X.size());
    if (fit.bins >= 2) {
        fit.envelope_nonincreasing = true;
        for (size_t i = 1; i < Y.size(); ++i)
            if (Y[i] > Y[i - 1] + 1e-3) fit.envelope_nonincreasing = false;
    }
    if (fit.decades < 1.0 - 1e-9) {
        fit.reason = "window covers less than one decade";
        return fit;
    }
    if (fit.bins < 5) {
        fit.reason = "too few samples in the window";
        return fit;
    }
    const int m = fit.bins;
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < m; ++i) {
        mx += X[i];
        my += Y[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < m; ++i) {
        sxx += (X[i] - mx) * (X[i] - mx);
        sxy += (X[i] - mx) * (Y[i] - my);
    }
    fit.exponent = sxy / sxx;
    double rss = 0.0;
    for (int i = 0; i < m; ++i) {
        const double e = Y[i] - my - fit.exponent * (X[i] - mx);
        rss += e * e;
    }
    fit.confidence = 1.96 * std::sqrt(rss / std::max(1, m - 2) / sxx);
    fit.inconclusive = false;
    return fit;
}

double reduced_ode(double a0, double t0, double t, double reZ, int N)
{
    const double y = std::pow(a0 * a0, -N) - 2.0 * N * reZ * (t - t0);
    if (y <= 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(std::pow(y, -1.0 / N));
}

// ---------------------------------------------------------------- driver

namespace {

struct Snapshot {
    double t, mass, absorbed, energy;
    CVec psi;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double slope(const std::vector<double>& X, const std::vector<double>& Y)
{
    const int m = static_cast<int>(X.size());
    if (m < 2) return 0.0;
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < m; ++i) {
        mx += X[i];
        my += Y[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < m; ++i) {
        sxx += (X[i] - mx) * (X[i] - mx);
        sxy += (X[i] - mx) * (Y[i] - my);
    }
    return sxy / sxx;
}

void lambda_diagnostics(TrajectoryRecord& r)
{
    const double lo = r.fit.t_lo, hi = r.fit.t_hi;
    // lambda_inf from lambda = lambda_inf + a |z|^2 over the window
    double s1 = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < r.t.size(); ++i) {
        if (r.t[i] < lo || r.t[i] > hi) continue;
        const double x = std::norm(r.z[i]);
        s1 += 1;
        sx += x;
        sy += r.lambda[i];
        sxx += x * x;
        sxy += x * r.lambda[i];
    }
    if (s1 < 3) return;
    const double a = (s1 * sxy - sx * sy) / (s1 * sxx - sx * sx);
    r.lambda_inf = (sy - a * sx) / s1;

    const int bins = 20;
    std::vector<double> X, Y;
    for (int k = 0; k < bins; ++k) {
        const double bl = lo * std::pow(hi / lo, double(k) / bins), bh = lo * std::pow(hi / lo, double(k + 1) / bins);
        double mx = 0.0, tm = 0.0;
        for (size_t i = 0; i < r.t.size(); ++i)
            if (r.t[i] >= bl && r.t[i] < bh && std::abs(r.lambda[i] - r.lambda_inf) > mx) {
                mx = std::abs(r.lambda[i] - r.lambda_inf);
                tm = r.t[i];
            }
        if (mx > 0.0) {
            X.push_back(std::log(r.T0 + tm));
            Y.push_back(std::log(mx));
        }
    }
    r.lambda_slope = slope(X, Y);
    r.lambda_envelope_ok = X.size() >= 5 && r.lambda_slope <= -0.8 / (2.0 * r.N);

    const double tf = r.t.back();
    for (size_t i = 0; i < r.t.size(); ++i)
        if (r.t[i] >= tf / 10.0)
            r.lambda_last_decade = std::max(r.lambda_last_decade, std::abs(r.lambda[i] - r.lambda.back()));
}

}  // namespace

TrajectoryRecord evolve(const EvolutionConfig& cfg)
{
    const auto clock0 = std::chrono::steady_clock::now();
    const cplx z0(cfg.z1, cfg.z2);
    if (std::abs(z0) > cfg.z_bound)
        throw std::invalid_argument("initial |z| exceeds the configured bound " + std::to_string(cfg.z_bound));
    if (std::abs(z0) == 0.0) throw std::invalid_argument("initial z must be nonzero");
    const Nonlinearity f = Nonlinearity::by_name(cfg.nonlinearity);
    if (!f.is_cubic()) throw std::invalid_argument("the FGR chain and the dynamics driver support the cubic case");

    TrajectoryRecord rec;
    // reduced law
    {
        FgrConfig fc;
        fc.lambda = cfg.lambda0;
        fc.potential = cfg.potential;
        fc.half_width = cfg.fgr_half_width;
        fc.n_points = cfg.fgr_points;
        fc.flip_check = false;
        FgrRun run;
        try {
            run = run_fgr(2, fc);
        } catch (const std::domain_error& e) {
            if (std::string(e.what()).find("window violation") == std::string::npos) throw;
            run = run_fgr(3, fc);
        }
        rec.N = run.report.N;
        rec.epsilon = run.report.epsilon;
        rec.reZ = run.report.route_B;
    }
    if (rec.reZ >= 0.0) throw std::domain_error("Re Z >= 0: no decay law to compare with");
    rec.t_star = std::pow(std::abs(z0), -2.0 * rec.N) / (2.0 * rec.N * std::abs(rec.reZ));
    rec.T0 = 1.0 / (std::abs(cfg.z1) + std::abs(cfg.z2));

    const PeriodicGrid g(cfg.half_width, cfg.n_points);
    rec.dt = cfg.dt > 0.0 ? cfg.dt : g.dx * g.dx / 4.0;
    const double t_final = cfg.t_final > 0.0 ? cfg.t_final : cfg.window_hi * rec.t_star;
    const long per_out = std::max(1L, std::lround(cfg.output_every / rec.dt));
    const long n_out = static_cast<long>(std::ceil(t_final / (per_out * rec.dt)));

    const SolitonBranch branch(g, cfg.potential, f, cfg.lambda0, cfg.branch_span, cfg.branch_nodes, cfg.refine,
                               cfg.soliton_half_width);
    RVec V(g.n);
    for (int j = 0; j < g.n; ++j) V[j] = cfg.potential.value(cfg.potential.h * g.x[j]);
    SplitStep stepper(g, V, f, rec.dt, sponge_profile(g, cfg.sponge_width, cfg.sponge_strength));
    stepper.set_state(frame_field(branch.at(cfg.lambda0), cfg.gamma0, z0, cfg.include_p));

    const double mass0 = stepper.mass(), energy0 = stepper.energy();
    std::vector<Snapshot> batch;
    double lambda_guess = cfg.lambda0;
    bool clean = true;  // nothing absorbed yet

    auto flush = [&]() {
        std::vector<Frame> frames(batch.size());
        std::atomic<size_t> next{0};
        std::string failure;
        std::mutex fail_mu;
        auto work = [&]() {
            for (size_t i; (i = next++) < batch.size();) {
                try {
                    frames[i] = extract_frame(batch[i].psi, branch, lambda_guess, cfg.include_p);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lk(fail_mu);
                    failure = "t = " + std::to_string(batch[i].t) + ": " + e.what();
                }
            }
        };
        const int nt = std::max(1, std::min<int>(cfg.threads, static_cast<int>(batch.size())));
        std::vector<std::thread> pool;
        for (int k = 1; k < nt; ++k) pool.emplace_back(work);
        work();
        for (auto& th : pool) th.join();
        if (!failure.empty()) throw FrameLoss(failure);
        for (size_t i = 0; i < batch.size(); ++i) {
            const Frame& fr = frames[i];
            rec.t.push_back(batch[i].t);
            rec.z.push_back(fr.z);
            rec.lambda.push_back(fr.lambda);
            rec.gamma.push_back(fr.gamma);
            rec.mass.push_back(batch[i].mass);
            rec.absorbed.push_back(batch[i].absorbed);
            rec.energy.push_back(batch[i].energy);
            rec.frame_residual.push_back(fr.residual);
            rec.max_frame_residual = std::max(rec.max_frame_residual, fr.residual);
            double w2 = 0.0;
            for (int j = 0; j < g.n; ++j)
                w2 += std::norm(fr.R[j]) * std::pow(1.0 + g.x[j] * g.x[j], -cfg.nu);
            rec.r_weighted.push_back(std::sqrt(g.dx * w2));
        }
        if (!frames.empty()) lambda_guess = frames.back().lambda;
        batch.clear();
    };

    auto record = [&]() {
        const double m = stepper.mass(), ab = stepper.absorbed();
        const double drift = std::abs(m + ab - mass0) / mass0;
        rec.mass_drift = std::max(rec.mass_drift, drift);
        const double e = stepper.energy();
        if (ab > 1e-8 * mass0) clean = false;
        if (clean) rec.energy_drift = std::max(rec.energy_drift, std::abs(e - energy0) / std::abs(energy0));
        batch.push_back({stepper.time(), m, ab, e, stepper.state()});
        if (drift > cfg.mass_tol) {
            flush();
            rec.seconds = seconds_since(clock0);
            std::ostringstream os;
            os << "mass drift " << drift << " exceeds " << cfg.mass_tol << " at t = " << stepper.time();
            throw MassDrift(os.str(), rec);
        }
        if (static_cast<int>(batch.size()) >= cfg.batch) flush();
    };

    record();
    for (long k = 0; k < n_out; ++k) {
        stepper.advance(per_out);
        record();
    }
    flush();

    std::vector<double> absz(rec.z.size());
    for (size_t i = 0; i < absz.size(); ++i) absz[i] = std::abs(rec.z[i]);
    rec.fit = fit_decay(rec.t, absz, rec.T0, cfg.window_lo * rec.t_star, cfg.window_hi * rec.t_star);

    rec.ode_ratio_min = std::numeric_limits<double>::infinity();
    rec.ode_ratio_max = 0.0;
    for (size_t i = 0; i < rec.t.size(); ++i) {
        if (rec.t[i] < rec.fit.t_lo || rec.t[i] > rec.fit.t_hi) continue;
        const double q = reduced_ode(std::abs(z0), 0.0, rec.t[i], rec.reZ, rec.N) / absz[i];
        rec.ode_ratio_min = std::min(rec.ode_ratio_min, q);
        rec.ode_ratio_max = std::max(rec.ode_ratio_max, q);
    }
    lambda_diagnostics(rec);
    rec.seconds = seconds_since(clock0);
    return rec;
}

std::string trajectory_csv(const TrajectoryRecord& r)
{
    std::ostringstream os;
    os << std::setprecision(15);
    os << "t,re_z,im_z,lambda,gamma,mass,absorbed,energy,r_weighted,frame_residual\n";
    for (size_t i = 0; i < r.t.size(); ++i)
        os << r.t[i] << ',' << r.z[i].real() << ',' << r.z[i].imag() << ',' << r.lambda[i] << ',' << r.gamma[i] << ','
           << r.mass[i] << ',' << r.absorbed[i] << ',' << r.energy[i] << ',' << r.r_weighted[i] << ','
           << r.frame_residual[i] << '\n';
    return os.str();
}

std::string trajectory_json(const TrajectoryRecord& r)
{
    nlohmann::ordered_json j;
    j["N"] = r.N;
    j["epsilon"] = r.epsilon;
    j["re_Z"] = r.reZ;
    j["t_star"] = r.t_star;
    j["T0"] = r.T0;
    j["dt"] = r.dt;
    j["samples"] = r.t.size();
    j["t_final"] = r.t.empty() ? 0.0 : r.t.back();
    j["fit"] = {{"exponent", r.fit.exponent},
                {"confidence", r.fit.confidence},
                {"expected", -1.0 / (2.0 * r.N)},
                {"t_lo", r.fit.t_lo},
                {"t_hi", r.fit.t_hi},
                {"decades", r.fit.decades},
                {"bins", r.fit.bins},
                {"inconclusive", r.fit.inconclusive},
                {"reason", r.fit.reason},
                {"envelope_nonincreasing", r.fit.envelope_nonincreasing}};
    j["ode_ratio"] = {r.ode_ratio_min, r.ode_ratio_max};
    j["lambda_inf"] = r.lambda_inf;
    j["lambda_envelope_slope"] = r.lambda_slope;
    j["lambda_envelope_ok"] = r.lambda_envelope_ok;
    j["lambda_last_decade"] = r.lambda_last_decade;
    j["mass_drift"] = r.mass_drift;
    j["energy_drift_before_absorption"] = r.energy_drift;
    j["max_frame_residual"] = r.max_frame_residual;
    j["seconds"] = r.seconds;
    return j.dump(2);
}

std::string plot_script(const std::string& csv_path)
{
    std::ostringstream os;
    os << "import numpy as np\nimport matplotlib.pyplot as plt\n"
       << "d = np.genfromtxt('" << csv_path << "', delimiter=',', names=True)\n"
       << "t = d['t']; a = np.hypot(d['re_z'], d['im_z'])\n"
       << "fig, ax = plt.subplots(1, 2, figsize=(10, 4))\n"
       << "ax[0].loglog(t[1:], a[1:]); ax[0].set_xlabel('t'); ax[0].set_ylabel('|z|')\n"
       << "ax[1].semilogx(t[1:], d['lambda'][1:]); ax[1].set_xlabel('t'); ax[1].set_ylabel('lambda')\n"
       << "fig.tight_layout(); fig.savefig('" << csv_path << ".png', dpi=120)\n";
    return os.str();
}

}  // namespace tfgr
