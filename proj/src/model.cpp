#include "trapfgr/model.hpp"

#include <cmath>
#include <stdexcept>

namespace tfgr {

Nonlinearity Nonlinearity::cubic()
{
    return {"cubic", [](double s) { return s; }, [](double) { return 1.0; }, [](double) { return 0.0; },
            [](double s) { return 0.5 * s * s; }};
}

Nonlinearity Nonlinearity::none()
{
    const auto zero = [](double) { return 0.0; };
    return {"none", zero, zero, zero, zero};
}

Nonlinearity Nonlinearity::power(double p)
{
    if (p <= 0.0) throw std::invalid_argument("power nonlinearity needs p > 0");
    if (p == 1.0) return cubic();
    return {"power:" + std::to_string(p),
            [p](double s) { return std::pow(s, p); },
            [p](double s) { return p * std::pow(s, p - 1.0); },
            [p](double s) { return p * (p - 1.0) * std::pow(s, p - 2.0); },
            [p](double s) { return std::pow(s, p + 1.0) / (p + 1.0); }};
}

Nonlinearity Nonlinearity::by_name(const std::string& name)
{
    if (name == "cubic") return cubic();
    if (name == "quintic") return power(2.0);
    if (name == "none") return none();
    if (name.rfind("power:", 0) == 0) return power(std::stod(name.substr(6)));
    throw std::invalid_argument("unknown nonlinearity '" + name + "'");
}

double Nonlinearity::growth_ratio(double beta, double s_max) const
{
    double worst = 0.0;
    for (int k = 0; k <= 200; ++k) {
        const double s = s_max * k / 200.0;
        worst = std::max(worst, std::abs(f(s)) / (1.0 + std::pow(s, beta)));
    }
    return worst;
}

double PotentialSpec::value(double y) const { return -depth * std::exp(-y * y); }

RVec evaluate_potential(const PotentialSpec& spec, const Grid& g)
{
    if (spec.h <= 0.0) throw std::invalid_argument("potential scale h must be positive");
    RVec v(g.size());
    const int n = g.size();
    for (int i = 0; i <= g.center(); ++i) {
        v[i] = spec.value(spec.h * g.x()[i]);
        v[n - 1 - i] = v[i];
    }
    return v;
}

WindowReport select_window(double lambda, double epsilon, double edge_tol_rel)
{
    if (lambda <= 0.0 || epsilon <= 0.0)
        throw std::invalid_argument("window needs lambda > 0 and epsilon > 0");
    WindowReport w;
    w.lambda = lambda;
    w.epsilon = epsilon;
    if (epsilon >= lambda) {
        w.N = 0;
        w.reason = "epsilon >= lambda: mode outside the gap";
        return w;
    }
    int N = static_cast<int>(std::floor(lambda / epsilon));
    while ((N + 1) * epsilon <= lambda) ++N;
    while (N > 1 && N * epsilon > lambda) --N;
    w.N = N;
    w.upper_margin = (N + 1) * epsilon - lambda;
    w.lower_margin = lambda - N * epsilon;
    const double tol = edge_tol_rel * lambda;
    w.near_edge = std::abs(w.lower_margin) < tol || std::abs(w.upper_margin) < tol;
    w.valid = !w.near_edge;
    if (w.near_edge) w.reason = "threshold proximity: N eps within tolerance of lambda";
    return w;
}

}  // namespace tfgr
