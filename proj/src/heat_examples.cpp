#include "volterra/heat_examples.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "volterra/errors.hpp"
#include "volterra/parallel.hpp"

namespace volterra {

namespace {

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in [0, 1)");
}

Kernel heat_kernel(double alpha) { return Kernel::power(1.0 + alpha, std::tgamma(1.0 + alpha)); }

}  // namespace

HeatModel dirichlet_rod_system(int N, double alpha, double delta) {
    check_alpha(alpha);
    if (N < 1) throw DomainError("N must be >= 1");
    std::vector<cplx> l, b;
    const double pi2 = std::numbers::pi * std::numbers::pi;
    for (int n = 1; n <= N; ++n) {
        l.emplace_back(-double(n) * n * pi2);
        b.emplace_back(std::pow(double(n), delta));
    }
    return {DiagonalSystem(std::move(l), std::move(b)), heat_kernel(alpha), 1.0 + alpha};
}

double dirichlet_threshold(double alpha) {
    check_alpha(alpha);
    return (1.0 - alpha) / (2.0 * (1.0 + alpha));
}

HeatModel neumann_system(int d, double alpha, double delta, int N, double c_mid, double c_bound) {
    check_alpha(alpha);
    if (d < 1) throw DomainError("dimension must be >= 1");
    if (N < 1) throw DomainError("N must be >= 1");
    if (!(c_mid > 0.0) || !std::isfinite(c_mid)) throw DomainError("c_mid must be positive");
    if (c_bound != 0.0 && !(c_bound >= 1.0 && c_mid >= 1.0 / c_bound && c_mid <= c_bound))
        throw DomainError("c_mid must lie in [1/c, c] for the eigenvalue bounds");
    std::vector<cplx> l, b;
    for (int n = 1; n <= N; ++n) {
        l.emplace_back(-c_mid * std::pow(double(n), 2.0 / d));
        b.emplace_back(std::pow(double(n), delta));
    }
    return {DiagonalSystem(std::move(l), std::move(b)), heat_kernel(alpha), 1.0 + alpha};
}

double neumann_threshold(int d, double alpha) {
    check_alpha(alpha);
    if (d < 1) throw DomainError("dimension must be >= 1");
    return (2.0 / d - 1.0 - alpha) / (2.0 * (1.0 + alpha));
}

HeatModel heat_system(const HeatSystemSpec& spec) {
    return spec.boundary == Boundary::dirichlet_rod
               ? dirichlet_rod_system(spec.N, spec.alpha, spec.delta)
               : neumann_system(spec.d, spec.alpha, spec.delta, spec.N, spec.c_mid, spec.c_bound);
}

double heat_threshold(const HeatSystemSpec& spec) {
    return spec.boundary == Boundary::dirichlet_rod ? dirichlet_threshold(spec.alpha) : neumann_threshold(spec.d, spec.alpha);
}

std::pair<double, double> default_window(double beta) {
    const double floor = std::max(0.5, beta / 3.0);
    double b1 = beta - 0.05;
    if (b1 <= floor) b1 = 0.5 * (floor + beta);
    return {b1, beta + 0.05};
}

ScalingExperiment carleson_scaling_experiment(const HeatSystemSpec& spec, const std::vector<double>& h_values,
                                              int threads) {
    if (h_values.size() < 2) throw DomainError("scaling experiment needs at least two h values");
    const auto model = heat_system(spec);
    const auto& l = model.system.eigenvalues();
    // atoms -lambda_n are real and increasing in n
    std::vector<double> pos(l.size()), cum(l.size());
    double acc = 0.0;
    for (std::size_t n = 0; n < l.size(); ++n) {
        pos[n] = -l[n].real();
        acc += std::norm(model.system.b()[n]);
        cum[n] = acc;
    }
    const double h_max = *std::max_element(h_values.begin(), h_values.end());
    if (spec.boundary == Boundary::dirichlet_rod && h_values.front() <= std::numbers::pi * std::numbers::pi)
        throw DomainError("scaling experiment: h values must exceed pi^2 for the rod");
    if (pos.back() < h_max) throw DomainError("scaling experiment: insufficient N for the requested h_max");

    ScalingExperiment e;
    e.h = h_values;
    e.mu_Qh.assign(h_values.size(), 0.0);
    e.ratio.assign(h_values.size(), 0.0);
    parallel_for(
        h_values.size(),
        [&](std::size_t i) {
            const double h = h_values[i];
            const auto it = std::upper_bound(pos.begin(), pos.end(), h);
            const double m = it == pos.begin() ? 0.0 : cum[static_cast<std::size_t>(it - pos.begin()) - 1];
            e.mu_Qh[i] = m;
            e.ratio[i] = std::pow(m, model.beta) / h;
        },
        threads);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < e.h.size(); ++i) {
        if (!(e.ratio[i] > 0.0)) continue;
        const double x = std::log(e.h[i]), y = std::log(e.ratio[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) throw DomainError("scaling experiment: no square contains mass");
    e.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    e.intercept = (sy - e.slope * sx) / n;
    // mu_n ~ n^p, so mu(Q_h) ~ h^{(1 + 2 delta) / p}
    const double p = spec.boundary == Boundary::dirichlet_rod ? 2.0 : 2.0 / spec.d;
    e.predicted_slope = model.beta * (1.0 + 2.0 * spec.delta) / p - 1.0;
    e.bounded = e.slope <= e.slope_tolerance;
    return e;
}

}  // namespace volterra
