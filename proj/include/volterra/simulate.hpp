#pragma once
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "volterra/kernels.hpp"
#include "volterra/system.hpp"

namespace volterra {

// Input u(t) on [0, inf). Every form carries its exact L2(0, inf) norm and an
// L1 tail bound that certifies decay.
class ScalarSignal {
public:
    // e^{-w t}, Re w > 0
    static ScalarSignal exponential(cplx w);
    // 2 (Re lambda)^{3/2} t e^{-lambda t}, unit norm
    static ScalarSignal frame(cplx lambda);
    // sum_k p_k t^k e^{-w t}
    static ScalarSignal poly_exp(std::vector<cplx> p, cplx w);
    // linear interpolation on a grid starting at 0, zero after the last node
    static ScalarSignal sampled(std::vector<double> grid, std::vector<cplx> values);
    // user callable supported on [0, support_end]; the norm is computed by quadrature
    static ScalarSignal function(std::function<cplx(double)> f, double support_end, std::vector<double> breakpoints = {},
                                 std::string label = "function");
    // user callable on [0, inf) with a decay certificate: tail_l1(T) bounds int_T^inf |u|
    static ScalarSignal decaying(std::function<cplx(double)> f, std::function<double(double)> tail_l1,
                                 std::string label = "decaying");

    cplx operator()(double t) const;
    double norm() const { return norm_; }
    cplx scale() const { return scale_; }
    // end of support, infinity for exponential tails
    double support_end() const;
    // points where u or a derivative may jump
    std::vector<double> breakpoints() const;
    // bound on int_T^inf |u(t)| dt
    double tail_l1(double T) const;
    // u_hat(mu) when a closed form exists
    std::optional<cplx> laplace(cplx mu) const;
    std::string label() const;

    ScalarSignal scaled(cplx factor) const;
    ScalarSignal normalized() const;
    // u restricted to [a, b]
    ScalarSignal truncated(double a, double b) const;
    // s -> u(b - s) on [0, b]; u must vanish after b
    ScalarSignal reflected(double b) const;

    struct Form;

private:
    ScalarSignal(std::shared_ptr<const Form> f, cplx scale, double norm);
    std::shared_ptr<const Form> form_;
    cplx scale_ = 1.0;
    double norm_ = 0.0;
};

struct TimeGrid {
    double T;
    int K;  // number of panels; t_k = k T / K
    double step() const { return T / K; }
    double at(int k) const { return k * (T / K); }
};

struct SimulationResult {
    std::vector<double> t;
    std::vector<std::vector<cplx>> modes;  // modes[n][k]
    std::vector<double> state_norm;        // Euclidean norm of the mode vector
    std::vector<double> running_max;
    double error_estimate = 0.0;
    double sup_norm = 0.0;
    double at_t = 0.0;
};

struct SimulationOptions {
    bool estimate_error = true;  // rerun on the halved grid
    int threads = -1;
};

// Per-mode values c_n(t_k) and panel moments of c_n against Legendre
// polynomials; reusable across inputs on the same grid.
class ResolventTable {
public:
    ResolventTable(const DiagonalSystem& sys, const Kernel& k, const TimeGrid& grid, int threads = -1);

    const DiagonalSystem& system() const { return sys_; }
    const TimeGrid& grid() const { return grid_; }
    const std::vector<cplx>& values(std::size_t n) const { return values_[n]; }
    const std::vector<cplx>& moments(std::size_t n) const { return moments_[n]; }

private:
    DiagonalSystem sys_;
    TimeGrid grid_;
    std::vector<std::vector<cplx>> values_;
    std::vector<std::vector<cplx>> moments_;  // [panel * 8 + degree]
};

SimulationResult simulate_state(const ResolventTable& table, const std::vector<cplx>& x0, const ScalarSignal& u,
                                int threads = -1);

// mode n: c_n(t) x0_n + b_n (c_n * u)(t)
SimulationResult simulate_state(const DiagonalSystem& sys, const Kernel& k, const std::vector<cplx>& x0,
                                const ScalarSignal& u, const TimeGrid& grid, const SimulationOptions& opts = {});

struct ModeCoefficients {
    std::vector<cplx> coefficients;
    std::vector<double> error;  // per-mode quadrature + tail bound
    double tail_bound = 0.0;
    double norm() const;
};

// b_n int_0^T c_n(s) u(s) ds, tail bound added to the error
ModeCoefficients b_infinity_numeric(const DiagonalSystem& sys, const Kernel& k, const ScalarSignal& u, double T,
                                    int threads = -1);

struct ExponentialAction {
    std::vector<cplx> coefficients;
    double squared_norm = 0.0;
};

// B_inf applied to e^{-lambda t}: b_n / (lambda (1 - a_hat(lambda) lambda_n))
ExponentialAction action_on_exponential(const DiagonalSystem& sys, const Kernel& k, cplx lambda);

}  // namespace volterra
