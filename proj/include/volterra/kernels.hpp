#pragma once
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "volterra/report.hpp"

namespace volterra {

using cplx = std::complex<double>;

class Kernel;

// a_hat(lambda) = scale * lambda^(-beta)
struct PowerKernel {
    double beta;
    double scale = 1.0;
};

// a_hat(lambda) = xi / (lambda + s)
struct ExponentialKernel {
    double xi;
    double s;
};

// a_hat(lambda) = 1 / log(lambda)
struct LogKernel {};

struct StieltjesAtom {
    double s;
    double weight;
};

// a_hat(lambda) = sum_j w_j / (lambda + s_j)
struct AtomicStieltjes {
    std::vector<StieltjesAtom> atoms;
};

// 1/r_hat = 1/a_hat + omega
struct Shifted {
    std::shared_ptr<const Kernel> base;
    double omega;
};

class Kernel {
public:
    using Variant = std::variant<PowerKernel, ExponentialKernel, LogKernel, AtomicStieltjes, Shifted>;

    static Kernel power(double beta, double scale = 1.0);
    static Kernel exponential(double xi, double s);
    static Kernel log();
    static Kernel stieltjes(std::vector<StieltjesAtom> atoms);
    static Kernel shifted(const Kernel& base, double omega);
    // a(t) = 1 (Cauchy problem)
    static Kernel cauchy() { return power(1.0); }

    const Variant& variant() const { return v_; }
    std::string name() const;

private:
    explicit Kernel(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

cplx laplace_transform(const Kernel& k, cplx lambda);
cplx laplace_derivative(const Kernel& k, cplx lambda);
// principal-branch continuation off (-inf, 0], no half-plane check; used on inversion contours
cplx laplace_continued(const Kernel& k, cplx lambda);

// a(t) = t^(beta-1) * g(t) with g smooth on [0, inf)
struct TimeDensity {
    double beta;
    std::function<double(double)> g;
};

// throws UnsupportedKernel when no closed-form density exists
TimeDensity time_density(const Kernel& k);

// Shifted kernels with a closed-form equivalent are rewritten; others returned unchanged
Kernel simplify(const Kernel& k);

struct LambdaGrid {
    std::vector<cplx> points;
};

// log-polar lattice: |lambda| = 10^k, k = kmin..kmax, arg = +-(pi/2)(1 - 2^-m), m = 1..angle_levels
LambdaGrid default_grid(int angle_levels = 32, int kmin = -3, int kmax = 6);

enum class GrowthDirection { upper, lower };

HypothesisReport check_sectorial(const Kernel& k, double theta, const LambdaGrid& grid);
HypothesisReport check_one_regular(const Kernel& k, const LambdaGrid& grid);
// reference_constant < 0 means no comparison constant was supplied
HypothesisReport check_growth(const Kernel& k, double beta, GrowthDirection dir, const std::vector<double>& lambdas,
                              double reference_constant = -1.0);

std::vector<double> log_spaced(double lo, double hi, int n);

}  // namespace volterra
