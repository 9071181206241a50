#pragma once
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "volterra/kernels.hpp"

namespace volterra {

// 1 / (lambda (1 + mu a_hat(lambda)))
cplx sigma(cplx lambda, cplx mu, const Kernel& k);

// closed-form resolvent for a_hat = xi/(lambda+s)
cplx c_exponential(cplx lambda_n, double xi, double s, double t);

enum class MLPath { exponential, taylor, integral };
const char* to_string(MLPath p);

struct MLValue {
    cplx value;
    double error;  // absolute error estimate
    MLPath path;
};

// E_beta(z) = sum z^k / Gamma(beta k + 1), 0 < beta < 2
MLValue mittag_leffler_eval(double beta, cplx z);
cplx mittag_leffler(double beta, cplx z);

// E_beta(scale * lambda_n * t^beta): resolvent of a_hat = scale * lambda^(-beta)
cplx c_power(cplx lambda_n, double beta, double t, double scale = 1.0);

enum class InversionMethod { talbot, bromwich };

struct InversionOptions {
    InversionMethod method = InversionMethod::talbot;
    double tol = 1e-8;
    double abscissa = 0.0;  // F analytic on Re lambda > abscissa
};

struct InversionResult {
    cplx value;
    double error_estimate;
    int nodes;
};

using LaplaceFunction = std::function<cplx(cplx)>;

InversionResult invert_laplace(const LaplaceFunction& F, double t, const InversionOptions& opts = {});

enum class ResolventMethod { closed_form, mittag_leffler, numeric_inversion };
const char* to_string(ResolventMethod m);

// c_n(t) with Laplace transform sigma(., -lambda_n)
class ScalarResolvent {
public:
    ScalarResolvent(const Kernel& k, cplx lambda_n);
    ScalarResolvent(const Kernel& k, cplx lambda_n, ResolventMethod forced, InversionOptions inv = {});

    cplx operator()(double t) const;
    ResolventMethod method() const { return method_; }
    const Kernel& kernel() const { return kernel_; }
    cplx eigenvalue() const { return lambda_; }
    cplx laplace(cplx lambda) const { return sigma(lambda, -lambda_, kernel_); }

private:
    Kernel kernel_;
    Kernel simple_;
    cplx lambda_;
    ResolventMethod method_;
    InversionOptions inv_;
};

struct ResidualProfile {
    std::vector<double> t;
    std::vector<double> residual;
    double max = 0.0;
    double at = 0.0;
};

// |c(t) - 1 - lambda_n (a * c)(t)| on a uniform grid t_k = k h starting at 0
ResidualProfile resolvent_residual(const Kernel& k, cplx lambda_n, const std::function<cplx(double)>& c,
                                   const std::vector<double>& t_grid);

}  // namespace volterra
