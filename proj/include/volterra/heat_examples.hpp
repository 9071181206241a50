#pragma once
#include <string>
#include <utility>
#include <vector>

#include "volterra/kernels.hpp"
#include "volterra/report.hpp"
#include "volterra/system.hpp"

namespace volterra {

enum class Boundary { dirichlet_rod, neumann };

struct HeatSystemSpec {
    Boundary boundary = Boundary::dirichlet_rod;
    int d = 1;             // dimension (neumann)
    double c_mid = 1.0;    // midpoint model mu_n = c_mid n^{2/d} (neumann)
    double c_bound = 0.0;  // optional two-sided constant c; 0 = unchecked
    double alpha = 0.0;
    double delta = 0.0;
    int N = 1;
};

struct HeatModel {
    DiagonalSystem system;
    Kernel kernel;
    double beta;  // 1 + alpha
};

// lambda_n = -n^2 pi^2, b_n = n^delta, a_hat = Gamma(1+alpha) lambda^{-1-alpha}
HeatModel dirichlet_rod_system(int N, double alpha, double delta);
double dirichlet_threshold(double alpha);

// lambda_n = -c_mid n^{2/d}, n = 1..N (the zero eigenvalue is left out)
HeatModel neumann_system(int d, double alpha, double delta, int N, double c_mid, double c_bound = 0.0);
double neumann_threshold(int d, double alpha);

HeatModel heat_system(const HeatSystemSpec& spec);
double heat_threshold(const HeatSystemSpec& spec);

// (beta1, beta2) = beta -+ 0.05, beta1 clipped into (max(1/2, beta/3), beta)
std::pair<double, double> default_window(double beta);

struct ScalingExperiment {
    std::vector<double> h;
    std::vector<double> mu_Qh;
    std::vector<double> ratio;  // mu(Q_h)^beta / h
    double slope = 0.0;
    double intercept = 0.0;
    double predicted_slope = 0.0;
    double slope_tolerance = 0.05;
    bool bounded = false;  // measured slope <= slope_tolerance
};

// log-log fit of mu(Q_{0,h})^beta / h over h_values
ScalingExperiment carleson_scaling_experiment(const HeatSystemSpec& spec, const std::vector<double>& h_values,
                                              int threads = -1);

}  // namespace volterra
