#pragma once
#include <complex>
#include <cstdint>
#include <vector>

#include "volterra/carleson.hpp"
#include "volterra/kernels.hpp"
#include "volterra/report.hpp"
#include "volterra/simulate.hpp"
#include "volterra/system.hpp"

namespace volterra {

// atoms at -lambda_n with masses |b_n|^2
DiscreteMeasure system_measure(const DiagonalSystem& sys);

// (Re lambda - omega) sum |b_n|^2 / (|lambda|^2 |1 - a_hat(lambda) lambda_n|^2)
double necessary_functional(const DiagonalSystem& sys, const Kernel& k, cplx lambda, double omega = 0.0);

struct SupGridOptions {
    int n_re = 48;
    int n_im = 65;
    double re_max = 1e6;
    double im_max = 1e6;
    bool refine = true;  // also run the doubled grid and compare
};

AnalysisReport necessary_condition_sup(const DiagonalSystem& sys, const Kernel& k, double omega = 0.0,
                                       const SupGridOptions& opts = {});

struct SufficientOptions {
    double trend_tol = 1.10;
    std::size_t min_trend_size = 8;  // below this the truncation is treated as a finite system
    int threads = -1;
};

// hypothesis checks of the sufficient condition plus the Carleson truncation trend
AnalysisReport sufficient_condition(const DiagonalSystem& sys, const Kernel& k, double beta, double beta1,
                                    double beta2, const SufficientOptions& opts = {});

// 2 (Re lambda)^{3/2} t e^{-lambda t}
cplx frame_input(cplx lambda, double t);
// mu_{j,k} = 2^{-j} + i k 2^{-j}
cplx frame_lattice(int j, int k);

cplx g_function(cplx lambda, cplx s, const Kernel& k);

double frame_tail_bound(const Kernel& k, double beta, double p1, double p2, int J = 32);

// b_n = || phi_n || for the rows of a vector-valued control
std::vector<double> reduce_vector_control(const std::vector<std::vector<cplx>>& rows);
std::vector<double> reduce_vector_control(const std::vector<double>& row_norms);

struct BatteryOptions {
    std::vector<std::pair<int, int>> frame_indices = {{-2, 0}, {-1, 0}, {0, -1}, {0, 0}, {0, 1}, {1, 0}, {2, 0}, {3, 0}};
    std::vector<double> exponential_rates = {0.5, 1.0, 2.0, 4.0};
    int random_signals = 4;
    int random_modes = 6;
    std::uint64_t seed = 12345;
};

// truncated frame functions, exponentials and random band-limited signals, all of unit norm
std::vector<ScalarSignal> default_battery(double T, const BatteryOptions& opts = {});

struct EmpiricalOptions {
    int steps = 200;
    int threads = -1;
};

AnalysisReport empirical_admissibility(const DiagonalSystem& sys, const Kernel& k, const std::vector<ScalarSignal>& inputs,
                                       double T, const EmpiricalOptions& opts = {});

}  // namespace volterra
