#pragma once
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "volterra/carleson.hpp"
#include "volterra/report.hpp"
#include "volterra/system.hpp"

namespace volterra {

struct BlaschkeWeight {
    double value = 1.0;       // 0 when the product underflows
    double log_value = 0.0;   // always available
    double increment = 0.0;   // |log eps^(2K) - log eps^(K)|
    bool underflow = false;   // eps < 1e-300
    int neighbours = 0;       // factors used at truncation K
};

// prod over k != n, |rank(k) - rank(n)| <= K in |lambda| order, of
// |xi (lambda_n - lambda_k)| / |2s - xi (lambda_n + conj(lambda_k))|
BlaschkeWeight blaschke_weight(std::size_t n, const DiagonalSystem& sys, double xi, double s, std::size_t K);

// doubles K from K0 until the increment drops below tol or the product is complete
BlaschkeWeight converged_blaschke_weight(std::size_t n, const DiagonalSystem& sys, double xi, double s,
                                         std::size_t K0 = 16, double tol = 1e-6);

enum class ControllabilityKind { exact, null };

struct ControllabilityMeasure {
    ControllabilityKind kind = ControllabilityKind::exact;
    DiagonalSystem system;
    double xi = 1.0;
    double s = 0.0;
    double tau = 0.0;
    std::size_t K = 0;
    std::vector<Atom> atoms;         // at s - lambda_n xi; mass may be +inf when eps_n underflows
    std::vector<double> log_masses;
    std::vector<BlaschkeWeight> epsilons;
    std::vector<std::string> notes;

    bool representable() const;
    DiscreteMeasure measure() const;  // throws DomainError when not representable
    std::size_t N() const { return system.size(); }
};

ControllabilityMeasure exact_controllability_measure(const DiagonalSystem& sys, double xi, double s, std::size_t K,
                                                     int threads = -1);
ControllabilityMeasure null_controllability_measure(const DiagonalSystem& sys, double xi, double s, double tau,
                                                    std::size_t K, int threads = -1);

struct ExplicitBInfinity {
    std::vector<cplx> coefficients;
    std::vector<std::size_t> excluded;  // modes with Re(s - lambda_n xi) <= 0
};

using LaplaceInput = std::function<cplx(cplx)>;

// b_n int c_n u for the exponential kernel, from u_hat by residues
ExplicitBInfinity b_infinity_exponential(const DiagonalSystem& sys, double xi, double s, const LaplaceInput& u_hat);

// 2 b_n v(lambda_n) for a_hat = lambda^{-1/2}
std::vector<cplx> b_infinity_sqrt_kernel(const DiagonalSystem& sys, const LaplaceInput& v);

struct McPhailOptions {
    double trend_tol = 1.10;
    std::size_t min_trend_size = 8;
    int threads = -1;
};

// geometric 1-Carleson constant with N- and K-doubling trends
AnalysisReport mcphail_verdict(const ControllabilityMeasure& cm, const McPhailOptions& opts = {});
// same for a bare measure; the N trend uses prefixes in |z| order
AnalysisReport mcphail_verdict(const DiscreteMeasure& mu, const McPhailOptions& opts = {});

}  // namespace volterra
