#pragma once
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "volterra/report.hpp"

namespace volterra {

using cplx = std::complex<double>;

struct Atom {
    cplx z;
    double mass;
};

class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    // positions in the closed right half-plane, masses > 0, positions pairwise distinct
    explicit DiscreteMeasure(std::vector<Atom> atoms);
    // merges coincident positions by adding masses; drops zero masses
    static DiscreteMeasure merged(std::vector<Atom> atoms);

    const std::vector<Atom>& atoms() const { return atoms_; }
    bool empty() const { return atoms_.empty(); }
    std::size_t size() const { return atoms_.size(); }
    double total_mass() const;

private:
    std::vector<Atom> atoms_;
};

// { x + iy : 0 < x <= h, |y - omega| <= h/2 }
struct CarlesonSquare {
    double omega = 0.0;
    double h = 1.0;
    bool contains(cplx z) const;
};

double measure_of_square(const DiscreteMeasure& mu, const CarlesonSquare& q);

struct CarlesonConstant {
    double constant = 0.0;
    CarlesonSquare witness;
};

// sup over squares with h <= h_max of mu(Q)^gamma / h
CarlesonConstant geometric_carleson_constant(const DiscreteMeasure& mu, double gamma,
                                             double h_max = std::numeric_limits<double>::infinity());

// (int (1+t^2)^(-p/2) dt)^(1/p)
double hp_norm_constant(double p);
// ||k_lambda||_{H^p} for k_lambda(z) = 1/(z + conj(lambda))
double hp_kernel_norm(cplx lambda, double p);

struct KernelTest {
    double constant = 0.0;
    cplx witness = 0.0;
};

KernelTest kernel_embedding_test(const DiscreteMeasure& mu, double p, double q, const std::vector<cplx>& test_points);
// i*Im(z_j) + Re(z_j) * 2^k, k = -3..3, for every atom
std::vector<cplx> default_test_points(const DiscreteMeasure& mu);

struct Balayage {
    double value = 0.0;
    bool near_singular = false;
};

Balayage balayage(const DiscreteMeasure& mu, double omega);

Report embedding_gamma_carleson(const DiscreteMeasure& mu, double gamma, double beta1, double beta2,
                                double sector_theta = 1.5707963267948966 - 1e-6);

struct DoublingTrend {
    std::vector<double> values;
    std::vector<double> ratios;
    Verdict verdict = Verdict::inconclusive;
};

// pass: last ratio <= tol; fail: every ratio > tol (needs two); otherwise inconclusive
DoublingTrend classify_doubling(const std::vector<double>& values, double tol = 1.10);

}  // namespace volterra
