#pragma once
#include <complex>
#include <vector>

namespace volterra {

using cplx = std::complex<double>;

// Finite truncation of a diagonal system: A phi_n = lambda_n phi_n, B ~ (b_n).
// condition_number stands in for the Riesz-basis constants (1 = orthonormal).
class DiagonalSystem {
public:
    DiagonalSystem() = default;
    DiagonalSystem(std::vector<cplx> eigenvalues, std::vector<cplx> b, double condition_number = 1.0);

    const std::vector<cplx>& eigenvalues() const { return lambda_; }
    const std::vector<cplx>& b() const { return b_; }
    double condition_number() const { return cond_; }
    std::size_t size() const { return lambda_.size(); }
    bool empty() const { return lambda_.empty(); }

    // sum |b_n / lambda_n|^2, the D(A*)' norm of B on the truncation
    double dual_norm_squared() const;
    // first n modes
    DiagonalSystem truncated(std::size_t n) const;
    DiagonalSystem conjugated() const;

private:
    std::vector<cplx> lambda_;
    std::vector<cplx> b_;
    double cond_ = 1.0;
};

}  // namespace volterra
