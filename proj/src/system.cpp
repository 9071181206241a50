#include "volterra/system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "volterra/errors.hpp"

namespace volterra {

DiagonalSystem::DiagonalSystem(std::vector<cplx> eigenvalues, std::vector<cplx> b, double condition_number)
    : lambda_(std::move(eigenvalues)), b_(std::move(b)), cond_(condition_number) {
    if (lambda_.size() != b_.size()) throw DomainError("eigenvalue and control coefficient lists differ in length");
    if (!(cond_ >= 1.0) || !std::isfinite(cond_)) throw DomainError("condition number must be finite and >= 1");
    for (std::size_t i = 0; i < lambda_.size(); ++i) {
        if (!(lambda_[i].real() < 0.0) || !std::isfinite(lambda_[i].imag())) {
            std::ostringstream os;
            os << "eigenvalue " << i << " = " << lambda_[i] << " is not in the open left half-plane";
            throw DomainError(os.str());
        }
        if (!std::isfinite(b_[i].real()) || !std::isfinite(b_[i].imag()))
            throw DomainError("control coefficient " + std::to_string(i) + " is not finite");
    }
    std::vector<cplx> sorted = lambda_;
    auto less = [](cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); };
    std::sort(sorted.begin(), sorted.end(), less);
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] == sorted[i - 1]) throw DomainError("eigenvalues must be pairwise distinct");
}

double DiagonalSystem::dual_norm_squared() const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += std::norm(b_[i] / lambda_[i]);
    return s;
}

DiagonalSystem DiagonalSystem::truncated(std::size_t n) const {
    n = std::min(n, size());
    return DiagonalSystem(std::vector<cplx>(lambda_.begin(), lambda_.begin() + n),
                          std::vector<cplx>(b_.begin(), b_.begin() + n), cond_);
}

DiagonalSystem DiagonalSystem::conjugated() const {
    std::vector<cplx> l, b;
    for (auto v : lambda_) l.push_back(std::conj(v));
    for (auto v : b_) b.push_back(std::conj(v));
    return DiagonalSystem(l, b, cond_);
}

}  // namespace volterra
