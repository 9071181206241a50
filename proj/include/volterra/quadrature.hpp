#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <valarray>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "volterra/errors.hpp"

namespace volterra::quad {

using cvec = std::valarray<std::complex<double>>;

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
inline double magnitude(const cvec& v) {
    double m = 0.0;
    for (const auto& x : v) m = std::max(m, std::abs(x));
    return m;
}

template <class V>
struct Result {
    V value;
    double error = 0.0;
    int evaluations = 0;
};

// full symmetric Gauss-Legendre rule on [-1, 1]
template <int N>
struct GaussRule {
    std::array<double, N> x{};
    std::array<double, N> w{};
    GaussRule() {
        const auto& a = boost::math::quadrature::gauss<double, N>::abscissa();
        const auto& b = boost::math::quadrature::gauss<double, N>::weights();
        int k = 0;
        const int half = static_cast<int>(a.size());
        for (int i = half - 1; i >= 0; --i) {
            if (a[i] == 0.0) continue;
            x[k] = -a[i];
            w[k++] = b[i];
        }
        for (int i = 0; i < half; ++i) {
            x[k] = a[i];
            w[k++] = b[i];
        }
    }
};

template <int N>
const GaussRule<N>& gauss_rule() {
    static const GaussRule<N> r;
    return r;
}

namespace detail {

template <class V>
struct Segment {
    double a, b;
    V value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F, class V>
Segment<V> gk15(F& f, double a, double b) {
    using boost::math::quadrature::gauss_kronrod;
    using boost::math::quadrature::gauss;
    static const auto& xk = gauss_kronrod<double, 15>::abscissa();
    static const auto& wk = gauss_kronrod<double, 15>::weights();
    static const auto& wg = gauss<double, 7>::weights();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    V f0 = f(c);
    V kron = f0 * wk[0];
    V g = f0 * wg[0];
    for (int i = 1; i < 8; ++i) {
        V fp = f(c + h * xk[i]);
        V fm = f(c - h * xk[i]);
        V s = fp + fm;
        kron = kron + s * wk[i];
        if (i % 2 == 0) g = g + s * wg[i / 2];
    }
    kron = kron * h;
    g = g * h;
    V diff = kron - g;
    return {a, b, kron, magnitude(diff)};
}

}  // namespace detail

// globally adaptive Gauss-Kronrod (7, 15) on a finite interval
template <class V, class F>
Result<V> integrate(F f, double a, double b, double abs_tol = 1e-12, double rel_tol = 1e-10,
                    int max_segments = 4000) {
    if (a == b) {
        auto z = f(a);
        return {z * 0.0, 0.0, 1};
    }
    std::priority_queue<detail::Segment<V>> heap;
    auto first = detail::gk15<F, V>(f, a, b);
    V total = first.value;
    double err = first.error;
    heap.push(first);
    int segs = 1;
    while (err > std::max(abs_tol, rel_tol * magnitude(total)) && segs < max_segments) {
        auto s = heap.top();
        heap.pop();
        const double m = 0.5 * (s.a + s.b);
        if (m <= s.a || m >= s.b) {
            heap.push(s);
            break;
        }
        auto l = detail::gk15<F, V>(f, s.a, m);
        auto r = detail::gk15<F, V>(f, m, s.b);
        total = total - s.value + l.value + r.value;
        err += l.error + r.error - s.error;
        heap.push(l);
        heap.push(r);
        ++segs;
    }
    // recompute from scratch to shed accumulated cancellation
    V sum = heap.top().value * 0.0;
    double e = 0.0;
    while (!heap.empty()) {
        sum = sum + heap.top().value;
        e += heap.top().error;
        heap.pop();
    }
    return {sum, e, 15 * (2 * segs - 1)};
}

// integral over [a, inf) through t = a + x/(1-x)
template <class V, class F>
Result<V> integrate_to_infinity(F f, double a, double abs_tol = 1e-12, double rel_tol = 1e-10,
                                int max_segments = 4000) {
    auto g = [&](double x) {
        const double one_minus = 1.0 - x;
        if (one_minus <= 0.0) return f(a) * 0.0;
        const double t = a + x / one_minus;
        return f(t) * (1.0 / (one_minus * one_minus));
    };
    return integrate<V>(g, 0.0, 1.0, abs_tol, rel_tol, max_segments);
}

}  // namespace volterra::quad
