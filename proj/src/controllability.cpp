#include "volterra/controllability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "volterra/errors.hpp"
#include "volterra/parallel.hpp"
#include "volterra/resolvent.hpp"

namespace volterra {

namespace {

std::vector<std::size_t> modulus_order(const DiagonalSystem& sys) {
    std::vector<std::size_t> idx(sys.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const auto& l = sys.eigenvalues();
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return std::abs(l[a]) < std::abs(l[b]); });
    return idx;
}

DiagonalSystem modulus_prefix(const DiagonalSystem& sys, std::size_t m) {
    const auto order = modulus_order(sys);
    std::vector<cplx> l, b;
    for (std::size_t i = 0; i < m && i < order.size(); ++i) {
        l.push_back(sys.eigenvalues()[order[i]]);
        b.push_back(sys.b()[order[i]]);
    }
    return DiagonalSystem(l, b, sys.condition_number());
}

BlaschkeWeight weight_in_order(std::size_t n, const DiagonalSystem& sys, const std::vector<std::size_t>& order,
                               const std::vector<std::size_t>& rank, double xi, double s, std::size_t K) {
    const auto& l = sys.eigenvalues();
    const cplx ln = l[n];
    const std::size_t r = rank[n];
    const std::size_t lo = r > 2 * K ? r - 2 * K : 0;
    const std::size_t hi = std::min(order.size() - 1, r + 2 * K);
    long double logK = 0.0L, log2K = 0.0L;
    int used = 0;
    for (std::size_t q = lo; q <= hi; ++q) {
        if (q == r) continue;
        const cplx lk = l[order[q]];
        const cplx num = xi * (ln - lk);
        const cplx den = 2.0 * s - xi * (ln + std::conj(lk));
        if (std::abs(den) <= 1e-14 * std::max(1.0, std::abs(xi) * (std::abs(ln) + std::abs(lk)) + 2.0 * std::abs(s)))
            throw PoleError("blaschke_weight: zero denominator 2s = xi (lambda_n + conj lambda_k)");
        const long double f = std::log(static_cast<long double>(std::abs(num))) -
                              std::log(static_cast<long double>(std::abs(den)));
        log2K += f;
        const std::size_t d = q > r ? q - r : r - q;
        if (d <= K) {
            logK += f;
            ++used;
        }
    }
    BlaschkeWeight w;
    w.log_value = static_cast<double>(logK);
    w.increment = static_cast<double>(std::fabs(log2K - logK));
    w.neighbours = used;
    w.underflow = w.log_value < std::log(1e-300);
    w.value = w.underflow ? 0.0 : std::exp(w.log_value);
    return w;
}

std::vector<std::size_t> ranks(const std::vector<std::size_t>& order) {
    std::vector<std::size_t> rank(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
    return rank;
}

ControllabilityMeasure build_measure(ControllabilityKind kind, const DiagonalSystem& sys, double xi, double s,
                                     double tau, std::size_t K, int threads) {
    if (xi == 0.0 || !std::isfinite(xi)) throw DomainError("controllability: xi must be a nonzero real");
    if (!(s >= 0.0)) throw DomainError("controllability: s must be >= 0");
    if (K < 1) throw DomainError("controllability: product truncation K must be >= 1");
    const std::size_t N = sys.size();
    for (std::size_t n = 0; n < N; ++n) {
        const cplx p = sys.eigenvalues()[n] * xi;
        if (std::abs(p - s) < 1e-14 * std::max(1.0, std::abs(p))) throw DomainError("excluded mode: lambda_n xi = s");
        if (sys.b()[n] == 0.0)
            throw StructuralError("mode unreachable: b_" + std::to_string(n + 1) + " = 0");
        if (!((s - p).real() > 0.0))
            throw StructuralError("mode unreachable: Re(s - lambda_" + std::to_string(n + 1) + " xi) <= 0");
    }
    ControllabilityMeasure cm;
    cm.kind = kind;
    cm.system = sys;
    cm.xi = xi;
    cm.s = s;
    cm.tau = tau;
    cm.K = K;
    if (xi < 0.0) cm.notes.push_back("xi < 0: outside the resolvent-positivity setting");
    const auto order = modulus_order(sys);
    const auto rank = ranks(order);
    cm.epsilons.resize(N);
    cm.atoms.resize(N);
    cm.log_masses.resize(N);
    parallel_for(
        N,
        [&](std::size_t n) {
            const cplx ln = sys.eigenvalues()[n];
            const cplx p = ln * xi;
            const cplx z = s - p;
            auto w = weight_in_order(n, sys, order, rank, xi, s, K);
            double lm = 2.0 * std::log(z.real()) + 2.0 * std::log(std::abs(p - s)) - 2.0 * w.log_value -
                        2.0 * std::log(std::abs(sys.b()[n])) - 2.0 * std::log(std::abs(p));
            if (kind == ControllabilityKind::null) lm += 2.0 * std::log(std::abs(c_exponential(ln, xi, s, tau)));
            cm.epsilons[n] = w;
            cm.log_masses[n] = lm;
            cm.atoms[n] = {z, std::exp(lm)};
        },
        threads);
    return cm;
}

}  // namespace

BlaschkeWeight blaschke_weight(std::size_t n, const DiagonalSystem& sys, double xi, double s, std::size_t K) {
    if (n >= sys.size()) throw DomainError("blaschke_weight: mode index out of range");
    const auto order = modulus_order(sys);
    return weight_in_order(n, sys, order, ranks(order), xi, s, K);
}

BlaschkeWeight converged_blaschke_weight(std::size_t n, const DiagonalSystem& sys, double xi, double s, std::size_t K0,
                                         double tol) {
    std::size_t K = std::max<std::size_t>(K0, 1);
    for (;;) {
        auto w = blaschke_weight(n, sys, xi, s, K);
        if (w.increment < tol || K >= sys.size()) return w;
        K *= 2;
    }
}

bool ControllabilityMeasure::representable() const {
    for (const auto& a : atoms)
        if (!std::isfinite(a.mass)) return false;
    return true;
}

DiscreteMeasure ControllabilityMeasure::measure() const {
    if (!representable()) throw DomainError("controllability measure has masses beyond double range");
    return DiscreteMeasure::merged(atoms);
}

ControllabilityMeasure exact_controllability_measure(const DiagonalSystem& sys, double xi, double s, std::size_t K,
                                                     int threads) {
    return build_measure(ControllabilityKind::exact, sys, xi, s, 0.0, K, threads);
}

ControllabilityMeasure null_controllability_measure(const DiagonalSystem& sys, double xi, double s, double tau,
                                                    std::size_t K, int threads) {
    if (!(tau > 0.0)) throw DomainError("null controllability needs tau > 0");
    return build_measure(ControllabilityKind::null, sys, xi, s, tau, K, threads);
}

ExplicitBInfinity b_infinity_exponential(const DiagonalSystem& sys, double xi, double s, const LaplaceInput& u_hat) {
    ExplicitBInfinity out;
    out.coefficients.assign(sys.size(), 0.0);
    bool need_zero = false;
    cplx u0 = 0.0;
    for (std::size_t n = 0; n < sys.size(); ++n) {
        const cplx p = sys.eigenvalues()[n] * xi;
        if (std::abs(p - s) < 1e-14 * std::max(1.0, std::abs(p))) throw DomainError("excluded mode: lambda_n xi = s");
        const cplx z = s - p;
        if (!(z.real() > 0.0)) {
            out.excluded.push_back(n);
            continue;
        }
        // c_n(t) = s/(s - p) + p/(p - s) e^{-(s - p) t}
        cplx v = u_hat(z) * p / (p - s);
        if (s != 0.0) {
            if (!need_zero) {
                u0 = u_hat(0.0);
                need_zero = true;
            }
            v += s * u0 / z;
        }
        out.coefficients[n] = sys.b()[n] * v;
    }
    return out;
}

std::vector<cplx> b_infinity_sqrt_kernel(const DiagonalSystem& sys, const LaplaceInput& v) {
    std::vector<cplx> out(sys.size());
    for (std::size_t n = 0; n < sys.size(); ++n) out[n] = 2.0 * sys.b()[n] * v(sys.eigenvalues()[n]);
    return out;
}

namespace {

void finish_trends(AnalysisReport& r, const std::vector<double>& n_values, const std::vector<double>& k_values,
                   double tol) {
    Verdict nv = Verdict::pass, kv = Verdict::pass;
    r.diagnostics["N_doubling_ratio"] = 1.0;
    r.diagnostics["K_doubling_ratio"] = 1.0;
    if (n_values.size() > 1) {
        auto t = classify_doubling(n_values, tol);
        nv = t.verdict;
        if (std::isfinite(t.ratios.back())) r.diagnostics["N_doubling_ratio"] = t.ratios.back();
        r.notes.push_back(std::string("N-doubling trend: ") + to_string(nv));
    } else {
        r.notes.push_back("finite measure: no truncation trend");
    }
    if (k_values.size() > 1) {
        auto t = classify_doubling(k_values, tol);
        kv = t.verdict;
        if (std::isfinite(t.ratios.back())) r.diagnostics["K_doubling_ratio"] = t.ratios.back();
        r.notes.push_back(std::string("K-doubling trend: ") + to_string(kv));
    }
    r.verdict = nv == Verdict::fail ? Verdict::fail : combine({nv, kv});
}

double constant_of(const ControllabilityMeasure& cm) {
    if (!cm.representable()) return std::numeric_limits<double>::infinity();
    return geometric_carleson_constant(cm.measure(), 1.0).constant;
}

}  // namespace

AnalysisReport mcphail_verdict(const ControllabilityMeasure& cm, const McPhailOptions& opts) {
    AnalysisReport r;
    r.notes = cm.notes;
    const std::size_t N = cm.N();
    if (N == 0) {
        r.set_constant("constant", 0.0);
        r.verdict = Verdict::pass;
        r.notes.push_back("empty measure");
        return r;
    }
    double eps_min = 1.0, log_min = 0.0;
    for (const auto& e : cm.epsilons) {
        eps_min = std::min(eps_min, e.value);
        log_min = std::min(log_min, e.log_value);
    }
    r.set_constant("epsilon_min", eps_min);
    r.diagnostics["epsilon_log_min"] = log_min;
    if (!cm.representable()) {
        r.verdict = Verdict::fail;
        double lm = 0.0;
        for (double v : cm.log_masses) lm = std::max(lm, v);
        r.diagnostics["log_max_mass"] = lm;
        r.notes.push_back("masses overflow double range (epsilon_n underflow): constant unbounded");
        return r;
    }
    const auto mu = cm.measure();
    auto c = geometric_carleson_constant(mu, 1.0);
    r.set_constant("constant", c.constant);
    r.witnesses["witness"] = cplx(c.witness.h, c.witness.omega);

    auto rebuild = [&](const DiagonalSystem& sys, std::size_t K) {
        return cm.kind == ControllabilityKind::exact
                   ? exact_controllability_measure(sys, cm.xi, cm.s, K, 1)
                   : null_controllability_measure(sys, cm.xi, cm.s, cm.tau, K, 1);
    };
    std::vector<double> n_values, k_values;
    if (N >= opts.min_trend_size) {
        std::vector<double> v(2);
        parallel_for(
            2, [&](std::size_t i) { v[i] = constant_of(rebuild(modulus_prefix(cm.system, N / (i ? 2 : 4)), cm.K)); },
            opts.threads);
        n_values = {v[0], v[1], c.constant};
    }
    if (cm.K >= 4) {
        std::vector<double> v(2);
        parallel_for(
            2, [&](std::size_t i) { v[i] = constant_of(rebuild(cm.system, cm.K / (i ? 2 : 4))); }, opts.threads);
        k_values = {v[0], v[1], c.constant};
    }
    finish_trends(r, n_values, k_values, opts.trend_tol);
    return r;
}

AnalysisReport mcphail_verdict(const DiscreteMeasure& mu, const McPhailOptions& opts) {
    AnalysisReport r;
    if (mu.empty()) {
        r.set_constant("constant", 0.0);
        r.verdict = Verdict::pass;
        r.notes.push_back("empty measure");
        return r;
    }
    auto atoms = mu.atoms();
    std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return std::abs(a.z) < std::abs(b.z); });
    auto c = geometric_carleson_constant(mu, 1.0);
    r.set_constant("constant", c.constant);
    r.witnesses["witness"] = cplx(c.witness.h, c.witness.omega);
    std::vector<double> n_values;
    const std::size_t N = atoms.size();
    if (N >= opts.min_trend_size) {
        for (std::size_t m : {N / 4, N / 2})
            n_values.push_back(
                geometric_carleson_constant(DiscreteMeasure(std::vector<Atom>(atoms.begin(), atoms.begin() + m)), 1.0)
                    .constant);
        n_values.push_back(c.constant);
    }
    finish_trends(r, n_values, {}, opts.trend_tol);
    return r;
}

}  // namespace volterra
