#include "volterra/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "volterra/errors.hpp"
#include "volterra/parallel.hpp"
#include "volterra/quadrature.hpp"

namespace volterra {

DiscreteMeasure system_measure(const DiagonalSystem& sys) {
    std::vector<Atom> atoms;
    atoms.reserve(sys.size());
    for (std::size_t n = 0; n < sys.size(); ++n) atoms.push_back({-sys.eigenvalues()[n], std::norm(sys.b()[n])});
    return DiscreteMeasure::merged(std::move(atoms));
}

double necessary_functional(const DiagonalSystem& sys, const Kernel& k, cplx lambda, double omega) {
    const cplx a = laplace_transform(k, lambda);
    const double l2 = std::norm(lambda);
    double s = 0.0;
    for (std::size_t n = 0; n < sys.size(); ++n) {
        const double bn = std::norm(sys.b()[n]);
        if (bn == 0.0) continue;
        const double d = std::norm(1.0 - a * sys.eigenvalues()[n]);
        if (d < 1e-28) throw PoleError("necessary condition: 1 - a_hat(lambda) lambda_n vanishes");
        s += bn / (l2 * d);
    }
    return (lambda.real() - omega) * s;
}

namespace {

struct SupResult {
    double value = 0.0;
    cplx at = 0.0;
    bool boundary = false;
};

SupResult grid_sup(const DiagonalSystem& sys, const Kernel& k, double omega, int n_re, int n_im, double re_max,
                   double im_max) {
    const double x_lo = 1e-4 * (1.0 + omega), x_hi = re_max;
    const auto xs = log_spaced(x_lo, x_hi, n_re);
    const int half = std::max(1, (n_im - 1) / 2);
    const auto ypos = log_spaced(1e-4, im_max, half);
    std::vector<double> ys{0.0};
    for (double y : ypos) {
        ys.push_back(y);
        ys.push_back(-y);
    }
    auto f = [&](double x, double y) { return necessary_functional(sys, k, cplx(omega + x, y), omega); };

    SupResult best;
    double bx = xs[0], by = 0.0;
    best.value = -1.0;
    for (double x : xs)
        for (double y : ys) {
            const double v = f(x, y);
            if (v > best.value) {
                best.value = v;
                bx = x;
                by = y;
            }
        }
    // pattern search in (log x, y), kept inside the grid box
    double dlx = std::log(x_hi / x_lo) / (n_re - 1);
    double dy = std::max(bx, 1e-4);
    for (int it = 0; it < 600 && dlx > 1e-9; ++it) {
        double nx = bx, ny = by, nv = best.value;
        for (int i = -1; i <= 1; ++i)
            for (int j = -1; j <= 1; ++j) {
                if (!i && !j) continue;
                const double x = std::clamp(bx * std::exp(i * dlx), x_lo, x_hi);
                const double y = std::clamp(by + j * dy, -im_max, im_max);
                const double v = f(x, y);
                if (v > nv) {
                    nv = v;
                    nx = x;
                    ny = y;
                }
            }
        if (nv > best.value) {
            best.value = nv;
            bx = nx;
            by = ny;
        } else {
            dlx *= 0.5;
            dy *= 0.5;
        }
    }
    best.at = cplx(omega + bx, by);
    best.boundary = bx <= x_lo * (1.0 + 1e-9) || bx >= x_hi * (1.0 - 1e-9) || std::abs(by) >= im_max * (1.0 - 1e-9);
    return best;
}

}  // namespace

AnalysisReport necessary_condition_sup(const DiagonalSystem& sys, const Kernel& k, double omega,
                                       const SupGridOptions& opts) {
    if (!(omega >= 0.0)) throw DomainError("necessary condition: omega must be >= 0");
    if (opts.n_re < 2 || opts.n_im < 3) throw DomainError("necessary condition: grid too small");
    AnalysisReport r;
    const double c2 = sys.condition_number() * sys.condition_number();
    bool all_zero = true;
    for (auto b : sys.b()) all_zero = all_zero && b == 0.0;
    if (all_zero) {
        r.set_constant("necessary_sup", 0.0);
        r.verdict = Verdict::pass;
        r.notes.push_back("zero control operator");
        return r;
    }
    auto s1 = grid_sup(sys, k, omega, opts.n_re, opts.n_im, opts.re_max, opts.im_max);
    if (!std::isfinite(s1.value)) {
        r.verdict = Verdict::fail;
        r.notes.push_back("necessary functional is unbounded on the grid");
        return r;
    }
    r.set_constant("necessary_sup", s1.value * c2);
    r.witnesses["sup_at"] = s1.at;
    r.diagnostics["at_boundary"] = s1.boundary ? 1.0 : 0.0;
    r.diagnostics["omega"] = omega;
    bool stable = true;
    if (opts.refine) {
        auto s2 = grid_sup(sys, k, omega, 2 * opts.n_re, 2 * opts.n_im - 1, opts.re_max, opts.im_max);
        const double change = std::abs(s2.value - s1.value) / std::max(s2.value, 1e-300);
        r.diagnostics["refined_sup"] = s2.value * c2;
        r.diagnostics["relative_change"] = change;
        stable = change <= 0.05;
        if (s2.value > s1.value) {
            r.set_constant("necessary_sup", s2.value * c2);
            r.witnesses["sup_at"] = s2.at;
        }
    }
    if (s1.boundary) {
        r.verdict = Verdict::inconclusive;
        r.notes.push_back("sup attained at the edge of the sampled region");
    } else if (!stable) {
        r.verdict = Verdict::inconclusive;
        r.notes.push_back("sup not stable under grid refinement");
    } else {
        r.verdict = Verdict::pass;
    }
    r.notes.push_back("sampled certificate: sup over a log-spaced grid with local refinement");
    if (sys.condition_number() != 1.0) r.notes.push_back("constant scaled by condition_number^2");
    return r;
}

AnalysisReport sufficient_condition(const DiagonalSystem& sys, const Kernel& k, double beta, double beta1,
                                    double beta2, const SufficientOptions& opts) {
    AnalysisReport r;
    if (!(beta > 0.5)) {
        r.verdict = Verdict::inconclusive;
        r.notes.push_back("inconclusive: outside theorem window (beta <= 1/2)");
        return r;
    }
    if (!(beta2 > beta && beta > beta1 && beta1 > std::max(0.5, beta / 3.0))) {
        std::ostringstream os;
        os << "sufficient condition needs beta2 > beta > beta1 > max(1/2, beta/3); got beta1=" << beta1
           << ", beta=" << beta << ", beta2=" << beta2;
        throw DomainError(os.str());
    }
    if (sys.empty()) {
        r.verdict = Verdict::pass;
        r.notes.push_back("empty system: zero operator");
        return r;
    }
    const auto grid = default_grid();

    auto reg = check_one_regular(k, grid);
    r.set_constant("one_regular_c", reg.constant("c"));
    const Verdict reg_v = reg.verdict;
    r.notes.push_back(std::string("one-regular: ") + to_string(reg_v));

    const double half_pi = std::numbers::pi / 2;
    auto sect = check_sectorial(k, half_pi - 1e-6, grid);
    const double angle = sect.constant("max_angle");
    r.set_constant("sector_angle", angle);
    r.witnesses["sector_angle_at"] = sect.witnesses["max_angle_at"];
    double spec_angle = 0.0;
    for (cplx l : sys.eigenvalues()) spec_angle = std::max(spec_angle, std::abs(std::arg(-l)));
    r.diagnostics["spectrum_angle"] = spec_angle;
    Verdict sect_v;
    if (sect.passed()) {
        sect_v = Verdict::pass;
        r.notes.push_back("sectorial: pass (angle < pi/2)");
    } else if (angle + spec_angle < std::numbers::pi - 1e-6) {
        sect_v = Verdict::pass;
        r.notes.push_back("sectorial: pass via parabolic route (kernel angle + spectrum angle < pi)");
    } else {
        sect_v = Verdict::fail;
        r.notes.push_back("sectorial: fail");
    }

    auto g1 = check_growth(k, beta, GrowthDirection::lower, log_spaced(1e-3, 1e6, 91));
    auto g2 = check_growth(k, beta, GrowthDirection::lower, log_spaced(1e-5, 1e8, 131));
    const double gc = g1.constant("constant"), gc2 = g2.constant("constant");
    r.set_constant("growth_const", gc);
    r.diagnostics["growth_const_wide"] = gc2;
    const Verdict growth_v = (gc > 0.0 && gc2 >= 0.5 * gc) ? Verdict::pass : Verdict::fail;
    r.notes.push_back(std::string("growth lower bound: ") + to_string(growth_v));

    const std::size_t N = sys.size();
    std::vector<std::size_t> levels;
    if (N >= opts.min_trend_size)
        levels = {N / 4, N / 2, N};
    else
        levels = {N};
    std::vector<Report> emb(levels.size());
    parallel_for(
        levels.size(),
        [&](std::size_t i) {
            emb[i] = embedding_gamma_carleson(system_measure(sys.truncated(levels[i])), beta, beta1, beta2);
        },
        opts.threads);
    Verdict carl_v = Verdict::pass;
    for (const auto& e : emb)
        if (e.verdict != Verdict::pass) carl_v = e.verdict;
    if (carl_v == Verdict::pass) {
        std::vector<double> c1, c2;
        for (const auto& e : emb) {
            c1.push_back(e.constant("beta1_const"));
            c2.push_back(e.constant("beta2_const"));
        }
        r.set_constant("beta1_const", c1.back());
        r.set_constant("beta2_const", c2.back());
        if (levels.size() > 1) {
            auto t1 = classify_doubling(c1, opts.trend_tol), t2 = classify_doubling(c2, opts.trend_tol);
            r.diagnostics["beta1_doubling_ratio"] = t1.ratios.back();
            r.diagnostics["beta2_doubling_ratio"] = t2.ratios.back();
            carl_v = combine({t1.verdict, t2.verdict});
            r.notes.push_back(std::string("carleson truncation trend: ") + to_string(carl_v));
        } else {
            r.notes.push_back("carleson: finite system, both constants finite");
        }
    } else {
        for (const auto& n : emb.back().notes) r.notes.push_back("carleson: " + n);
    }
    r.verdict = combine({reg_v, sect_v, growth_v, carl_v});
    return r;
}

cplx frame_input(cplx lambda, double t) {
    if (!(lambda.real() > 0.0)) throw DomainError("frame function needs Re lambda > 0");
    return 2.0 * std::pow(lambda.real(), 1.5) * t * std::exp(-lambda * t);
}

cplx frame_lattice(int j, int k) {
    const double s = std::ldexp(1.0, -j);
    return cplx(s, k * s);
}

cplx g_function(cplx lambda, cplx s, const Kernel& k) {
    const cplx a = laplace_transform(k, lambda);
    const cplx da = laplace_derivative(k, lambda);
    const cplx den = lambda + lambda * a * s;
    if (std::abs(den) < 1e-14) throw PoleError("g_function: lambda + lambda a_hat(lambda) s vanishes");
    return 2.0 * std::pow(lambda.real(), 1.5) * (1.0 + a * s + lambda * da * s) / (den * den);
}

double frame_tail_bound(const Kernel& k, double beta, double p1, double p2, int J) {
    if (J < 1) throw DomainError("frame_tail_bound: J must be >= 1");
    const double e1 = 1.0 - 2.0 * beta / p1, e2 = 1.0 - 2.0 * beta / p2;
    const double q1 = 2.0 - beta / p1, q2 = 2.0 - beta / p2;
    if (e1 >= 0.0) throw DomainError("frame_tail_bound: divergent parameters, j >= 0 sum needs 1 - 2 beta/p1 < 0");
    if (e2 <= 0.0) throw DomainError("frame_tail_bound: divergent parameters, j < 0 sum needs 1 - 2 beta/p2 > 0");
    if (q1 <= 0.5 || q2 <= 0.5) throw DomainError("frame_tail_bound: divergent parameters, k-exponent <= 1/2");
    auto g = check_growth(k, beta, GrowthDirection::lower, log_spaced(1e-3, 1e6, 91));
    const double c = g.constant("constant");
    if (!(c > 0.0)) throw DomainError("frame_tail_bound: kernel fails the lower growth bound");

    // j sums are geometric: partial sum plus exact tail
    auto jsum = [&](double ratio) {
        double s = 0.0;
        for (int j = 0; j <= J; ++j) s += std::pow(ratio, j);
        return s + std::pow(ratio, J + 1) / (1.0 - ratio);
    };
    const double sj_pos = jsum(std::exp2(e1));
    const double sj_neg = jsum(std::exp2(-e2)) - 1.0;
    // k sums: partial sum plus midpoint integral tail
    auto ksum = [&](double q) {
        double s = 1.0;
        for (int kk = 1; kk <= J; ++kk) s += 2.0 * std::pow(1.0 + double(kk) * kk, -q);
        auto tail = quad::integrate_to_infinity<double>([&](double x) { return std::pow(1.0 + x * x, -q); }, J + 0.5,
                                                        1e-16, 1e-13);
        return s + 2.0 * tail.value;
    };
    const double c4_1 = std::pow(c, -1.0 / p1), c4_2 = std::pow(c, -1.0 / p2);
    return c4_1 * std::sqrt(sj_pos * ksum(q1)) + c4_2 * std::sqrt(sj_neg * ksum(q2));
}

std::vector<double> reduce_vector_control(const std::vector<std::vector<cplx>>& rows) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        double s = 0.0;
        for (auto v : row) s += std::norm(v);
        out.push_back(std::sqrt(s));
    }
    return out;
}

std::vector<double> reduce_vector_control(const std::vector<double>& row_norms) {
    for (double v : row_norms)
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("row norms must be finite and nonnegative");
    return row_norms;
}

std::vector<ScalarSignal> default_battery(double T, const BatteryOptions& opts) {
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("battery horizon must be positive and finite");
    std::vector<ScalarSignal> out;
    for (auto [j, k] : opts.frame_indices) out.push_back(ScalarSignal::frame(frame_lattice(j, k)).truncated(0.0, T).normalized());
    for (double w : opts.exponential_rates) out.push_back(ScalarSignal::exponential(w).normalized());
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0), phase(0.0, 2 * std::numbers::pi);
    for (int i = 0; i < opts.random_signals; ++i) {
        std::vector<double> a(opts.random_modes), ph(opts.random_modes);
        for (int m = 0; m < opts.random_modes; ++m) {
            a[m] = amp(rng);
            ph[m] = phase(rng);
        }
        auto f = [a, ph, T](double t) {
            cplx s = 0.0;
            for (std::size_t m = 0; m < a.size(); ++m) s += a[m] * std::sin(std::numbers::pi * (m + 1) * t / T + ph[m]);
            return s;
        };
        out.push_back(ScalarSignal::function(f, T, {}, "band-limited #" + std::to_string(i)).normalized());
    }
    return out;
}

AnalysisReport empirical_admissibility(const DiagonalSystem& sys, const Kernel& k, const std::vector<ScalarSignal>& inputs,
                                       double T, const EmpiricalOptions& opts) {
    if (!(T > 0.0)) throw DomainError("empirical admissibility: T must be positive");
    AnalysisReport r;
    std::vector<double> sup(inputs.size(), 0.0), at(inputs.size(), 0.0);
    const ResolventTable table(sys, k, {T, opts.steps}, opts.threads);
    parallel_for(
        inputs.size(),
        [&](std::size_t i) {
            const auto& u = inputs[i];
            if (u.norm() == 0.0) return;
            auto res = simulate_state(table, {}, u.normalized(), 1);
            sup[i] = res.sup_norm;
            at[i] = res.at_t;
        },
        opts.threads);
    double m = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < sup.size(); ++i)
        if (sup[i] > m) {
            m = sup[i];
            worst = i;
        }
    r.set_constant("empirical_M", m * sys.condition_number());
    r.diagnostics["inputs"] = static_cast<double>(inputs.size());
    r.diagnostics["T"] = T;
    if (!inputs.empty() && m > 0.0) {
        r.diagnostics["at_t"] = at[worst];
        r.notes.push_back("worst input: " + inputs[worst].label());
    }
    r.verdict = std::isfinite(m) ? Verdict::pass : Verdict::fail;
    return r;
}

}  // namespace volterra
