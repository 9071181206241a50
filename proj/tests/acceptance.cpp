#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "volterra/admissibility.hpp"
#include "volterra/carleson.hpp"
#include "volterra/controllability.hpp"
#include "volterra/heat_examples.hpp"
#include "volterra/quadrature.hpp"
#include "volterra/resolvent.hpp"
#include "volterra/simulate.hpp"

using namespace volterra;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

std::vector<double> uniform(double T, int K) {
    std::vector<double> t(K + 1);
    for (int i = 0; i <= K; ++i) t[i] = T * i / K;
    return t;
}

cplx integrate_half_line(const std::function<cplx(double)>& f) {
    return quad::integrate<cplx>(f, 0.0, 1.0, 1e-15, 1e-12).value +
           quad::integrate_to_infinity<cplx>(f, 1.0, 1e-15, 1e-12).value;
}

Outcome resolvent_identity() {
    const std::vector<Kernel> kernels = {Kernel::exponential(1.0, 1.0), Kernel::power(0.5), Kernel::power(1.0),
                                         Kernel::power(1.5)};
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const auto grid = uniform(5.0, 5000);
    double worst = 0.0;
    for (const auto& k : kernels)
        for (double ln : {-1.0, -4.0, -pi2}) {
            ScalarResolvent c(k, ln);
            worst = std::max(worst, resolvent_residual(k, ln, [&](double t) { return c(t); }, grid).max);
        }
    return {worst < 1e-6, fmt("max residual %.3e over 12 cases (limit 1e-6)", worst)};
}

Outcome inversion_vs_closed_form() {
    struct P {
        double ln, xi, s;
    };
    const P sets[] = {{-1.0, 1.0, 1.0}, {-1.0, 1.0, 0.0}, {-2.0, 0.5, 3.0}, {-9.87, 2.0, 1.0}, {-0.3, 1.0, 0.5}};
    const InversionOptions inv;
    double worst_e = 0.0;
    for (const auto& p : sets) {
        ScalarResolvent inverted(Kernel::exponential(p.xi, p.s), p.ln, ResolventMethod::numeric_inversion, inv);
        for (double t : log_spaced(0.1, 10.0, 25)) {
            const cplx exact = c_exponential(p.ln, p.xi, p.s, t);
            const cplx num = inverted(t);
            worst_e = std::max(worst_e, std::abs(num - exact) / std::abs(exact));
        }
    }
    // E_beta(-x) with beta > 1 has real zeros, so the error is measured relative to max|c_n| on the grid
    double worst_p = 0.0;
    for (double beta : {0.5, 0.8, 1.2})
        for (double ln : {-1.0, -4.0}) {
            ScalarResolvent inverted(Kernel::power(beta), ln, ResolventMethod::numeric_inversion, inv);
            const auto ts = log_spaced(0.1, 10.0, 25);
            std::vector<cplx> exact(ts.size()), num(ts.size());
            double scale = 0.0;
            for (std::size_t i = 0; i < ts.size(); ++i) {
                exact[i] = c_power(ln, beta, ts[i]);
                num[i] = inverted(ts[i]);
                scale = std::max(scale, std::abs(exact[i]));
            }
            for (std::size_t i = 0; i < ts.size(); ++i)
                worst_p = std::max(worst_p, std::abs(num[i] - exact[i]) / std::max(std::abs(exact[i]), scale));
        }
    return {worst_e < 1e-6 && worst_p < 1e-5,
            fmt("exponential kernel rel err %.2e (limit 1e-6), Mittag-Leffler rel err %.2e (limit 1e-5)", worst_e, worst_p)};
}

Outcome mittag_leffler_identities() {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> r(0.0, 3.0), th(-std::numbers::pi, std::numbers::pi);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const cplx z = std::polar(r(rng), th(rng));
        worst = std::max(worst, std::abs(mittag_leffler(1.0, z) - std::exp(z)));
    }
    const double half = mittag_leffler(0.5, -1.0).real();
    const double oracle = std::exp(1.0) * std::erfc(1.0);
    return {worst < 1e-10 && std::abs(half - oracle) < 1e-5 && std::abs(half - 0.427584) < 1e-5,
            fmt("max |E_1(z)-e^z| %.2e; E_1/2(-1) = %.9f (erfc oracle %.9f)", worst, half, oracle)};
}

Outcome frame_normalization() {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> re(0.05, 20.0), im(-30.0, 30.0);
    double worst_norm = 0.0;
    for (int i = 0; i < 20; ++i) {
        const cplx lam(re(rng), im(rng));
        auto f = [&](double t) { return cplx(std::norm(frame_input(lam, t))); };
        worst_norm = std::max(worst_norm, std::abs(std::sqrt(integrate_half_line(f).real()) - 1.0));
    }
    std::uniform_real_distribution<double> lre(0.5, 3.0), lim(-3.0, 3.0), nre(-5.0, -0.5);
    const Kernel kernels[] = {Kernel::cauchy(), Kernel::power(0.7), Kernel::exponential(1.0, 1.0), Kernel::power(1.3)};
    double worst_g = 0.0;
    for (int i = 0; i < 10; ++i) {
        const Kernel& k = kernels[i % 4];
        const cplx lam(lre(rng), lim(rng));
        const cplx ln(nre(rng), i % 2 ? lim(rng) : 0.0);
        ScalarResolvent c(k, ln);
        const cplx q = integrate_half_line([&](double t) { return frame_input(lam, t) * c(t); });
        worst_g = std::max(worst_g, std::abs(q - g_function(lam, -ln, k)));
    }
    return {worst_norm < 1e-8 && worst_g < 1e-6,
            fmt("max | ||u_lambda|| - 1 | %.2e over 20; max |g - int u c| %.2e over 10", worst_norm, worst_g)};
}

Outcome b_infinity_consistency() {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> wre(0.5, 4.0), wim(-4.0, 4.0), lre(-6.0, -0.2), lim(-4.0, 4.0), bb(-1.0, 1.0);
    std::uniform_int_distribution<int> nn(1, 8);
    const Kernel kernels[] = {Kernel::cauchy(), Kernel::exponential(1.0, 1.0), Kernel::power(0.7)};
    double worst = 0.0, worst_explicit = 0.0;
    for (int i = 0; i < 10; ++i) {
        const int N = nn(rng);
        std::vector<cplx> l, b;
        for (int n = 0; n < N; ++n) {
            l.emplace_back(lre(rng), lim(rng));
            b.emplace_back(bb(rng), bb(rng));
        }
        DiagonalSystem sys(l, b);
        const cplx w(wre(rng), wim(rng));
        for (const auto& k : kernels) {
            auto exact = action_on_exponential(sys, k, w);
            auto num = b_infinity_numeric(sys, k, ScalarSignal::exponential(w), 60.0);
            for (int n = 0; n < N; ++n)
                worst = std::max(worst, std::abs(num.coefficients[n] - exact.coefficients[n]) /
                                            std::max(std::abs(exact.coefficients[n]), 1e-300));
            if (std::holds_alternative<ExponentialKernel>(k.variant())) {
                auto ex = b_infinity_exponential(sys, 1.0, 1.0, [&](cplx z) { return 1.0 / (z + w); });
                for (int n = 0; n < N; ++n) {
                    const double scale = std::max(std::abs(exact.coefficients[n]), 1e-300);
                    worst_explicit = std::max(worst_explicit, std::abs(ex.coefficients[n] - exact.coefficients[n]) / scale);
                    worst_explicit = std::max(worst_explicit, std::abs(ex.coefficients[n] - num.coefficients[n]) / scale);
                }
            }
        }
    }
    return {worst < 1e-3 && worst_explicit < 1e-3,
            fmt("action vs numeric rel %.2e; explicit exponential-kernel formula rel %.2e (limit 1e-3)", worst,
                worst_explicit)};
}

Outcome necessary_oracle() {
    auto r = necessary_condition_sup(DiagonalSystem({-1.0}, {1.0}), Kernel::cauchy());
    const double sup = r.constant("necessary_sup");
    const cplx at = r.witnesses.at("sup_at");
    return {r.verdict == Verdict::pass && std::abs(sup - 0.25) <= 1e-3 && std::abs(at - 1.0) <= 0.05,
            fmt("sup %.8f at (%.4f, %.4f), verdict " , sup, at.real(), at.imag()) + to_string(r.verdict)};
}

Outcome heat_scaling() {
    double worst = 0.0;
    const double alphas[] = {0.0, 1.0 / 3.0, 2.0 / 3.0};
    for (double a : alphas)
        for (double d : {0.1, 0.25, 0.5}) {
            HeatSystemSpec s;
            s.alpha = a;
            s.delta = d;
            s.N = 10000;
            auto e = carleson_scaling_experiment(s, log_spaced(1e2, 1e6, 200));
            worst = std::max(worst, std::abs(e.slope - ((1 + a) * (1 + 2 * d) / 2 - 1)));
        }
    bool flips = true;
    std::string seen;
    for (double a : alphas) {
        const double thr = dirichlet_threshold(a);
        for (double d : {thr - 0.1, thr + 0.1}) {
            HeatSystemSpec s;
            s.alpha = a;
            s.delta = d;
            s.N = 256;
            const auto m = heat_system(s);
            auto [b1, b2] = default_window(m.beta);
            const Verdict v = sufficient_condition(m.system, m.kernel, m.beta, b1, b2).verdict;
            s.N = 10000;
            const bool bounded = carleson_scaling_experiment(s, log_spaced(1e2, 1e6, 200)).bounded;
            const bool below = d < thr;
            flips = flips && (v == (below ? Verdict::pass : Verdict::fail)) && bounded == below;
            seen += std::string(to_string(v)) + (bounded ? "/bounded " : "/unbounded ");
        }
    }
    return {worst <= 0.05 && flips, fmt("max slope deviation %.4f (limit 0.05); threshold -+0.1 verdicts: ", worst) + seen};
}

Outcome carleson_oracles() {
    const double one = geometric_carleson_constant(DiscreteMeasure({{1.0, 1.0}}), 1.0).constant;
    std::vector<Atom> dy;
    for (int j = 0; j <= 3; ++j) dy.push_back({std::ldexp(1.0, -j), 1.0});
    const double eight = geometric_carleson_constant(DiscreteMeasure(dy), 1.0, 10.0).constant;
    const double zero = geometric_carleson_constant(DiscreteMeasure(), 1.0).constant;

    std::mt19937 rng(99);
    std::uniform_real_distribution<double> re(0.01, 10.0), im(-10.0, 10.0), ms(0.1, 5.0), gm(0.5, 3.0);
    std::uniform_int_distribution<int> na(1, 12);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        std::vector<Atom> atoms;
        const int n = na(rng);
        for (int j = 0; j < n; ++j) atoms.push_back({cplx(re(rng), im(rng)), ms(rng)});
        const double gamma = gm(rng);
        const double base = geometric_carleson_constant(DiscreteMeasure(atoms), gamma).constant;
        for (double c : {0.5, 2.0, 10.0}) {
            auto dil = atoms;
            for (auto& a : dil) a.z *= c;
            const double cd = geometric_carleson_constant(DiscreteMeasure(dil), gamma).constant;
            worst = std::max(worst, std::abs(cd - base / c) / (base / c));
        }
        const double m = ms(rng);
        auto heavy = atoms;
        for (auto& a : heavy) a.mass *= m;
        const double ch = geometric_carleson_constant(DiscreteMeasure(heavy), gamma).constant;
        worst = std::max(worst, std::abs(ch - std::pow(m, gamma) * base) / (std::pow(m, gamma) * base));
    }
    return {one == 1.0 && eight == 8.0 && zero == 0.0 && worst < 1e-13,
            fmt("single %.17g, dyadic %.17g, empty %.17g", one, eight, zero) +
                fmt("; max relative identity defect %.2e over 50 measures", worst)};
}

Outcome blaschke() {
    DiagonalSystem two({-1.0, -2.0}, {1.0, 1.0});
    const double e1 = blaschke_weight(0, two, 1.0, 0.0, 8).value;
    const double e2 = blaschke_weight(0, two, 2.0, 0.0, 8).value;
    std::vector<cplx> l, b;
    for (int n = 1; n <= 50; ++n) {
        l.emplace_back(-double(n) * n * std::numbers::pi * std::numbers::pi);
        b.emplace_back(1.0);
    }
    DiagonalSystem rod(l, b);
    double worst = 0.0;
    for (std::size_t n = 0; n < rod.size(); ++n) worst = std::max(worst, blaschke_weight(n, rod, 1.0, 0.0, 2000).increment);
    return {std::abs(e1 - 1.0 / 3.0) < 1e-15 && std::abs(e2 - 1.0 / 3.0) < 1e-15 && worst < 1e-6,
            fmt("eps_1 = %.16f (xi=1), %.16f (xi=2); max |d log eps_n| at K 2000->4000: %.2e", e1, e2, worst)};
}

Outcome controllability_verdicts() {
    DiagonalSystem single({-1.0}, {1.0});
    const double c1 = mcphail_verdict(exact_controllability_measure(single, 1.0, 0.0, 8)).constant("constant");
    const auto ex = exact_controllability_measure(single, 1.0, 0.0, 8);
    const auto nu = null_controllability_measure(single, 1.0, 0.0, 1.0, 8);
    const double factor = nu.atoms[0].mass / ex.atoms[0].mass;

    std::vector<cplx> l, b;
    for (int n = 1; n <= 64; ++n) {
        l.emplace_back(-double(n) * n);
        b.emplace_back(std::pow(double(n), 0.25));
    }
    DiagonalSystem sys(l, b);
    bool stable = true;
    AnalysisReport ref;
    for (int threads : {1, 2, 4}) {
        McPhailOptions o;
        o.threads = threads;
        auto r = mcphail_verdict(exact_controllability_measure(sys, 1.0, 0.0, 2000, threads), o);
        if (threads == 1)
            ref = r;
        else
            stable = stable && r.verdict == ref.verdict && r.diagnostics == ref.diagnostics && r.constants == ref.constants;
    }
    return {c1 == 1.0 && std::abs(factor - std::exp(-2.0)) <= 1e-12 && stable,
            fmt("single-mode constant %.17g; null factor %.15f vs e^-2 %.15f", c1, factor, std::exp(-2.0)) +
                "; trend under 1/2/4 threads " + (stable ? "identical" : "differs") + " (" + to_string(ref.verdict) + ")"};
}

Outcome reflection_duality() {
    DiagonalSystem sys({-1.0, cplx(-2.0, 5.0), -10.0, -0.5}, {1.0, cplx(0.3, -0.4), 2.0, 0.7});
    const Kernel kernels[] = {Kernel::cauchy(), Kernel::power(0.7), Kernel::exponential(1.0, 1.0)};
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const double b = 1.0 + 0.3 * i;
        const double f = 1.0 + i;
        auto u = ScalarSignal::function([=](double t) { return cplx(std::sin(f * t), std::cos(0.5 * f * t) * t); }, b);
        const Kernel& k = kernels[i % 3];
        auto state = simulate_state(sys, k, {}, u, {b, 64});
        auto binf = b_infinity_numeric(sys, k, u.reflected(b), 60.0);
        worst = std::max(worst, std::abs(binf.norm() - state.state_norm.back()));
    }
    return {worst < 1e-8, fmt("max | ||B_inf u_reflected|| - ||x(b)|| | = %.2e over 10 inputs (limit 1e-8)", worst)};
}

}  // namespace

int main() {
    criterion(1, "resolvent identity", resolvent_identity);
    criterion(2, "Laplace inversion vs closed forms", inversion_vs_closed_form);
    criterion(3, "Mittag-Leffler identities", mittag_leffler_identities);
    criterion(4, "frame normalization and g", frame_normalization);
    criterion(5, "B_inf consistency", b_infinity_consistency);
    criterion(6, "necessary-condition oracle", necessary_oracle);
    criterion(7, "heat-rod scaling law and threshold", heat_scaling);
    criterion(8, "Carleson oracles and identities", carleson_oracles);
    criterion(9, "Blaschke weights", blaschke);
    criterion(10, "controllability verdicts", controllability_verdicts);
    criterion(11, "duality by reflection", reflection_duality);
    std::printf("%d/11 criteria passed\n", 11 - failures);
    return failures;
}
