#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "volterra/admissibility.hpp"
#include "volterra/errors.hpp"
#include "volterra/quadrature.hpp"
#include "volterra/resolvent.hpp"

using namespace volterra;

namespace {
const double pi = std::numbers::pi;

DiagonalSystem rod(int N, double delta) {
    std::vector<cplx> l, b;
    for (int n = 1; n <= N; ++n) {
        l.emplace_back(-n * n * pi * pi);
        b.emplace_back(std::pow(n, delta));
    }
    return DiagonalSystem(l, b);
}

double l2_norm_quad(cplx lambda) {
    auto f = [&](double t) { return std::norm(frame_input(lambda, t)); };
    return std::sqrt(quad::integrate<double>(f, 0.0, 1.0, 1e-16, 1e-13).value +
                     quad::integrate_to_infinity<double>(f, 1.0, 1e-16, 1e-13).value);
}
}  // namespace

TEST_CASE("system_measure") {
    auto m = system_measure(DiagonalSystem({-1.0}, {2.0}));
    REQUIRE(m.size() == 1);
    CHECK(m.atoms()[0].z == cplx(1.0));
    CHECK(m.atoms()[0].mass == doctest::Approx(4.0));

    auto m2 = system_measure(DiagonalSystem({-1.0, -4.0}, {1.0, 0.0}));
    REQUIRE(m2.size() == 1);
    CHECK(m2.atoms()[0].mass == doctest::Approx(1.0));

    auto m3 = system_measure(rod(3, 0.5));
    REQUIRE(m3.size() == 3);
    for (int n = 1; n <= 3; ++n) {
        bool found = false;
        for (const auto& a : m3.atoms())
            if (std::abs(a.z - cplx(n * n * pi * pi)) < 1e-9) {
                found = true;
                CHECK(a.mass == doctest::Approx(n));
            }
        CHECK(found);
    }
}

TEST_CASE("necessary condition: single Cauchy mode") {
    DiagonalSystem sys({-1.0}, {1.0});
    auto r = necessary_condition_sup(sys, Kernel::cauchy());
    CHECK(r.constant("necessary_sup") == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(std::abs(r.witnesses.at("sup_at") - 1.0) < 0.05);
    CHECK(r.verdict == Verdict::pass);

    // x/(x+1)^2 oracle on a brute-force grid
    double brute = 0.0;
    for (double x = 0.01; x < 10; x += 0.01)
        for (double y = -2; y <= 2; y += 0.05) brute = std::max(brute, necessary_functional(sys, Kernel::cauchy(), cplx(x, y)));
    CHECK(brute <= 0.25 + 1e-12);
    CHECK(brute > 0.2499);

    auto e = necessary_condition_sup(sys, Kernel::exponential(1.0, 0.0));
    CHECK(e.constant("necessary_sup") == doctest::Approx(0.25).epsilon(1e-6));

    auto z = necessary_condition_sup(DiagonalSystem({-1.0, -2.0}, {0.0, 0.0}), Kernel::power(0.5));
    CHECK(z.constant("necessary_sup") == 0.0);
}

TEST_CASE("necessary condition: omega shift and conjugation symmetry") {
    DiagonalSystem sys({cplx(-1.0, 2.0), cplx(-3.0, -1.0), -7.0}, {cplx(1.0, 1.0), 0.5, cplx(0.0, 2.0)});
    for (const Kernel& k : {Kernel::cauchy(), Kernel::power(0.7), Kernel::exponential(2.0, 1.0)}) {
        auto a = necessary_condition_sup(sys, k);
        auto b = necessary_condition_sup(sys.conjugated(), k);
        CHECK(a.constant("necessary_sup") == doctest::Approx(b.constant("necessary_sup")).epsilon(1e-9));
    }
    auto r0 = necessary_condition_sup(sys, Kernel::cauchy(), 0.0);
    auto r1 = necessary_condition_sup(sys, Kernel::cauchy(), 0.5);
    CHECK(r1.witnesses.at("sup_at").real() > 0.5);
    CHECK(r1.constant("necessary_sup") <= r0.constant("necessary_sup") * (1 + 1e-9));
}

TEST_CASE("necessary condition: pole on the sampled region") {
    // lambda^{3/2} = lambda_n at arg lambda = 0.45 pi
    const cplx lam = std::polar(1.0, 0.45 * pi);
    DiagonalSystem sys({std::pow(lam, 1.5)}, {1.0});
    CHECK_THROWS_AS(necessary_functional(sys, Kernel::power(1.5), lam), PoleError);
}

TEST_CASE("sufficient condition: rod examples") {
    auto pass = sufficient_condition(rod(256, 0.3), Kernel::cauchy(), 1.0, 0.7, 1.3);
    CHECK(pass.verdict == Verdict::pass);
    CHECK(pass.constant("one_regular_c") == doctest::Approx(1.0));
    CHECK(pass.constant("growth_const") == doctest::Approx(1.0));
    CHECK(pass.diagnostics.at("beta2_doubling_ratio") <= 1.10);

    auto fail = sufficient_condition(rod(256, 0.6), Kernel::cauchy(), 1.0, 0.7, 1.3);
    CHECK(fail.verdict == Verdict::fail);
    CHECK(fail.diagnostics.at("beta2_doubling_ratio") > 1.10);

    CHECK(sufficient_condition(DiagonalSystem(), Kernel::cauchy(), 1.0, 0.7, 1.3).verdict == Verdict::pass);
}

TEST_CASE("sufficient condition: window") {
    CHECK_THROWS_AS(sufficient_condition(rod(4, 0.3), Kernel::cauchy(), 1.0, 1.1, 1.3), DomainError);
    CHECK_THROWS_AS(sufficient_condition(rod(4, 0.3), Kernel::cauchy(), 1.5, 0.45, 1.6), DomainError);
    CHECK_THROWS_AS(sufficient_condition(rod(4, 0.3), Kernel::cauchy(), 1.0, 0.7, 0.9), DomainError);
    auto r = sufficient_condition(rod(4, 0.3), Kernel::power(0.4), 0.4, 0.3, 0.5);
    CHECK(r.verdict == Verdict::inconclusive);
    CHECK(r.notes.at(0).find("outside theorem window") != std::string::npos);
}

TEST_CASE("sufficient condition: hypothesis failures are reported separately") {
    // exponential kernel with s > 0 has no lower power bound near 0
    auto r = sufficient_condition(rod(16, 0.1), Kernel::exponential(1.0, 1.0), 1.0, 0.7, 1.3);
    CHECK(r.verdict == Verdict::fail);
    bool growth_fail = false;
    for (const auto& n : r.notes) growth_fail = growth_fail || n == "growth lower bound: fail";
    CHECK(growth_fail);
}

TEST_CASE("frame functions") {
    CHECK(frame_input(1.0, 1.0).real() == doctest::Approx(2.0 / std::exp(1.0)));
    CHECK(frame_input(1.0, 1.0).real() == doctest::Approx(0.7357589).epsilon(1e-7));
    CHECK(std::abs(l2_norm_quad(1.0) - 1.0) < 1e-8);
    CHECK(std::abs(l2_norm_quad(cplx(3.0, 7.0)) - 1.0) < 1e-8);
    CHECK(frame_lattice(1, 3) == cplx(0.5, 1.5));
    CHECK(frame_lattice(-2, -1) == cplx(4.0, -4.0));
    CHECK_THROWS_AS(frame_input(cplx(0.0, 1.0), 1.0), DomainError);
}

TEST_CASE("g_function") {
    CHECK(std::abs(g_function(1.0, 1.0, Kernel::cauchy()) - 0.5) < 1e-15);
    for (const Kernel& k : {Kernel::cauchy(), Kernel::power(0.5), Kernel::exponential(3.0, 2.0)})
        CHECK(std::abs(g_function(1.0, 0.0, k) - 2.0) < 1e-15);
    // Cauchy closed form 2 (Re l)^{3/2} / (l + s)^2
    const cplx l(2.0, 1.0), s(0.5, -3.0);
    CHECK(std::abs(g_function(l, s, Kernel::cauchy()) - 2.0 * std::pow(2.0, 1.5) / ((l + s) * (l + s))) < 1e-14);

    // quadrature of u_lambda * c_n against g(-lambda_n)
    const cplx ln = -1.0;
    auto f = [&](double t) { return frame_input(2.0, t) * c_exponential(ln, 1.0, 1.0, t); };
    const cplx q = quad::integrate<cplx>(f, 0.0, 1.0, 1e-15, 1e-12).value +
                   quad::integrate_to_infinity<cplx>(f, 1.0, 1e-15, 1e-12).value;
    CHECK(std::abs(q - g_function(2.0, -ln, Kernel::exponential(1.0, 1.0))) < 1e-6);
}

TEST_CASE("g_function matches numeric B_inf of frame inputs") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> re(0.5, 3.0), im(-3.0, 3.0);
    DiagonalSystem sys({-1.0, cplx(-2.0, 1.5), -5.0}, {1.0, cplx(0.0, 1.0), 0.5});
    for (const Kernel& k : {Kernel::cauchy(), Kernel::power(0.7), Kernel::exponential(1.0, 1.0)}) {
        const cplx lam(re(rng), im(rng));
        auto num = b_infinity_numeric(sys, k, ScalarSignal::frame(lam), 60.0);
        for (std::size_t n = 0; n < sys.size(); ++n)
            CHECK(std::abs(num.coefficients[n] - sys.b()[n] * g_function(lam, -sys.eigenvalues()[n], k)) < 1e-6);
    }
}

TEST_CASE("frame_tail_bound") {
    const double m32 = frame_tail_bound(Kernel::cauchy(), 1.0, 1.4, 2.6, 32);
    const double m64 = frame_tail_bound(Kernel::cauchy(), 1.0, 1.4, 2.6, 64);
    CHECK(std::isfinite(m32));
    CHECK(m32 > 0.0);
    CHECK(std::abs(m64 - m32) / m64 < 1e-6);
    CHECK_THROWS_AS(frame_tail_bound(Kernel::cauchy(), 1.0, 2.0, 2.6), DomainError);
    CHECK_THROWS_AS(frame_tail_bound(Kernel::cauchy(), 1.0, 1.4, 1.8), DomainError);
}

TEST_CASE("reduce_vector_control") {
    CHECK(reduce_vector_control(std::vector<std::vector<cplx>>{{0.0, 3.0, 0.0}})[0] == doctest::Approx(3.0));
    CHECK(reduce_vector_control(std::vector<std::vector<cplx>>{{0.0, 0.0}})[0] == 0.0);
    CHECK(reduce_vector_control(std::vector<std::vector<cplx>>{{3.0, 4.0}})[0] == doctest::Approx(5.0));
    CHECK(reduce_vector_control(std::vector<double>{1.0, 2.0}).size() == 2);
    CHECK_THROWS_AS(reduce_vector_control(std::vector<double>{1.0, -2.0}), DomainError);
}

TEST_CASE("empirical admissibility") {
    DiagonalSystem sys({-1.0}, {1.0});
    auto u = ScalarSignal::exponential(1.0).scaled(std::sqrt(2.0));
    auto r = empirical_admissibility(sys, Kernel::cauchy(), {u}, 10.0);
    CHECK(r.constant("empirical_M") == doctest::Approx(std::sqrt(2.0) / std::exp(1.0)).epsilon(1e-9));

    auto z = empirical_admissibility(DiagonalSystem({-1.0}, {0.0}), Kernel::cauchy(), default_battery(5.0), 5.0);
    CHECK(z.constant("empirical_M") == 0.0);

    const auto battery = default_battery(8.0);
    DiagonalSystem s3({-1.0, -4.0, cplx(-2.0, 3.0)}, {1.0, 1.0, 0.5});
    double prev = 0.0;
    for (double T : {1.0, 2.0, 4.0, 8.0}) {
        EmpiricalOptions o;
        o.steps = static_cast<int>(40 * T);
        auto e = empirical_admissibility(s3, Kernel::power(0.7), battery, T, o);
        CHECK(e.constant("empirical_M") >= prev * (1 - 1e-9));
        prev = e.constant("empirical_M");
    }
}

TEST_CASE("battery signals have unit norm") {
    for (const auto& u : default_battery(6.0)) CHECK(u.norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("reflection duality on the battery") {
    DiagonalSystem sys({-1.0, cplx(-2.0, 4.0), -6.0}, {1.0, 0.5, cplx(0.0, 1.0)});
    const double b = 3.0;
    for (const auto& u : default_battery(b)) {
        if (u.support_end() > b) continue;
        auto conv = simulate_state(sys, Kernel::exponential(1.0, 1.0), {}, u, {b, 96});
        auto binf = b_infinity_numeric(sys, Kernel::exponential(1.0, 1.0), u.reflected(b), 60.0);
        CHECK(std::abs(binf.norm() - conv.state_norm.back()) < 1e-8);
    }
}

TEST_CASE("Cauchy: necessary sup and empirical M grow together above threshold") {
    const auto battery = default_battery(4.0);
    for (int N : {4, 8}) {
        auto a = rod(N, 0.75), b = rod(2 * N, 0.75);
        const double g_nec = necessary_condition_sup(b, Kernel::cauchy()).constant("necessary_sup") /
                             necessary_condition_sup(a, Kernel::cauchy()).constant("necessary_sup");
        const double ma = empirical_admissibility(a, Kernel::cauchy(), battery, 4.0).constant("empirical_M");
        const double mb = empirical_admissibility(b, Kernel::cauchy(), battery, 4.0).constant("empirical_M");
        const double g_emp = (mb * mb) / (ma * ma);
        CHECK(g_nec >= 1.0);
        CHECK(g_emp >= 1.0);
        CHECK(g_nec / g_emp < 100.0);
        CHECK(g_emp / g_nec < 100.0);
    }
}

TEST_CASE("sufficient pass implies bounded empirical M under N and T doubling") {
    const auto sys = rod(32, 0.3);
    REQUIRE(sufficient_condition(sys, Kernel::cauchy(), 1.0, 0.7, 1.3).passed());
    EmpiricalOptions o;
    o.steps = 400;
    const double m1 = empirical_admissibility(rod(16, 0.3), Kernel::cauchy(), default_battery(1.0), 1.0, o).constant("empirical_M");
    const double m2 = empirical_admissibility(sys, Kernel::cauchy(), default_battery(2.0), 2.0, o).constant("empirical_M");
    CHECK(m2 <= 2.0 * m1);
}
