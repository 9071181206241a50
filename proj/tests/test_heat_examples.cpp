#include <doctest.h>

#include <cmath>
#include <numbers>

#include "volterra/admissibility.hpp"
#include "volterra/errors.hpp"
#include "volterra/heat_examples.hpp"

using namespace volterra;

namespace {
const double pi = std::numbers::pi;
}

TEST_CASE("dirichlet rod construction") {
    auto m = dirichlet_rod_system(2, 0.0, 1.0);
    REQUIRE(m.system.size() == 2);
    CHECK(m.system.eigenvalues()[0] == cplx(-pi * pi));
    CHECK(m.system.eigenvalues()[1] == cplx(-4 * pi * pi));
    CHECK(m.system.b()[0] == cplx(1.0));
    CHECK(m.system.b()[1] == cplx(2.0));
    CHECK(std::abs(laplace_transform(m.kernel, cplx(2.0, 1.0)) - 1.0 / cplx(2.0, 1.0)) < 1e-15);
    CHECK(m.beta == 1.0);

    CHECK(dirichlet_rod_system(1, 0.4, 0.0).system.b()[0] == cplx(1.0));

    auto h = dirichlet_rod_system(3, 0.5, 0.2);
    CHECK(h.beta == 1.5);
    CHECK(std::get<PowerKernel>(h.kernel.variant()).scale == doctest::Approx(0.8862269).epsilon(1e-7));
    CHECK(std::get<PowerKernel>(h.kernel.variant()).scale == doctest::Approx(std::sqrt(pi) / 2).epsilon(1e-15));
    CHECK_THROWS_AS(dirichlet_rod_system(3, 1.0, 0.2), DomainError);
    CHECK_THROWS_AS(dirichlet_rod_system(3, -0.1, 0.2), DomainError);
}

TEST_CASE("thresholds") {
    CHECK(dirichlet_threshold(0.0) == doctest::Approx(0.5));
    CHECK(dirichlet_threshold(1.0 / 3.0) == doctest::Approx(0.25));
    CHECK(dirichlet_threshold(1.0 - 1e-12) < 1e-11);
    CHECK(neumann_threshold(1, 0.0) == doctest::Approx(0.5));
    CHECK(neumann_threshold(2, 0.0) == doctest::Approx(0.0));
    CHECK(neumann_threshold(1, 1.0 / 3.0) == doctest::Approx(0.25));
    CHECK(neumann_threshold(3, 0.5) < 0.0);
    for (double a : {0.0, 0.1, 0.37, 0.5, 0.9}) CHECK(neumann_threshold(1, a) == doctest::Approx(dirichlet_threshold(a)));
}

TEST_CASE("neumann construction") {
    auto rod = dirichlet_rod_system(5, 0.2, 0.3);
    auto neu = neumann_system(1, 0.2, 0.3, 5, pi * pi);
    for (std::size_t n = 0; n < 5; ++n) {
        CHECK(neu.system.eigenvalues()[n].real() == doctest::Approx(rod.system.eigenvalues()[n].real()).epsilon(1e-15));
        CHECK(neu.system.b()[n] == rod.system.b()[n]);
    }
    auto n2 = neumann_system(2, 0.0, 0.0, 3, 1.0);
    REQUIRE(n2.system.size() == 3);
    CHECK(n2.system.eigenvalues()[0] == cplx(-1.0));
    CHECK(n2.system.eigenvalues()[1] == cplx(-2.0));
    CHECK(n2.system.eigenvalues()[2] == cplx(-3.0));
    auto n3 = neumann_system(3, 0.0, 0.0, 7, 2.5);
    CHECK(n3.system.size() == 7);
    double smallest = 1e300;
    for (auto l : n3.system.eigenvalues()) smallest = std::min(smallest, std::abs(l));
    CHECK(smallest == doctest::Approx(2.5));
    CHECK_THROWS_AS(neumann_system(0, 0.0, 0.0, 3, 1.0), DomainError);
    CHECK_THROWS_AS(neumann_system(2, 0.0, 0.0, 3, -1.0), DomainError);
    CHECK_THROWS_AS(neumann_system(2, 0.0, 0.0, 3, 5.0, 2.0), DomainError);
}

TEST_CASE("default window stays inside the theorem window") {
    for (double beta : {0.55, 0.6, 1.0, 1.5, 1.9}) {
        auto [b1, b2] = default_window(beta);
        CHECK(b2 > beta);
        CHECK(beta > b1);
        CHECK(b1 > std::max(0.5, beta / 3));
    }
    CHECK(default_window(1.0).first == doctest::Approx(0.95));
}

TEST_CASE("predicted scaling slopes") {
    auto slope = [](double a, double d) {
        HeatSystemSpec s;
        s.alpha = a;
        s.delta = d;
        s.N = 400;
        return carleson_scaling_experiment(s, log_spaced(1e2, 1e5, 20)).predicted_slope;
    };
    CHECK(std::abs(slope(1.0 / 3.0, 0.25)) < 1e-14);
    CHECK(slope(0.0, 0.3) == doctest::Approx(-0.2));
    CHECK(slope(0.0, 0.75) == doctest::Approx(0.25));
}

TEST_CASE("measured scaling slope matches the prediction") {
    for (double a : {0.0, 1.0 / 3.0, 2.0 / 3.0})
        for (double d : {0.1, 0.25, 0.5}) {
            HeatSystemSpec s;
            s.alpha = a;
            s.delta = d;
            s.N = 10000;
            auto e = carleson_scaling_experiment(s, log_spaced(1e2, 1e6, 200));
            CHECK(std::abs(e.slope - e.predicted_slope) <= 0.05);
            for (std::size_t i = 1; i < e.mu_Qh.size(); ++i) CHECK(e.mu_Qh[i] >= e.mu_Qh[i - 1]);
        }
}

TEST_CASE("scaling experiment: direct count oracle") {
    HeatSystemSpec s;
    s.alpha = 0.0;
    s.delta = 0.5;
    s.N = 100;
    auto e = carleson_scaling_experiment(s, {4 * pi * pi + 1e-9, 1000.0});
    // masses n at n^2 pi^2: h = 4 pi^2 holds n = 1, 2; h = 1000 holds n <= 10
    CHECK(e.mu_Qh[0] == doctest::Approx(3.0));
    CHECK(e.mu_Qh[1] == doctest::Approx(55.0));
    CHECK(e.ratio[1] == doctest::Approx(0.055));
    CHECK_THROWS_AS(carleson_scaling_experiment(s, {1e2, 1e6}), DomainError);
    CHECK_THROWS_AS(carleson_scaling_experiment(s, {5.0, 1e2}), DomainError);
}

TEST_CASE("neumann scaling slopes") {
    for (int d : {1, 2, 3})
        for (double delta : {0.0, 0.2}) {
            HeatSystemSpec s;
            s.boundary = Boundary::neumann;
            s.d = d;
            s.delta = delta;
            s.N = 200000;
            auto e = carleson_scaling_experiment(s, log_spaced(1e1, std::pow(200000.0, 2.0 / d) / 2, 100));
            CHECK(std::abs(e.slope - e.predicted_slope) <= 0.05);
            const bool below = delta <= neumann_threshold(d, 0.0) + 1e-12;
            CHECK((e.predicted_slope <= 0.0) == below);
        }
}

TEST_CASE("verdicts flip across the rod threshold") {
    for (double a : {0.0, 1.0 / 3.0, 2.0 / 3.0}) {
        const double thr = dirichlet_threshold(a);
        for (int sign : {-1, 1}) {
            const double delta = thr + 0.1 * sign;
            auto m = dirichlet_rod_system(256, a, delta);
            auto [b1, b2] = default_window(m.beta);
            auto r = sufficient_condition(m.system, m.kernel, m.beta, b1, b2);
            CHECK(r.verdict == (sign < 0 ? Verdict::pass : Verdict::fail));

            HeatSystemSpec s;
            s.alpha = a;
            s.delta = delta;
            s.N = 10000;
            CHECK(carleson_scaling_experiment(s, log_spaced(1e2, 1e6, 200)).bounded == (sign < 0));
        }
    }
}

TEST_CASE("neumann verdicts do not depend on the midpoint constant") {
    for (int d : {1, 2})
        for (double delta : {0.0, 0.3, 0.6}) {
            if (d == 2 && delta == 0.0) continue;  // critical exponent
            Verdict first = Verdict::inconclusive;
            bool have = false;
            for (double c : {0.5, 1.0, 2.0}) {
                auto m = neumann_system(d, 0.0, delta, 256, c);
                auto [b1, b2] = default_window(m.beta);
                auto v = sufficient_condition(m.system, m.kernel, m.beta, b1, b2).verdict;
                if (!have) {
                    first = v;
                    have = true;
                }
                CHECK(v == first);
            }
        }
}
