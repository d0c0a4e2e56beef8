#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "delight/quadrature.hpp"
#include "delight/rng.hpp"
#include "delight/special_math.hpp"
#include "delight/verify.hpp"

using namespace delight;

TEST_CASE("reg_inc_beta closed forms") {
    CHECK(reg_inc_beta(1.0, 1.0, 0.3) == Catch::Approx(0.3).margin(1e-12));
    // I_x(a, 1) = x^a
    CHECK(reg_inc_beta(2.0, 1.0, 0.5) == Catch::Approx(0.25).margin(1e-12));
    // Frozen from an independent quadrature of the Beta(2.5, 3.5) density.
    CHECK(reg_inc_beta(2.5, 3.5, 0.4) == Catch::Approx(0.4869041915261176).margin(1e-10));
}

TEST_CASE("reg_inc_beta domain and convergence errors") {
    CHECK_THROWS_AS(reg_inc_beta(0.0, 1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(reg_inc_beta(1.0, -2.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(reg_inc_beta(1.0, 1.0, 1.5), std::domain_error);
    CHECK_THROWS_AS(reg_inc_beta(1.0, 1.0, -0.1), std::domain_error);
    ToleranceSpec strangled{1e-16, 1};
    CHECK_THROWS_AS(reg_inc_beta(5.0, 7.0, 0.4, strangled), std::runtime_error);
}

TEST_CASE("reg_inc_beta reflection identity and monotonicity") {
    SplitMix64 rng(101);
    double worst = 0.0;
    for (int i = 0; i < 300; ++i) {
        const double a = rng.uniform(0.5, 20.0);
        const double b = rng.uniform(0.5, 20.0);
        const double x = rng.next_double();
        worst = std::max(worst,
                         std::fabs(reg_inc_beta(a, b, x) + reg_inc_beta(b, a, 1.0 - x) - 1.0));
    }
    CHECK(worst <= 1e-10);

    for (int i = 0; i < 20; ++i) {
        const double a = rng.uniform(0.5, 20.0);
        const double b = rng.uniform(0.5, 20.0);
        CHECK(reg_inc_beta(a, b, 0.0) == 0.0);
        CHECK(reg_inc_beta(a, b, 1.0) == 1.0);
        double prev = 0.0;
        for (int k = 1; k <= 50; ++k) {
            const double cur = reg_inc_beta(a, b, k / 50.0);
            CHECK(cur >= prev - 1e-14);
            prev = cur;
        }
    }
}

TEST_CASE("reg_inc_beta agrees with quadrature oracle") {
    SplitMix64 rng(202);
    double worst = 0.0;
    for (int i = 0; i < 300; ++i) {
        const double a = rng.uniform(0.5, 20.0);
        const double b = rng.uniform(0.5, 20.0);
        const double x = rng.next_double();
        worst = std::max(worst, std::fabs(reg_inc_beta(a, b, x) - reg_inc_beta_oracle(a, b, x)));
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("standard normal pdf") {
    CHECK(std_normal_pdf(0.0) == Catch::Approx(0.3989422804).margin(1e-10));
    SplitMix64 rng(7);
    for (int i = 0; i < 50; ++i) {
        const double z = rng.uniform(0.0, 5.0);
        CHECK(std_normal_pdf(z) == std_normal_pdf(-z));
    }
    CHECK(std_normal_pdf(40.0) < 1e-300);
}

TEST_CASE("standard normal cdf") {
    CHECK(std_normal_cdf(0.0) == Catch::Approx(0.5).margin(1e-15));
    CHECK(std_normal_cdf(1.959964) == Catch::Approx(0.975).margin(1e-6));
    SplitMix64 rng(8);
    for (int i = 0; i < 100; ++i) {
        const double z = rng.uniform(-6.0, 6.0);
        CHECK(std_normal_cdf(z) + std_normal_cdf(-z) == Catch::Approx(1.0).margin(1e-10));
    }
    // Against direct quadrature of the density.
    for (double z : {0.5, 1.0, 2.33, 4.0}) {
        const double quad =
            0.5 + adaptive_simpson([](double t) { return std_normal_pdf(t); }, 0.0, z, 1e-13);
        CHECK(std_normal_cdf(z) == Catch::Approx(quad).margin(1e-10));
    }
}

TEST_CASE("quadrature utilities handle endpoint singularities") {
    // integral of 1/sqrt(x) over (0,1] is 2.
    CHECK(tanh_sinh([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-12) ==
          Catch::Approx(2.0).margin(1e-9));
    CHECK(adaptive_simpson([](double x) { return x * x; }, 0.0, 3.0, 1e-12) ==
          Catch::Approx(9.0).margin(1e-10));
}
