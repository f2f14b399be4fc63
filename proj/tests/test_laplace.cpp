#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "spheretail/laplace.hpp"
#include "spheretail/rng.hpp"

using namespace spheretail;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("jd_zero closed forms") {
    CHECK_THAT(jd_zero(-1), WithinRel(M_PI, 1e-12));
    CHECK_THAT(jd_zero(0), WithinRel(2.0, 1e-12));
    CHECK_THAT(jd_zero(1), WithinRel(0.5 * M_PI, 1e-12));
    CHECK_THAT(jd_zero(2), WithinRel(4.0 / 3.0, 1e-12));
    CHECK_THROWS_AS(jd_zero(-2), std::domain_error);
}

TEST_CASE("jd closed-form anchors") {
    // d=0: J_0(b) = 2 sinh(b)/b
    CHECK_THAT(jd({0, 1.0}).value, WithinRel(2.0 * std::sinh(1.0), 1e-11));
    CHECK_THAT(jd({0, 3.0}).value,
               WithinRel(2.0 * std::sinh(3.0) / 3.0, 1e-11));
    // d=-1: J_{-1}(b) = pi I_0(b)
    CHECK_THAT(jd({-1, 1.0}).value,
               WithinRel(M_PI * bessel_i(0.0, 1.0).value, 1e-10));
    // b=0 consistency with the closed form
    for (int d : {-1, 0, 1, 2, 7, 30})
        CHECK_THAT(jd({d, 0.0}).value, WithinRel(jd_zero(d), 1e-11));
    CHECK_THROWS_AS(jd({-3, 1.0}), std::domain_error);
    CHECK_THROWS_AS(jd({2, -1.0}), std::domain_error);
    CHECK_THROWS_AS(jd({2, 1.0}, 8), std::domain_error);
}

TEST_CASE("jd error estimate is honest on anchors") {
    for (int d : {0, 3, 12}) {
        for (double b : {0.5, 10.0, 200.0}) {
            auto v = jd({d, b});
            auto big = jd({d, b}, 4096);
            CHECK(std::fabs(v.log_value - big.log_value) <=
                  std::max(1e-12, 10.0 * v.error_estimate /
                                      std::max(v.value, 1.0)) +
                      1e-11);
        }
    }
}

TEST_CASE("jd_bessel_oracle anchors") {
    CHECK_THAT(jd_bessel_oracle({0, 2.0}).value,
               WithinRel(std::sinh(2.0), 1e-10));
    CHECK_THAT(jd_bessel_oracle({-1, 1.0}).value,
               WithinRel(M_PI * bessel_i(0.0, 1.0).value, 1e-10));
    CHECK_THAT(jd_bessel_oracle({3, 1.0}).log_value,
               WithinAbs(jd({3, 1.0}).log_value, 1e-9));
    CHECK_THROWS_AS(jd_bessel_oracle({2, 0.0}), std::domain_error);
}

TEST_CASE("jd matches the Bessel oracle on a spot grid") {
    for (int d : {-1, 0, 2, 9, 25, 60}) {
        for (double b : {1e-3, 0.1, 1.0, 20.0, 500.0}) {
            double lq = jd({d, b}).log_value;
            double lo = jd_bessel_oracle({d, b}).log_value;
            INFO("d=" << d << " b=" << b);
            CHECK_THAT(std::fabs(std::expm1(lq - lo)), WithinAbs(0.0, 1e-9));
        }
    }
}

TEST_CASE("recursion residual") {
    CHECK_THAT(check_recursion_a(2, 0.0), WithinAbs(0.0, 1e-13));
    CHECK(check_recursion_a(5, 3.0) <= 1e-8);
    CHECK(check_recursion_a(2, 10.0) <= 1e-8);
    CHECK(check_recursion_a(80, 316.0) <= 1e-8);
    CHECK_THROWS_AS(check_recursion_a(1, 1.0), std::domain_error);
}

TEST_CASE("ratio bound margins") {
    for (int d : {2, 3, 10, 50}) {
        CHECK_THAT(check_bound_b(d, 0.0), WithinAbs(0.0, 1e-11));
        CHECK_THAT(check_bound_c(d, 0.0), WithinAbs(0.0, 1e-11));
        CHECK_THAT(check_bound_d(d, 0.0).margin_d, WithinAbs(0.0, 1e-11));
    }
    CHECK(check_bound_b(2, 5.0) >= 0.0);
    CHECK(check_bound_b(50, 100.0) >= 0.0);
    CHECK(check_bound_c(3, 2.0) >= 0.0);
    CHECK(check_bound_c(20, 200.0) >= 0.0);
    auto m1 = check_bound_d(4, 1.0);
    CHECK(m1.margin_d >= 0.0);
    CHECK(m1.margin_holder >= 0.0);
    auto m2 = check_bound_d(2, 50.0);
    CHECK(m2.margin_d >= 0.0);
    CHECK(m2.margin_holder >= 0.0);
    // the sharp product bound implies the Hoelder direction
    CHECK(m2.margin_holder >= m2.margin_d);
}

TEST_CASE("reduced ball-comparison inequality") {
    // at R = sqrt(d+2) it coincides with the plain ratio bound
    for (int d : {2, 5, 12}) {
        for (double b : {0.0, 1.0, 8.0}) {
            CHECK_THAT(check_lemma3_reduced(d, b, std::sqrt(d + 2.0)),
                       WithinAbs(check_bound_b(d, b), 1e-12));
        }
    }
    CHECK(check_lemma3_reduced(2, 3.0, 10.0) >= check_bound_b(2, 3.0));
    // margin nondecreasing in R at fixed (d,b)
    double prev = -1e9;
    for (double R : {2.0, 3.0, 5.0, 20.0, 100.0}) {
        double m = check_lemma3_reduced(2, 3.0, R);
        CHECK(m >= prev - 1e-12);
        prev = m;
    }
    for (int d : {2, 7}) CHECK_THAT(check_lemma3_reduced(d, 0.0, 10.0),
                                    WithinAbs(0.0, 1e-11));
    CHECK_THROWS_AS(check_lemma3_reduced(2, 1.0, 1.5), std::domain_error);
}

TEST_CASE("normalised transform matches sphere-coordinate Monte Carlo") {
    // Jbar_{d-3}(b) = E exp(b * theta_d), theta_d the first coordinate of a
    // uniform point on the sphere in R^d
    const int n = 1000000;
    for (int d : {2, 3, 5, 10}) {
        for (double b : {0.5, 2.0}) {
            Rng rng(1000 * d + int(10 * b));
            double sum = 0.0, sum2 = 0.0;
            std::vector<double> g(d);
            for (int i = 0; i < n; ++i) {
                double nn = 0.0;
                for (int j = 0; j < d; ++j) {
                    g[j] = rng.normal();
                    nn += g[j] * g[j];
                }
                double v = std::exp(b * g[0] / std::sqrt(nn));
                sum += v;
                sum2 += v * v;
            }
            double mean = sum / n;
            double se = std::sqrt((sum2 / n - mean * mean) / n);
            double jbar = std::exp(jd({d - 3, b}).log_value) / jd_zero(d - 3);
            INFO("d=" << d << " b=" << b);
            CHECK_THAT(jbar, WithinAbs(mean, 4.0 * se));
        }
    }
}

TEST_CASE("grid verification passes on a reduced grid") {
    std::vector<double> bs{0.0};
    for (int k = -8; k <= 12; k += 4) bs.push_back(std::pow(10.0, 0.25 * k));
    auto reports = verify_lemma2(2, 30, bs);
    REQUIRE(reports.size() == 8);
    for (const auto& r : reports) {
        INFO(r.claim << " worst " << r.worst_margin << " at " << r.worst_point);
        CHECK(r.pass);
    }
    // sign agreement of the two ratio bounds, verified independently
    for (int d = 2; d <= 30; d += 7)
        for (double b : bs)
            CHECK((check_bound_b(d, b) >= -1e-10) ==
                  (check_bound_c(d, b) >= -1e-10));
}

TEST_CASE("report serialization carries the envelope fields") {
    auto rep = verify_lemma2(2, 4, {0.0, 1.0}).front();
    auto j = rep.to_json();
    CHECK(j.contains("claim"));
    CHECK(j.contains("grid"));
    CHECK(j.contains("worst_margin"));
    CHECK(j.contains("worst_point"));
    CHECK(j.contains("tolerance"));
    CHECK(j.contains("pass"));
}
