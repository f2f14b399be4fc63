// The family J_d(b) = integral over [-1,1] of (1-x^2)^{d/2} e^{bx} dx,
// its normalised form, an independent Bessel-identity oracle, and grid
// verification of the four ratio/recursion bounds it satisfies.

#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "spheretail/quadrature.hpp"
#include "spheretail/report.hpp"
#include "spheretail/specfun.hpp"

namespace spheretail {

struct JdQuery {
    int d = 0;     // exponent index, >= -1
    double b = 0;  // Laplace parameter, >= 0

    void validate() const {
        if (d < -1) throw std::domain_error("JdQuery: requires d >= -1");
        if (!(b >= 0.0) || !std::isfinite(b))
            throw std::domain_error("JdQuery: requires finite b >= 0");
    }
};

struct JdValue {
    double log_value = 0.0;
    double value = 0.0;  // exp(log_value); saturates for huge b
    double error_estimate = 0.0;
};

// J_d(0) = sqrt(pi) Gamma(d/2+1) / Gamma(d/2+3/2), closed form.
inline double jd_zero(int d) {
    if (d < -1) throw std::domain_error("jd_zero: requires d >= -1");
    return jacobi_weight_mass(0.5 * d);
}

namespace detail {

// log of sum_i w_i e^{b(x_i-1)} shifted by b: stable for any b >= 0.
inline double jd_log_by_rule(const QuadratureRule& rule, double b) {
    double s = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i)
        s += rule.weights[i] * std::exp(b * (rule.nodes[i] - 1.0));
    return b + std::log(s);
}

}  // namespace detail

inline int jd_default_rule_size(const JdQuery& q) {
    return bucket_rule_size(
        std::max(64, std::max(q.d, 0) + static_cast<int>(std::ceil(q.b))));
}

inline JdValue jd(const JdQuery& q, int rule_size) {
    q.validate();
    if (rule_size < 16) throw std::domain_error("jd: rule_size >= 16 required");
    JdValue out;
    if (q.b == 0.0) {
        out.value = jd_zero(q.d);
        out.log_value = std::log(out.value);
        out.error_estimate = 4e-16 * out.value;
        return out;
    }
    auto rule = cached_jacobi_rule(0.5 * q.d, rule_size);
    auto rule2 = cached_jacobi_rule(0.5 * q.d, bucket_rule_size(2 * rule_size));
    double lv = detail::jd_log_by_rule(*rule, q.b);
    double lv2 = detail::jd_log_by_rule(*rule2, q.b);
    out.log_value = lv2;
    out.value = std::exp(lv2);
    out.error_estimate =
        std::fabs(lv - lv2) * (std::isfinite(out.value) ? out.value : 1.0);
    return out;
}

inline JdValue jd(const JdQuery& q) { return jd(q, jd_default_rule_size(q)); }

// Independent route: J_d(b) = sqrt(pi) Gamma(d/2+1) (2/b)^{(d+1)/2}
// I_{(d+1)/2}(b) for b > 0.
inline JdValue jd_bessel_oracle(const JdQuery& q) {
    q.validate();
    if (!(q.b > 0.0))
        throw std::domain_error("jd_bessel_oracle: requires b > 0 (use jd_zero)");
    const double nu = 0.5 * (q.d + 1);
    JdValue out;
    out.log_value = 0.5 * std::log(M_PI) + std::lgamma(0.5 * q.d + 1.0) +
                    nu * (std::log(2.0) - std::log(q.b)) +
                    bessel_i_log(nu, q.b);
    out.value = std::exp(out.log_value);
    out.error_estimate =
        1e-11 * (std::isfinite(out.value) ? out.value : 1.0);
    return out;
}

namespace detail {

// log J at indices d+1, d-1, d-3 for the bound checks.
struct JdTriple {
    double lp1, lm1, lm3;  // log J_{d+1}, log J_{d-1}, log J_{d-3}
};

inline JdTriple jd_triple(int d, double b) {
    int n = bucket_rule_size(std::max(64, d + 1 + static_cast<int>(std::ceil(b))));
    // Single-rule evaluation; the bucketed size already exceeds the
    // requirement, and the bound checks only consume the values.
    auto lg = [&](int idx) {
        if (b == 0.0) return std::log(jd_zero(idx));
        return jd_log_by_rule(*cached_jacobi_rule(0.5 * idx, n), b);
    };
    return JdTriple{lg(d + 1), lg(d - 1), lg(d - 3)};
}

}  // namespace detail

// Residual of b^2 J_{d+1} = -d(d+1) J_{d-1} + (d+1)(d-1) J_{d-3},
// relative to the (d+1)(d-1) J_{d-3} term, computed with J_{d-3}-scaled
// ratios so it stays finite for large b.
inline double check_recursion_a(int d, double b) {
    if (d < 2) throw std::domain_error("check_recursion_a: requires d >= 2");
    auto t = detail::jd_triple(d, b);
    double rp1 = std::exp(t.lp1 - t.lm3);
    double rm1 = std::exp(t.lm1 - t.lm3);
    double lhs = b * b * rp1 + d * (d + 1.0) * rm1;
    double rhs = (d + 1.0) * (d - 1.0);
    return std::fabs(lhs - rhs) / rhs;
}

inline double lemma2_rhs_factor(int d, double b) {
    return 0.5 + std::sqrt(0.25 + b * b / (d * (d + 2.0)));
}

// J_{d-3}/J_{d-1} - (d/(d-1)) (1/2 + sqrt(1/4 + b^2/(d(d+2)))).
inline double check_bound_b(int d, double b) {
    if (d < 2) throw std::domain_error("check_bound_b: requires d >= 2");
    auto t = detail::jd_triple(d, b);
    double lhs = std::exp(t.lm3 - t.lm1);
    return lhs - d / (d - 1.0) * lemma2_rhs_factor(d, b);
}

// ((d+2)/(d+1)) (1/2 + sqrt(1/4 + b^2/(d(d+2)))) - J_{d-1}/J_{d+1}.
inline double check_bound_c(int d, double b) {
    if (d < 2) throw std::domain_error("check_bound_c: requires d >= 2");
    auto t = detail::jd_triple(d, b);
    double lhs = std::exp(t.lm1 - t.lp1);
    return (d + 2.0) / (d + 1.0) * lemma2_rhs_factor(d, b) - lhs;
}

struct BoundDMargins {
    double margin_d;       // product bound with the sharp constant
    double margin_holder;  // plain Hoelder direction
};

// Both margins are normalised by J_{d-1}^2 (ratios in log space), so the
// -1e-10 tolerance is meaningful at every b.
inline BoundDMargins check_bound_d(int d, double b) {
    if (d < 2) throw std::domain_error("check_bound_d: requires d >= 2");
    auto t = detail::jd_triple(d, b);
    double prod = std::exp(t.lp1 + t.lm3 - 2.0 * t.lm1);
    double c = (d - 1.0) * (d + 2.0) / (d * (d + 1.0));
    return BoundDMargins{prod * c - 1.0, prod - 1.0};
}

// Reduced inequality behind the ball-measure comparison:
// J_{d-3}(b)/J_{d-1}(b) >= (d/(d-1)) (1/2 + sqrt(1/4 + b^2/(R^2 d))).
inline double check_lemma3_reduced(int d, double b, double R) {
    if (d < 2) throw std::domain_error("check_lemma3_reduced: requires d >= 2");
    if (!(R >= std::sqrt(d + 2.0) * (1.0 - 1e-12)))
        throw std::domain_error("check_lemma3_reduced: requires R >= sqrt(d+2)");
    auto t = detail::jd_triple(d, b);
    double lhs = std::exp(t.lm3 - t.lm1);
    double rhs =
        d / (d - 1.0) * (0.5 + std::sqrt(0.25 + b * b / (R * R * d)));
    return lhs - rhs;
}

// Standard verification grid: d in {2..100}, b in {0} u {10^{k/4}: k=-8..12}.
inline std::vector<double> lemma2_b_grid() {
    std::vector<double> bs{0.0};
    for (int k = -8; k <= 12; ++k) bs.push_back(std::pow(10.0, 0.25 * k));
    return bs;
}

namespace detail {
inline std::string point_str(int d, double b) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "d=%d b=%.17g", d, b);
    return buf;
}
}  // namespace detail

// Grid verification of the recursion, the three bounds, the Hoelder
// direction, the normalised identity, and the (b)<=>(c) sign agreement.
inline std::vector<VerificationReport> verify_lemma2(
    int d_min = 2, int d_max = 100,
    const std::vector<double>& bs = lemma2_b_grid()) {
    VerificationReport ra{.claim = "jd-recursion-a", .tolerance = 1e-8};
    VerificationReport rb{.claim = "jd-bound-b", .tolerance = 1e-10};
    VerificationReport rc{.claim = "jd-bound-c", .tolerance = 1e-10};
    VerificationReport rd{.claim = "jd-bound-d", .tolerance = 1e-10};
    VerificationReport rh{.claim = "jd-bound-holder", .tolerance = 1e-10};
    VerificationReport req{.claim = "jd-equality-at-b0", .tolerance = 1e-11};
    VerificationReport rid{.claim = "jd-normalised-identity", .tolerance = 1e-9};
    VerificationReport rbc{.claim = "jd-b-c-sign-agreement", .tolerance = 0.0};
    char grid[96];
    std::snprintf(grid, sizeof grid, "d in [%d,%d], %zu b values", d_min, d_max,
                  bs.size());
    for (auto* r : {&ra, &rb, &rc, &rd, &rh, &req, &rid, &rbc}) r->grid = grid;
    rbc.notes.push_back("grid-verified only; asymptotic regime not certified");

    for (int d = d_min; d <= d_max; ++d) {
        for (double b : bs) {
            auto pt = detail::point_str(d, b);
            double mb = check_bound_b(d, b);
            double mc = check_bound_c(d, b);
            ra.record(-check_recursion_a(d, b), pt);
            rb.record(mb, pt);
            rc.record(mc, pt);
            auto md = check_bound_d(d, b);
            rd.record(md.margin_d, pt);
            rh.record(md.margin_holder, pt);
            if (b == 0.0) {
                req.record(-std::fabs(mb), pt);
                req.record(-std::fabs(mc), pt);
                req.record(-std::fabs(md.margin_d), pt);
            }
            // (b) <=> (c): margins clear the tolerance together.
            bool okb = mb >= -1e-10, okc = mc >= -1e-10;
            rbc.record(okb == okc ? 0.0 : -1.0, pt);
            // normalised identity (a'): b^2/(d(d+2)) Jn_{d+1} + Jn_{d-1} =
            // Jn_{d-3}, relative to Jn_{d-3}.
            auto t = detail::jd_triple(d, b);
            double n3 = std::exp(t.lm3) / jd_zero(d - 3);
            double n1 = std::exp(t.lm1) / jd_zero(d - 1);
            double np = std::exp(t.lp1) / jd_zero(d + 1);
            if (std::isfinite(n3) && std::isfinite(np)) {
                double resid =
                    std::fabs(b * b / (d * (d + 2.0)) * np + n1 - n3) / n3;
                rid.record(-resid, pt);
            } else {
                // huge b: compare in log space via ratios to Jn_{d-3}
                double q1 = std::exp(t.lm1 - t.lm3) * jd_zero(d - 3) /
                            jd_zero(d - 1);
                double qp = std::exp(t.lp1 - t.lm3) * jd_zero(d - 3) /
                            jd_zero(d + 1);
                double resid =
                    std::fabs(b * b / (d * (d + 2.0)) * qp + q1 - 1.0);
                rid.record(-resid, pt);
            }
        }
    }
    return {ra, rb, rc, rd, rh, req, rid, rbc};
}

// jd vs the Bessel identity across d in [-1,60], b in (0,500].
inline VerificationReport verify_jd_bessel_equivalence() {
    VerificationReport rep{.claim = "jd-bessel-oracle-equivalence",
                           .tolerance = 1e-9};
    rep.grid = "d in [-1,60], b in {1e-3..500} (log grid)";
    std::vector<double> bs;
    for (int k = -12; k <= 10; ++k) bs.push_back(std::pow(10.0, 0.25 * k));
    bs.push_back(500.0);
    for (int d = -1; d <= 60; ++d) {
        for (double b : bs) {
            JdQuery q{d, b};
            double lq = jd(q).log_value;
            double lo = jd_bessel_oracle(q).log_value;
            double rel = std::fabs(std::expm1(lq - lo));
            rep.record(-rel, detail::point_str(d, b));
        }
    }
    return rep;
}

}  // namespace spheretail
