// Both sides of the sphere-vs-Gaussian tail comparison
//   P(||sum a_i xi_i|| > t) <= C * P(||sum a_i G_i/sqrt(d)|| > t),
// the check of the proven constant C0 = 397, proof-regime diagnostics, the
// two-valued counterexample showing boundedness alone is not enough, and an
// empirical search for the worst-case ratio.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "spheretail/rng.hpp"
#include "spheretail/specfun.hpp"
#include "spheretail/sphere_sum.hpp"

namespace spheretail {

constexpr double kComparisonConstant = 397.0;
constexpr double kBaseCaseConstant = 33.0;
constexpr double kRatioSlack = 1e-6;

enum class Regime { BaseCase, TrivialBound, Main };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::BaseCase: return "base-case";
        case Regime::TrivialBound: return "trivial-bound";
        case Regime::Main: return "main";
    }
    return "?";
}

struct ComparisonResult {
    double t = 0.0;
    double lhs = 0.0;   // sphere side
    double rhs = 0.0;   // Gaussian side
    double ratio = 0.0;
    Regime regime = Regime::Main;
    bool rhs_underflow = false;  // rhs < 1e-300: ratio reported in log space
    double log_gap = 0.0;        // ln lhs - ln rhs when meaningful
};

// P(||sum a_i G_i / sqrt(d)|| > t): the sum is a centred Gaussian vector
// with covariance (sum a_i^2 / d) I, so this is a chi-square tail.
inline double gaussian_side(const CoefficientVector& c, double t) {
    c.validate();
    if (!(t >= 0.0)) throw std::domain_error("gaussian_side: requires t >= 0");
    if (t == 0.0) return 1.0;
    return chi_square_sf(c.d, t * t * c.d / c.sum_sq());
}

inline double gaussian_side_log(const CoefficientVector& c, double t) {
    c.validate();
    if (t == 0.0) return 0.0;
    return log_chi_square_sf(c.d, t * t * c.d / c.sum_sq());
}

// Proof-regime classification. After rescaling so that the coefficients
// other than the largest satisfy sum a_i^2 = d, the inductive proof bounds
// the Gaussian side trivially whenever t <= sqrt(d+2) sqrt((a1^2+d)/d).
inline Regime classify_regime(const CoefficientVector& c, double t) {
    c.validate();
    if (c.a.size() == 1) return Regime::BaseCase;
    double a1 = 0.0;
    for (double v : c.a) a1 = std::max(a1, std::fabs(v));
    double rest = c.sum_sq() - a1 * a1;
    double s = std::sqrt(c.d / rest);
    double threshold =
        std::sqrt(c.d + 2.0) * std::sqrt((a1 * a1 * s * s + c.d) / c.d);
    return (t * s <= threshold * (1.0 + 1e-12)) ? Regime::TrivialBound
                                                : Regime::Main;
}

// Classifies and, in the trivial-bound regime, checks the proof's anchor
// 397 * gaussian_side >= 1.
inline Regime proof_thresholds(const CoefficientVector& c, double t) {
    if (c.a.size() < 2)
        throw std::domain_error("proof_thresholds: requires m >= 2");
    Regime r = classify_regime(c, t);
    if (r == Regime::TrivialBound) {
        double g = gaussian_side(c, t);
        if (!(kComparisonConstant * g >= 1.0 - 1e-9))
            throw std::runtime_error(
                "proof_thresholds: trivial-bound anchor violated");
    }
    return r;
}

inline ComparisonResult make_comparison(const CoefficientVector& c,
                                        const NormDistribution& dist,
                                        double t) {
    ComparisonResult out;
    out.t = t;
    out.lhs = dist.survival(t);
    out.rhs = gaussian_side(c, t);
    out.regime = classify_regime(c, t);
    if (out.rhs < 1e-300) {
        out.rhs_underflow = true;
        double lg = gaussian_side_log(c, t);
        out.log_gap = (out.lhs > 0.0 ? std::log(out.lhs) : -1e308) - lg;
        out.ratio = out.lhs > 0.0 ? std::exp(out.log_gap)
                                  : 0.0;  // may overflow to inf
    } else {
        out.ratio = out.lhs / out.rhs;
        out.log_gap = (out.lhs > 0.0 && out.rhs > 0.0)
                          ? std::log(out.lhs) - std::log(out.rhs)
                          : 0.0;
    }
    return out;
}

// Sphere side by the fold engine, Gaussian side in closed form.
inline ComparisonResult compare_ko(const CoefficientVector& c, double t,
                                   const EngineConfig& cfg = {}) {
    c.validate();
    if (!(t > 0.0)) throw std::domain_error("compare_ko: requires t > 0");
    return make_comparison(c, norm_distribution(c, cfg), t);
}

// General rotationally invariant summands with values in the unit ball:
// lhs is the radial mixture law, rhs keeps the full sum a_i^2.
inline ComparisonResult compare_general(const CoefficientVector& c,
                                        const RadialLaw& law, double t,
                                        const EngineConfig& cfg = {}) {
    c.validate();
    law.validate();
    if (!(t > 0.0)) throw std::domain_error("compare_general: requires t > 0");
    return make_comparison(c, radial_mixture_distribution(c, law, cfg), t);
}

// ---------------------------------------------------------------------------
// Counterexample: X_i = (+-1, 0, ..., 0), a_i = 1/sqrt(m), t = 2. The left
// side is a d-independent Rademacher tail; the Gaussian side decays in d.

struct CounterexampleRow {
    int d;
    double lhs;
    double rhs;
    double ratio;
    bool exceeds;  // lhs > 397 * rhs
};

struct CounterexampleTable {
    int m;
    double t;
    double lhs;  // P(|sum eps_i| / sqrt(m) > t), exact binomial tail
    std::vector<CounterexampleRow> rows;
    int first_exceeding_d = -1;
};

// P(|2K - m| > t sqrt(m)) for K ~ Bin(m, 1/2), exact.
inline double rademacher_tail(int m, double t) {
    if (m < 1) throw std::domain_error("rademacher_tail: requires m >= 1");
    if (!(t > 0.0)) return 1.0;
    double bound = t * std::sqrt(double(m));
    // smallest k with 2k - m > bound; for t > 0 this sits above m/2, so the
    // two symmetric tails never overlap
    int kmin = static_cast<int>(std::floor((m + bound) / 2.0)) + 1;
    if (kmin > m) return 0.0;
    double s = 0.0;
    for (int k = kmin; k <= m; ++k)
        s += std::exp(std::lgamma(m + 1.0) - std::lgamma(k + 1.0) -
                      std::lgamma(m - k + 1.0) - m * std::log(2.0));
    return std::min(2.0 * s, 1.0);
}

inline CounterexampleTable counterexample(int m,
                                          const std::vector<int>& d_list,
                                          double t = 2.0) {
    if (m < 1) throw std::domain_error("counterexample: requires m >= 1");
    CounterexampleTable table;
    table.m = m;
    table.t = t;
    table.lhs = rademacher_tail(m, t);
    for (int d : d_list) {
        if (d < 2) throw std::domain_error("counterexample: requires d >= 2");
        CounterexampleRow row;
        row.d = d;
        row.lhs = table.lhs;
        row.rhs = chi_square_sf(d, t * t * d);
        row.ratio = row.lhs / row.rhs;
        row.exceeds = row.lhs > kComparisonConstant * row.rhs;
        if (row.exceeds && table.first_exceeding_d < 0)
            table.first_exceeding_d = d;
        table.rows.push_back(row);
    }
    return table;
}

// ---------------------------------------------------------------------------
// Empirical worst-ratio search: structured families plus seeded multistart
// coordinate refinement over (log|a_i|, t). A lower-bound estimator only.

struct SearchResult {
    double best_ratio = 0.0;
    CoefficientVector argmax;
    double best_t = 0.0;
    long evaluations = 0;
};

namespace detail {

// t values to probe for a given sphere-side law: quantiles plus points
// pushed into the upper support edge, where the ratio peaks.
inline std::vector<double> ratio_t_grid(const NormDistribution& dist) {
    std::vector<double> ts;
    if (dist.has_grid) {
        for (double p : {0.05, 0.25, 0.5, 0.75, 0.9, 0.97})
            ts.push_back(dist.cdf_curve.inverse(p));
    }
    const double hi = dist.support_max;
    const double lo = std::max(dist.support_lo, 1e-8 * hi);
    for (double f : {0.3, 0.6, 0.85})
        ts.push_back(lo + f * (hi - lo));
    for (int k = 2; k <= 12; ++k)
        ts.push_back(hi * (1.0 - std::pow(10.0, -k)));
    std::sort(ts.begin(), ts.end());
    ts.erase(std::remove_if(ts.begin(), ts.end(),
                            [](double t) { return !(t > 0.0); }),
             ts.end());
    return ts;
}

}  // namespace detail

inline SearchResult search_constant(int d, int m_max, long budget,
                                    std::uint64_t seed,
                                    const EngineConfig& cfg = {512, 256, 512,
                                                               32}) {
    if (d < 2) throw std::domain_error("search_constant: requires d >= 2");
    if (m_max < 1 || budget < 1)
        throw std::domain_error("search_constant: m_max, budget >= 1");

    SearchResult best;
    best.argmax.d = d;

    auto eval_candidate = [&](const std::vector<double>& a) {
        CoefficientVector c{d, a};
        NormDistribution dist = norm_distribution(c, cfg);
        for (double t : detail::ratio_t_grid(dist)) {
            ++best.evaluations;
            auto r = make_comparison(c, dist, t);
            if (!r.rhs_underflow && std::isfinite(r.ratio) &&
                r.ratio > best.best_ratio) {
                best.best_ratio = r.ratio;
                best.argmax = c;
                best.best_t = t;
            }
        }
    };

    // Structured families.
    for (int m = 1; m <= m_max && best.evaluations < budget; ++m) {
        std::vector<double> eq(m, 1.0 / std::sqrt(double(m)));
        eval_candidate(eq);
        if (m >= 2) {
            for (double eps : {0.3, 0.1, 0.01}) {
                std::vector<double> spike(m, eps);
                spike[0] = 1.0;
                eval_candidate(spike);
            }
            for (double q : {0.5, 0.8}) {
                std::vector<double> geo(m);
                double v = 1.0;
                for (int i = 0; i < m; ++i, v *= q) geo[i] = v;
                eval_candidate(geo);
            }
        }
    }

    // Seeded multistart + coordinate refinement on log|a_i|.
    Rng rng(seed);
    while (best.evaluations < budget) {
        int m = 1 + static_cast<int>(rng.uniform() * m_max);
        m = std::min(m, m_max);
        std::vector<double> a(m);
        for (double& v : a) v = std::pow(10.0, rng.uniform(-1.5, 0.5));
        eval_candidate(a);
        std::vector<double> cur =
            best.argmax.a.empty() ? a : best.argmax.a;
        for (int pass = 0; pass < 2 && best.evaluations < budget; ++pass) {
            for (size_t i = 0; i < cur.size() && best.evaluations < budget;
                 ++i) {
                for (double f : {0.8, 1.25}) {
                    std::vector<double> trial = cur;
                    trial[i] *= f;
                    eval_candidate(trial);
                }
            }
            cur = best.argmax.a;
        }
    }
    return best;
}

}  // namespace spheretail
