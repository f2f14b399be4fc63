// Gaussian measure of centred and shifted Euclidean balls, and grid
// verification of the two explicit tail constants (1/33, 1/397) and of the
// centred-vs-shifted ball comparison including its monotonicity claim.

#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "spheretail/report.hpp"
#include "spheretail/specfun.hpp"

namespace spheretail {

struct BallQuery {
    int d = 2;
    double shift_norm = 0.0;
    double radius = 0.0;

    void validate() const {
        if (d < 2) throw std::domain_error("BallQuery: requires d >= 2");
        if (!(shift_norm >= 0.0) || !std::isfinite(shift_norm) ||
            !(radius >= 0.0) || !std::isfinite(radius))
            throw std::domain_error("BallQuery: nonnegative finite fields");
    }
};

// P(||G|| <= R) for standard Gaussian G in R^d.
inline double centred_ball_prob(int d, double R) {
    if (d < 2) throw std::domain_error("centred_ball_prob: requires d >= 2");
    if (!(R >= 0.0)) throw std::domain_error("centred_ball_prob: R >= 0");
    return 1.0 - chi_square_sf(d, R * R);
}

// P(||G - x|| <= radius) with ||x|| = shift_norm.
inline double shifted_ball_prob(int d, double shift_norm, double radius) {
    BallQuery{d, shift_norm, radius}.validate();
    if (radius == 0.0) return 0.0;
    return noncentral_chi_square_cdf(d, shift_norm * shift_norm,
                                     radius * radius);
}

// min over d in [2, d_max] of P(chi2_d > d) and P(chi2_d > d+2) against the
// constants 1/33 and 1/397.
inline std::vector<VerificationReport> verify_lemma1(int d_max) {
    if (d_max < 2) throw std::domain_error("verify_lemma1: d_max >= 2");
    VerificationReport r33{.claim = "gauss-norm-tail-at-sqrt-d",
                           .tolerance = 0.0};
    VerificationReport r397{.claim = "gauss-norm-tail-at-sqrt-d-plus-2",
                            .tolerance = 0.0};
    char grid[64];
    std::snprintf(grid, sizeof grid, "d in [2,%d]", d_max);
    r33.grid = grid;
    r397.grid = grid;
    for (int d = 2; d <= d_max; ++d) {
        char pt[32];
        std::snprintf(pt, sizeof pt, "d=%d", d);
        r33.record(chi_square_sf(d, d) - 1.0 / 33.0, pt);
        r397.record(chi_square_sf(d, d + 2.0) - 1.0 / 397.0, pt);
    }
    char note[96];
    std::snprintf(note, sizeof note, "min P(chi2_d>d) = %.17g",
                  r33.worst_margin + 1.0 / 33.0);
    r33.notes.push_back(note);
    std::snprintf(note, sizeof note, "min P(chi2_d>d+2) = %.17g",
                  r397.worst_margin + 1.0 / 397.0);
    r397.notes.push_back(note);
    return {r33, r397};
}

// Centred-vs-shifted comparison on a grid: for R >= sqrt(d+2),
//   P(||G|| <= R) <= P(||G - a sqrt(d) e1|| <= R sqrt(1+a^2)),
// plus the proof's claim that the right side is nondecreasing in a.
inline std::vector<VerificationReport> verify_lemma3(
    int d, const std::vector<double>& a_grid,
    const std::vector<double>& R_grid) {
    if (d < 2) throw std::domain_error("verify_lemma3: requires d >= 2");
    const double rmin = std::sqrt(d + 2.0);
    for (double R : R_grid)
        if (!(R >= rmin * (1.0 - 1e-12)))
            throw std::domain_error("verify_lemma3: all R must be >= sqrt(d+2)");

    VerificationReport comp{.claim = "ball-comparison-margin",
                            .tolerance = 1e-9};
    VerificationReport mono{.claim = "ball-shifted-monotone-in-a",
                            .tolerance = 1e-9};
    char grid[96];
    std::snprintf(grid, sizeof grid, "d=%d, %zu a values, %zu R values", d,
                  a_grid.size(), R_grid.size());
    comp.grid = grid;
    mono.grid = grid;

    for (double R : R_grid) {
        const double base = centred_ball_prob(d, R);
        double prev = -1.0;
        for (double a : a_grid) {
            double h = shifted_ball_prob(d, a * std::sqrt(double(d)),
                                         R * std::sqrt(1.0 + a * a));
            char pt[80];
            std::snprintf(pt, sizeof pt, "d=%d a=%.17g R=%.17g", d, a, R);
            comp.record(h - base, pt);
            if (prev >= 0.0) mono.record(h - prev, pt);
            prev = h;
        }
    }
    return {comp, mono};
}

// Exploratory probe: with R well below sqrt(d+2) the monotonicity in a can
// fail; reports the first sign change found, if any. No pass/fail contract.
struct HypothesisProbeResult {
    bool violation_found = false;
    double d = 0, R = 0, a = 0, drop = 0;
};

inline HypothesisProbeResult probe_small_radius_monotonicity(
    int d_min = 2, int d_max = 30) {
    HypothesisProbeResult out;
    for (int d = d_min; d <= d_max; ++d) {
        double R = 0.5 * std::sqrt(double(d));
        double prev = -1.0;
        for (double a = 0.0; a <= 8.0 + 1e-12; a += 0.1) {
            double h = shifted_ball_prob(d, a * std::sqrt(double(d)),
                                         R * std::sqrt(1.0 + a * a));
            if (prev >= 0.0 && h < prev - 1e-12) {
                double drop = prev - h;
                if (!out.violation_found || drop > out.drop) {
                    out.violation_found = true;
                    out.d = d;
                    out.R = R;
                    out.a = a;
                    out.drop = drop;
                }
            }
            prev = h;
        }
    }
    return out;
}

}  // namespace spheretail
