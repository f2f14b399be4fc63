// Gauss-Jacobi quadrature for the symmetric weight (1-x^2)^alpha on [-1,1],
// built by Golub-Welsch: eigenvalues of the Jacobi matrix give the nodes,
// weights come from the Christoffel function.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "spheretail/specfun.hpp"

namespace spheretail {

struct QuadratureRule {
    double exponent = 0.0;               // alpha in (1-x^2)^alpha
    std::vector<double> nodes;           // strictly increasing, in (-1,1)
    std::vector<double> weights;         // positive

    double total_weight() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
};

// integral of (1-x^2)^alpha over [-1,1] = sqrt(pi) Gamma(a+1)/Gamma(a+3/2)
inline double jacobi_weight_mass(double alpha) {
    return std::exp(0.5 * std::log(M_PI) + std::lgamma(alpha + 1.0) -
                    std::lgamma(alpha + 1.5));
}

namespace detail {

// Eigenvalues of a symmetric tridiagonal matrix (diag, sub) by the QL
// algorithm with implicit shifts; diag is overwritten with the eigenvalues.
inline void tridiag_eigenvalues(std::vector<double>& diag,
                                std::vector<double>& sub) {
    const int n = static_cast<int>(diag.size());
    if (n == 1) return;
    sub.resize(n, 0.0);  // sub[n-1] used as scratch
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::fabs(diag[m]) + std::fabs(diag[m + 1]);
                if (std::fabs(sub[m]) <= std::numeric_limits<double>::epsilon() * dd)
                    break;
            }
            if (m != l) {
                if (iter++ == 80)
                    throw std::runtime_error(
                        "gauss_jacobi_rule: eigenvalue iteration failed");
                double g = (diag[l + 1] - diag[l]) / (2.0 * sub[l]);
                double r = std::hypot(g, 1.0);
                g = diag[m] - diag[l] + sub[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * sub[i];
                    double b = c * sub[i];
                    r = std::hypot(f, g);
                    sub[i + 1] = r;
                    if (r == 0.0) {
                        diag[i + 1] -= p;
                        sub[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = diag[i + 1] - p;
                    r = (diag[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    diag[i + 1] = g + p;
                    g = c * r - b;
                }
                if (r == 0.0 && i >= l) continue;
                diag[l] -= p;
                sub[l] = g;
                sub[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace detail

inline QuadratureRule gauss_jacobi_rule(double alpha, int n) {
    if (!(alpha >= -0.5))
        throw std::domain_error("gauss_jacobi_rule: requires alpha >= -1/2");
    if (n < 1) throw std::domain_error("gauss_jacobi_rule: requires n >= 1");

    QuadratureRule rule;
    rule.exponent = alpha;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    const double mu0 = jacobi_weight_mass(alpha);

    if (alpha == -0.5) {
        // Chebyshev first kind, closed form.
        for (int k = 0; k < n; ++k) {
            rule.nodes[k] = std::cos((2.0 * (n - k) - 1.0) * M_PI / (2.0 * n));
            rule.weights[k] = M_PI / n;
        }
        return rule;
    }

    if (n == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = mu0;
        return rule;
    }

    // Three-term recurrence x p_{k-1} = b_k p_k + b_{k-1} p_{k-2},
    // b_k^2 = k(k+2a) / ((2k+2a-1)(2k+2a+1)); diagonal is zero by symmetry.
    std::vector<double> offdiag(n - 1);
    for (int k = 1; k < n; ++k) {
        double num = k * (k + 2.0 * alpha);
        double den = (2.0 * k + 2.0 * alpha - 1.0) * (2.0 * k + 2.0 * alpha + 1.0);
        offdiag[k - 1] = std::sqrt(num / den);
    }

    std::vector<double> diag(n, 0.0);
    std::vector<double> sub = offdiag;
    detail::tridiag_eigenvalues(diag, sub);
    std::sort(diag.begin(), diag.end());

    // Symmetrize node pairs (eigenvalues come in +- pairs).
    for (int i = 0; i < n / 2; ++i) {
        double v = 0.5 * (diag[n - 1 - i] - diag[i]);
        diag[i] = -v;
        diag[n - 1 - i] = v;
    }
    if (n % 2 == 1) diag[n / 2] = 0.0;

    // Christoffel weights: w_i = 1 / sum_k p_k(x_i)^2 over the orthonormal
    // polynomials p_0..p_{n-1}.
    for (int i = 0; i < n; ++i) {
        const double x = diag[i];
        double pm1 = 0.0;
        double p0 = 1.0 / std::sqrt(mu0);
        double s = p0 * p0;
        for (int k = 1; k < n; ++k) {
            double p1 = (k == 1) ? x * p0 : x * p0 - offdiag[k - 2] * pm1;
            p1 /= offdiag[k - 1];
            s += p1 * p1;
            pm1 = p0;
            p0 = p1;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 1.0 / s;
    }
    for (int i = 0; i < n / 2; ++i) {
        double w = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }

    for (int i = 0; i < n; ++i) {
        if (!(rule.weights[i] > 0.0) || !(rule.nodes[i] > -1.0) ||
            !(rule.nodes[i] < 1.0) || (i > 0 && rule.nodes[i] <= rule.nodes[i - 1]))
            throw std::runtime_error("gauss_jacobi_rule: invalid rule produced");
    }
    return rule;
}

// Process-wide cache for rules with half-integer exponents (the only ones the
// library requests in bulk). Key: (2*alpha rounded, n).
inline std::shared_ptr<const QuadratureRule> cached_jacobi_rule(double alpha,
                                                                int n) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const QuadratureRule>>
        cache;
    int twoa = static_cast<int>(std::lround(2.0 * alpha));
    if (std::fabs(twoa - 2.0 * alpha) > 1e-12) {
        return std::make_shared<QuadratureRule>(gauss_jacobi_rule(alpha, n));
    }
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(twoa, n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto rule =
        std::make_shared<const QuadratureRule>(gauss_jacobi_rule(alpha, n));
    cache.emplace(key, rule);
    return rule;
}

// Smallest bucketed rule size >= requested; bucketing keeps the cache small.
inline int bucket_rule_size(int n) {
    int b = 64;
    while (b < n) b *= 2;
    return b;
}

}  // namespace spheretail
