// Distribution of || sum_i a_i xi_i || for independent sphere-uniform xi_i,
// built by folding one summand at a time. Adding a summand of radius rho to a
// rotationally invariant vector of radius r gives radius
// sqrt(r^2 + 2 r rho u + rho^2) with u the first-coordinate law of the
// sphere, so each fold reduces to averaging shifted copies of the
// first-coordinate CDF over the current radius law. Radial mixtures (radius
// rho = |a| R with R in [0,1]) slot into the same fold.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "spheretail/pchip.hpp"
#include "spheretail/quadrature.hpp"
#include "spheretail/rng.hpp"
#include "spheretail/specfun.hpp"

namespace spheretail {

struct CoefficientVector {
    int d = 2;
    std::vector<double> a;

    void validate() const {
        if (d < 2) throw std::domain_error("CoefficientVector: requires d >= 2");
        if (a.empty())
            throw std::domain_error("CoefficientVector: requires m >= 1");
        for (double v : a)
            if (v == 0.0 || !std::isfinite(v))
                throw std::domain_error(
                    "CoefficientVector: coefficients must be finite and nonzero");
    }

    double sum_sq() const {
        double s = 0.0;
        for (double v : a) s += v * v;
        return s;
    }
    double sum_abs() const {
        double s = 0.0;
        for (double v : a) s += std::fabs(v);
        return s;
    }
};

// CDF of the first coordinate of a sphere-uniform vector in R^d:
// density proportional to (1-u^2)^{(d-3)/2} on [-1,1]. Closed forms for
// d = 2, 3; otherwise a cosine-spaced interpolation table of the symmetric
// regularized incomplete beta, with O(1) lookup.
class ThetaCdf {
  public:
    explicit ThetaCdf(int d) : d_(d) {
        if (d < 2) throw std::domain_error("ThetaCdf: requires d >= 2");
        if (d_ <= 3) return;
        const int K = 4096;
        std::vector<double> us(K + 1), ys(K + 1);
        const double s = 0.5 * (d_ - 1);
        for (int i = 0; i <= K; ++i) {
            double u = -std::cos(M_PI * i / K);
            us[i] = u;
            ys[i] = reg_inc_beta(s, s, 0.5 * (1.0 + u));
        }
        ys[0] = 0.0;
        ys[K] = 1.0;
        table_ = MonotoneCubic(std::move(us), std::move(ys));
    }

    double operator()(double u) const {
        if (u <= -1.0) return 0.0;
        if (u >= 1.0) return 1.0;
        if (d_ == 2) return 0.5 + std::asin(u) / M_PI;
        if (d_ == 3) return 0.5 * (1.0 + u);
        return table_(u);
    }

    // Smallest u with cdf(u) >= p.
    double quantile(double p) const {
        if (p <= 0.0) return -1.0;
        if (p >= 1.0) return 1.0;
        if (d_ == 2) return std::sin(M_PI * (p - 0.5));
        if (d_ == 3) return 2.0 * p - 1.0;
        return table_.inverse(p);
    }

    int dim() const { return d_; }

  private:
    int d_;
    MonotoneCubic table_;
};

inline std::shared_ptr<const ThetaCdf> cached_theta_cdf(int d) {
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const ThetaCdf>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(d);
    if (it != cache.end()) return it->second;
    auto p = std::make_shared<const ThetaCdf>(d);
    cache.emplace(d, p);
    return p;
}

// First-coordinate law bundled with its quadrature rule (exponent (d-3)/2).
struct ThetaLaw {
    int d;
    std::shared_ptr<const QuadratureRule> quadrature;
    std::shared_ptr<const ThetaCdf> cdf;

    explicit ThetaLaw(int dim, int rule_size = 0)
        : d(dim),
          quadrature(cached_jacobi_rule(
              0.5 * (dim - 3),
              rule_size > 0 ? rule_size : std::max(64, dim))),
          cdf(cached_theta_cdf(dim)) {
        if (dim < 2) throw std::domain_error("ThetaLaw: requires d >= 2");
    }

    double norm_constant() const { return 1.0 / jacobi_weight_mass(0.5 * (d - 3)); }
};

struct ThetaMoments {
    double mean;
    double second_moment;
};

inline ThetaMoments theta_moments(int d) {
    ThetaLaw law(d);
    const auto& rule = *law.quadrature;
    double w = 0.0, m1 = 0.0, m2 = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        w += rule.weights[i];
        m1 += rule.weights[i] * rule.nodes[i];
        m2 += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
    }
    return ThetaMoments{m1 / w, m2 / w};
}

struct EngineConfig {
    int grid_points = 4096;   // final CDF grid size
    int pilot_points = 512;   // pilot pass for equal-probability placement
    int atom_points = 4096;   // quantile atoms per fold step
    int radial_nodes = 32;    // Gauss-Legendre nodes for continuous radial laws
};

// Norm law: either a finite atom list (point masses) or a monotone grid CDF
// on [support_lo, support_max]. Immutable once built.
class NormDistribution {
  public:
    int d = 2;
    double support_lo = 0.0;
    double support_max = 0.0;
    std::vector<double> atom_value;
    std::vector<double> atom_mass;
    MonotoneCubic cdf_curve;
    bool has_grid = false;

    static NormDistribution point_mass(int dim, double value) {
        NormDistribution out;
        out.d = dim;
        out.support_lo = out.support_max = value;
        out.atom_value = {value};
        out.atom_mass = {1.0};
        return out;
    }

    static NormDistribution atoms(int dim, std::vector<double> values,
                                  std::vector<double> masses) {
        NormDistribution out;
        out.d = dim;
        out.atom_value = std::move(values);
        out.atom_mass = std::move(masses);
        out.support_lo = *std::min_element(out.atom_value.begin(),
                                           out.atom_value.end());
        out.support_max = *std::max_element(out.atom_value.begin(),
                                            out.atom_value.end());
        return out;
    }

    bool is_discrete() const { return !has_grid; }

    double cdf(double t) const {
        if (!has_grid) {
            double s = 0.0;
            for (size_t i = 0; i < atom_value.size(); ++i)
                if (atom_value[i] <= t) s += atom_mass[i];
            return s;
        }
        if (t < support_lo) return 0.0;
        if (t >= support_max) return 1.0;
        return cdf_curve(t);
    }

    // P(norm > t), right-continuous.
    double survival(double t) const { return 1.0 - cdf(t); }

    // Quantile midpoints r_j = F^{-1}((j-1/2)/n) with mass 1/n each.
    void equal_mass_points(int n, std::vector<double>* values,
                           std::vector<double>* masses) const {
        values->clear();
        masses->clear();
        if (!has_grid) {
            *values = atom_value;
            *masses = atom_mass;
            return;
        }
        values->reserve(n);
        masses->assign(n, 1.0 / n);
        double y0 = cdf_curve.ys().front();
        double y1 = cdf_curve.ys().back();
        for (int j = 0; j < n; ++j) {
            double p = y0 + (j + 0.5) / n * (y1 - y0);
            values->push_back(cdf_curve.inverse(p));
        }
    }
};

namespace detail {

// Build a grid CDF from an exact pointwise evaluator: pilot pass on a uniform
// grid, then equal-probability refinement of the final grid.
template <typename F>
NormDistribution build_distribution(int d, double lo, double hi, F&& eval,
                                    const EngineConfig& cfg) {
    if (!(hi > lo))
        throw std::runtime_error("build_distribution: empty support");
    const int P = std::max(16, cfg.pilot_points);
    const int M = std::max(32, cfg.grid_points);

    std::vector<double> px(P + 1), py(P + 1);
    for (int i = 0; i <= P; ++i) {
        px[i] = lo + (hi - lo) * i / P;
        py[i] = eval(px[i]);
    }
    for (int i = 1; i <= P; ++i) py[i] = std::max(py[i], py[i - 1]);
    MonotoneCubic pilot(px, py);

    // Final grid: quantiles of the pilot plus a coarse uniform safety net.
    std::vector<double> grid;
    grid.reserve(M + M / 8 + 2);
    double y0 = py.front(), y1 = py.back();
    for (int k = 0; k < M; ++k)
        grid.push_back(pilot.inverse(y0 + (y1 - y0) * (k + 0.5) / M));
    for (int k = 0; k <= M / 8; ++k)
        grid.push_back(lo + (hi - lo) * k / (M / 8));
    grid.push_back(lo);
    grid.push_back(hi);
    std::sort(grid.begin(), grid.end());
    const double tol = (hi - lo) * 1e-12;
    std::vector<double> xs;
    xs.reserve(grid.size());
    for (double g : grid)
        if (xs.empty() || g - xs.back() > tol) xs.push_back(g);
    xs.front() = lo;
    xs.back() = hi;

    std::vector<double> ys(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) ys[i] = eval(xs[i]);
    for (size_t i = 1; i < xs.size(); ++i) ys[i] = std::max(ys[i], ys[i - 1]);
    if (ys.front() < 1e-9) ys.front() = 0.0;
    if (std::fabs(ys.back() - 1.0) > 1e-9)
        throw std::runtime_error(
            "build_distribution: cdf does not reach 1 at the support end");
    ys.back() = 1.0;

    NormDistribution out;
    out.d = d;
    out.support_lo = lo;
    out.support_max = hi;
    out.cdf_curve = MonotoneCubic(std::move(xs), std::move(ys));
    out.has_grid = true;
    return out;
}

struct RadiusNode {
    double rho;
    double mass;
};

}  // namespace detail

// Fold one rotationally invariant summand whose radius law is the given
// discrete/quadrature node set into the current norm law.
inline NormDistribution propagate_mixture(
    const NormDistribution& dist, std::vector<detail::RadiusNode> radius_nodes,
    const EngineConfig& cfg = {}) {
    if (radius_nodes.empty())
        throw std::domain_error("propagate: empty radius node set");
    double mass0 = 0.0;  // P(rho = 0): the summand vanishes, law unchanged
    {
        std::vector<detail::RadiusNode> keep;
        for (auto& n : radius_nodes) {
            if (!(n.rho >= 0.0) || !(n.mass >= 0.0))
                throw std::domain_error("propagate: invalid radius node");
            if (n.rho == 0.0)
                mass0 += n.mass;
            else
                keep.push_back(n);
        }
        radius_nodes = std::move(keep);
    }
    if (radius_nodes.empty()) return dist;

    // degenerate base: adding to the zero vector just yields the radius law
    if (dist.is_discrete() && dist.support_max == 0.0) {
        std::vector<double> vals, masses;
        if (mass0 > 0.0) {
            vals.push_back(0.0);
            masses.push_back(mass0);
        }
        for (const auto& n : radius_nodes) {
            vals.push_back(n.rho);
            masses.push_back(n.mass);
        }
        return NormDistribution::atoms(dist.d, std::move(vals),
                                       std::move(masses));
    }

    std::vector<double> rv, rm;
    dist.equal_mass_points(cfg.atom_points, &rv, &rm);

    double rho_max = 0.0;
    double lo = mass0 > 0.0 ? dist.support_lo
                            : std::numeric_limits<double>::infinity();
    double hi = mass0 > 0.0 ? dist.support_max : 0.0;
    for (const auto& n : radius_nodes) {
        rho_max = std::max(rho_max, n.rho);
        double node_lo;
        if (n.rho >= dist.support_lo && n.rho <= dist.support_max)
            node_lo = 0.0;
        else
            node_lo = std::min(std::fabs(dist.support_lo - n.rho),
                               std::fabs(dist.support_max - n.rho));
        lo = std::min(lo, node_lo);
        hi = std::max(hi, dist.support_max + n.rho);
    }

    auto theta = cached_theta_cdf(dist.d);
    auto eval = [&](double t) {
        double acc = mass0 * dist.cdf(t);
        const double t2 = t * t;
        for (const auto& n : radius_nodes) {
            const double rho = n.rho, rho2 = rho * rho;
            double s = 0.0;
            for (size_t j = 0; j < rv.size(); ++j) {
                const double r = rv[j];
                if (r == 0.0) {
                    if (rho <= t) s += rm[j];
                    continue;
                }
                // triangle bounds first: z from squared terms loses enough
                // precision near +-1 that the theta cdf (sqrt-sensitive
                // there) would miss the endpoints
                if (t >= r + rho) {
                    s += rm[j];
                    continue;
                }
                if (t <= std::fabs(r - rho)) continue;
                double z = (t2 - r * r - rho2) / (2.0 * r * rho);
                if (z >= 1.0)
                    s += rm[j];
                else if (z > -1.0)
                    s += rm[j] * (*theta)(z);
            }
            acc += n.mass * s;
        }
        return clamp_probability(acc, 1e-9);
    };
    return detail::build_distribution(dist.d, lo, hi, eval, cfg);
}

// Fold one sphere-uniform summand with coefficient a_next.
inline NormDistribution propagate(const NormDistribution& dist, double a_next,
                                  const EngineConfig& cfg = {}) {
    if (a_next == 0.0 || !std::isfinite(a_next))
        throw std::domain_error("propagate: a_next must be finite and nonzero");
    return propagate_mixture(dist, {{std::fabs(a_next), 1.0}}, cfg);
}

// Norm law of sum a_i xi_i: point mass at the largest |a_i|, then fold the
// rest in decreasing order.
inline NormDistribution norm_distribution(const CoefficientVector& c,
                                          const EngineConfig& cfg = {}) {
    c.validate();
    std::vector<double> mags;
    mags.reserve(c.a.size());
    for (double v : c.a) mags.push_back(std::fabs(v));
    std::sort(mags.begin(), mags.end(), std::greater<double>());
    NormDistribution dist = NormDistribution::point_mass(c.d, mags[0]);
    for (size_t i = 1; i < mags.size(); ++i) dist = propagate(dist, mags[i], cfg);
    return dist;
}

inline double survival(const NormDistribution& dist, double t) {
    if (!(t >= 0.0)) throw std::domain_error("survival: requires t >= 0");
    return dist.survival(t);
}

// P(||X + x|| > t) for a rotationally invariant X with the given norm law
// and ||x|| = shift, valid for t > shift:
//   P(||X|| > -theta shift + sqrt(t^2 + theta^2 shift^2 - shift^2)).
inline double lemma4_transform(const NormDistribution& dist, double shift,
                               double t, int rule_size = 0) {
    if (!(shift >= 0.0))
        throw std::domain_error("lemma4_transform: requires shift >= 0");
    if (shift == 0.0) return dist.survival(t);
    if (!(t > shift))
        throw std::domain_error("lemma4_transform: requires t > shift");

    if (dist.is_discrete()) {
        // survival of an atom law is an indicator in theta; integrate exactly
        auto theta = cached_theta_cdf(dist.d);
        double acc = 0.0;
        for (size_t i = 0; i < dist.atom_value.size(); ++i) {
            double r = dist.atom_value[i];
            if (r == 0.0 || t >= r + shift) continue;  // never exceeds
            if (t <= std::fabs(r - shift)) {
                acc += dist.atom_mass[i];
                continue;
            }
            double z = (t * t - r * r - shift * shift) / (2.0 * r * shift);
            acc += dist.atom_mass[i] * (1.0 - (*theta)(z));
        }
        return clamp_probability(acc);
    }

    // midpoint rule in the probability variable of the first-coordinate law;
    // survival has kinks where the argument crosses grid knots, so smooth
    // quadrature in u gains nothing and equal-mass sampling is robust
    auto theta = cached_theta_cdf(dist.d);
    const int n = rule_size > 0 ? rule_size : 65536;
    const double s2 = shift * shift;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double u = theta->quantile((i + 0.5) / n);
        double radius = -u * shift + std::sqrt(t * t + u * u * s2 - s2);
        acc += dist.survival(radius);
    }
    return clamp_probability(acc / n);
}

// Monte Carlo oracle: n draws of || sum a_i xi_i ||, deterministic in seed.
inline std::vector<double> sample_norm(const CoefficientVector& c, int n,
                                       std::uint64_t seed) {
    c.validate();
    if (n < 1) throw std::domain_error("sample_norm: requires n >= 1");
    Rng rng(seed);
    std::vector<double> out;
    out.reserve(n);
    std::vector<double> acc(c.d), g(c.d);
    for (int k = 0; k < n; ++k) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (double ai : c.a) {
            double nn = 0.0;
            for (int j = 0; j < c.d; ++j) {
                g[j] = rng.normal();
                nn += g[j] * g[j];
            }
            double scale = ai / std::sqrt(nn);
            for (int j = 0; j < c.d; ++j) acc[j] += scale * g[j];
        }
        double s = 0.0;
        for (int j = 0; j < c.d; ++j) s += acc[j] * acc[j];
        out.push_back(std::sqrt(s));
    }
    return out;
}

// Radial law of the per-summand factor R in [0,1] for the general
// (rotationally invariant, unit-ball valued) comparison.
struct RadialLaw {
    enum class Kind { Constant, UniformBall, TwoPoint };
    Kind kind = Kind::Constant;
    double r1 = 1.0, r2 = 0.0, p = 0.5;

    static RadialLaw constant(double r) { return {Kind::Constant, r, 0.0, 0.0}; }
    static RadialLaw uniform_ball() { return {Kind::UniformBall, 0, 0, 0}; }
    static RadialLaw two_point(double a, double b, double prob) {
        return {Kind::TwoPoint, a, b, prob};
    }

    void validate() const {
        auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
        switch (kind) {
            case Kind::Constant:
                if (!in01(r1))
                    throw std::domain_error("RadialLaw: support outside [0,1]");
                break;
            case Kind::UniformBall:
                break;
            case Kind::TwoPoint:
                if (!in01(r1) || !in01(r2) || !in01(p))
                    throw std::domain_error("RadialLaw: support outside [0,1]");
                break;
        }
    }

    // Radius nodes of |a| R in dimension d.
    std::vector<detail::RadiusNode> nodes(double abs_a, int d,
                                          int n_quad) const {
        switch (kind) {
            case Kind::Constant:
                return {{abs_a * r1, 1.0}};
            case Kind::TwoPoint:
                return {{abs_a * r1, p}, {abs_a * r2, 1.0 - p}};
            case Kind::UniformBall: {
                // R = U^{1/d}; Gauss-Legendre in the quantile variable
                auto gl = cached_jacobi_rule(0.0, std::max(8, n_quad));
                std::vector<detail::RadiusNode> out;
                out.reserve(gl->nodes.size());
                for (size_t i = 0; i < gl->nodes.size(); ++i) {
                    double q = 0.5 * (gl->nodes[i] + 1.0);
                    out.push_back(
                        {abs_a * std::pow(q, 1.0 / d), 0.5 * gl->weights[i]});
                }
                return out;
            }
        }
        throw std::logic_error("RadialLaw: unknown kind");
    }

    double sample(Rng& rng, int d) const {
        switch (kind) {
            case Kind::Constant:
                return r1;
            case Kind::TwoPoint:
                return rng.uniform() < p ? r1 : r2;
            case Kind::UniformBall:
                return std::pow(rng.uniform(), 1.0 / d);
        }
        throw std::logic_error("RadialLaw: unknown kind");
    }
};

// Norm law of sum a_i R_i xi_i with iid radial factors R_i.
inline NormDistribution radial_mixture_distribution(const CoefficientVector& c,
                                                    const RadialLaw& law,
                                                    const EngineConfig& cfg = {}) {
    c.validate();
    law.validate();

    if (law.kind == RadialLaw::Kind::Constant) {
        // scale equivariance: law of r * (sum a_i xi_i)
        if (law.r1 == 0.0) return NormDistribution::point_mass(c.d, 0.0);
        CoefficientVector scaled = c;
        if (law.r1 != 1.0)
            for (double& v : scaled.a) v *= law.r1;
        return norm_distribution(scaled, cfg);
    }

    std::vector<double> mags;
    mags.reserve(c.a.size());
    for (double v : c.a) mags.push_back(std::fabs(v));
    std::sort(mags.begin(), mags.end(), std::greater<double>());

    NormDistribution dist;
    if (law.kind == RadialLaw::Kind::TwoPoint) {
        std::vector<double> vals, masses;
        if (law.p > 0.0) {
            vals.push_back(mags[0] * law.r1);
            masses.push_back(law.p);
        }
        if (law.p < 1.0) {
            vals.push_back(mags[0] * law.r2);
            masses.push_back(1.0 - law.p);
        }
        dist = NormDistribution::atoms(c.d, std::move(vals), std::move(masses));
    } else {
        // uniform-ball start: F(t) = (t/|a1|)^d on [0, |a1|], placed directly
        // on an equal-probability grid
        const int M = std::max(32, cfg.grid_points);
        std::vector<double> xs(M + 1), ys(M + 1);
        for (int k = 0; k <= M; ++k) {
            double q = static_cast<double>(k) / M;
            xs[k] = mags[0] * std::pow(q, 1.0 / c.d);
            ys[k] = q;
        }
        // guard against duplicate leading abscissae from the root at 0
        dist.d = c.d;
        dist.support_lo = 0.0;
        dist.support_max = mags[0];
        dist.cdf_curve = MonotoneCubic(std::move(xs), std::move(ys));
        dist.has_grid = true;
    }

    for (size_t i = 1; i < mags.size(); ++i)
        dist = propagate_mixture(dist, law.nodes(mags[i], c.d, cfg.radial_nodes),
                                 cfg);
    return dist;
}

// Monte Carlo oracle for radial mixtures.
inline std::vector<double> sample_radial_norm(const CoefficientVector& c,
                                              const RadialLaw& law, int n,
                                              std::uint64_t seed) {
    c.validate();
    law.validate();
    Rng rng(seed);
    std::vector<double> out;
    out.reserve(n);
    std::vector<double> acc(c.d), g(c.d);
    for (int k = 0; k < n; ++k) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (double ai : c.a) {
            double R = law.sample(rng, c.d);
            double nn = 0.0;
            for (int j = 0; j < c.d; ++j) {
                g[j] = rng.normal();
                nn += g[j] * g[j];
            }
            double scale = ai * R / std::sqrt(nn);
            for (int j = 0; j < c.d; ++j) acc[j] += scale * g[j];
        }
        double s = 0.0;
        for (int j = 0; j < c.d; ++j) s += acc[j] * acc[j];
        out.push_back(std::sqrt(s));
    }
    return out;
}

}  // namespace spheretail
