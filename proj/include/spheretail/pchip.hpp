// Monotone piecewise-cubic Hermite interpolation (Fritsch-Carlson slopes).
// Used for CDF curves: preserves monotonicity, C^1, cheap to evaluate.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace spheretail {

class MonotoneCubic {
  public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> xs, std::vector<double> ys)
        : xs_(std::move(xs)), ys_(std::move(ys)) {
        const size_t n = xs_.size();
        if (n < 2 || ys_.size() != n)
            throw std::invalid_argument("MonotoneCubic: need >= 2 points");
        for (size_t i = 1; i < n; ++i)
            if (!(xs_[i] > xs_[i - 1]))
                throw std::invalid_argument("MonotoneCubic: xs not increasing");
        ms_.assign(n, 0.0);
        std::vector<double> h(n - 1), delta(n - 1);
        for (size_t i = 0; i + 1 < n; ++i) {
            h[i] = xs_[i + 1] - xs_[i];
            delta[i] = (ys_[i + 1] - ys_[i]) / h[i];
        }
        if (n == 2) {
            ms_[0] = ms_[1] = delta[0];
        } else {
            for (size_t i = 1; i + 1 < n; ++i) {
                if (delta[i - 1] * delta[i] <= 0.0) {
                    ms_[i] = 0.0;
                } else {
                    double w1 = 2.0 * h[i] + h[i - 1];
                    double w2 = h[i] + 2.0 * h[i - 1];
                    ms_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            ms_[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
            ms_[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
    }

    double operator()(double x) const {
        const size_t n = xs_.size();
        if (x <= xs_.front()) return ys_.front();
        if (x >= xs_.back()) return ys_.back();
        size_t i = interval(x);
        double h = xs_[i + 1] - xs_[i];
        double t = (x - xs_[i]) / h;
        double t2 = t * t, t3 = t2 * t;
        double h00 = 2 * t3 - 3 * t2 + 1;
        double h10 = t3 - 2 * t2 + t;
        double h01 = -2 * t3 + 3 * t2;
        double h11 = t3 - t2;
        return h00 * ys_[i] + h * h10 * ms_[i] + h01 * ys_[i + 1] +
               h * h11 * ms_[i + 1];
    }

    // Inverse for nondecreasing data: smallest x with f(x) >= y (bisection).
    double inverse(double y) const {
        if (y <= ys_.front()) return xs_.front();
        if (y >= ys_.back()) return xs_.back();
        size_t lo = 0, hi = xs_.size() - 1;
        while (hi - lo > 1) {
            size_t mid = (lo + hi) / 2;
            if (ys_[mid] >= y)
                hi = mid;
            else
                lo = mid;
        }
        double a = xs_[lo], b = xs_[hi];
        for (int it = 0; it < 60; ++it) {
            double m = 0.5 * (a + b);
            if ((*this)(m) >= y)
                b = m;
            else
                a = m;
        }
        return 0.5 * (a + b);
    }

    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& ys() const { return ys_; }

  private:
    static double edge_slope(double h0, double h1, double d0, double d1) {
        double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= 0.0) return 0.0;
        if (d0 * d1 < 0.0 && std::fabs(m) > 3.0 * std::fabs(d0))
            return 3.0 * d0;
        return m;
    }

    size_t interval(double x) const {
        auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        size_t i = static_cast<size_t>(it - xs_.begin());
        return std::min(std::max<size_t>(i, 1) - 1, xs_.size() - 2);
    }

    std::vector<double> xs_, ys_, ms_;
};

}  // namespace spheretail
