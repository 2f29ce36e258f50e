#pragma once

#include <cmath>

namespace qkdcopy {

/// Kahan compensated accumulator.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

/// Binomial coefficient, exact in double for the small n used here.
inline double choose(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (k > n - k) k = n - k;
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(c);
}

/// P(X = k) for X ~ Binomial(n, q), evaluated in log space so that tiny q and
/// large exponents do not underflow prematurely.
inline double binom_pmf(int n, int k, double q) {
    if (k < 0 || k > n) return 0.0;
    if (q <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (q >= 1.0) return k == n ? 1.0 : 0.0;
    double lp = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                k * std::log(q) + (n - k) * std::log1p(-q);
    return std::exp(lp);
}

/// Upper tail P(X >= kmin) for X ~ Binomial(n, q). Summed from the smallest
/// term upward with compensation.
inline double binom_tail_upper(int n, int kmin, double q) {
    if (kmin <= 0) return 1.0;
    if (kmin > n) return 0.0;
    KahanSum acc;
    for (int k = n; k >= kmin; --k) acc.add(binom_pmf(n, k, q));
    double v = acc.value();
    return v < 1.0 ? v : 1.0;
}

}  // namespace qkdcopy
