#pragma once

// Reference implementations used only by tests. They deliberately share no
// code with the library: Phi by its Taylor series, the binomial CDF by
// explicit pmf summation in long double, and a separate bisection loop.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace oracle {

/// Phi(x) = 1/2 + phi(x) * sum_k x^(2k+1) / (1*3*...*(2k+1)); fine for |x| < 8.
inline double normal_cdf_series(double x) {
    long double term = x;
    long double sum = x;
    for (int k = 1; k < 500; ++k) {
        term *= static_cast<long double>(x) * x / (2.0L * k + 1.0L);
        sum += term;
        if (std::fabs(static_cast<double>(term)) < 1e-22) break;
    }
    const long double density =
        std::exp(-0.5L * x * x) / std::sqrt(2.0L * std::numbers::pi_v<long double>);
    return static_cast<double>(0.5L + density * sum);
}

inline long double choose(std::int64_t n, std::int64_t k) {
    long double c = 1.0L;
    for (std::int64_t i = 1; i <= k; ++i) c = c * static_cast<long double>(n - k + i) / i;
    return c;
}

/// Sum of C(n, i) p^i (1-p)^(n-i) for i <= k.
inline double binomial_cdf_direct(std::int64_t k, std::int64_t n, double p) {
    long double sum = 0.0L;
    for (std::int64_t i = 0; i <= k; ++i) {
        sum += choose(n, i) * std::pow(static_cast<long double>(p), static_cast<long double>(i)) *
               std::pow(1.0L - p, static_cast<long double>(n - i));
    }
    return static_cast<double>(sum);
}

/// Upper tail P(X > k), summed over i = k+1..n independently of the CDF.
inline double binomial_upper_direct(std::int64_t k, std::int64_t n, double p) {
    long double sum = 0.0L;
    for (std::int64_t i = k + 1; i <= n; ++i) {
        sum += choose(n, i) * std::pow(static_cast<long double>(p), static_cast<long double>(i)) *
               std::pow(1.0L - p, static_cast<long double>(n - i));
    }
    return static_cast<double>(sum);
}

/// Root of a decreasing function g on [0, 1] (g(0) >= target >= g(1)).
template <typename F>
double bisect_decreasing(F g, double target) {
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Clopper-Pearson bounds for k successes in n trials at level gamma.
inline std::pair<double, double> clopper_pearson(std::int64_t k, std::int64_t n, double gamma) {
    const double half_alpha = (1.0 - gamma) / 2.0;
    double lower = 0.0;
    double upper = 1.0;
    if (k > 0) {
        lower = bisect_decreasing([&](double p) { return binomial_cdf_direct(k - 1, n, p); },
                                  1.0 - half_alpha);
    }
    if (k < n) {
        upper = bisect_decreasing([&](double p) { return binomial_cdf_direct(k, n, p); }, half_alpha);
    }
    return {lower, upper};
}

/// Student-t quantiles with closed forms: df = 1 (Cauchy) and df = 2.
inline double t_quantile_df1(double p) { return std::tan(std::numbers::pi * (p - 0.5)); }
inline double t_quantile_df2(double p) { return (2.0 * p - 1.0) / std::sqrt(2.0 * p * (1.0 - p)); }

}  // namespace oracle
