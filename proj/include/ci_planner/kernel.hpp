#pragma once

// Numerical primitives shared by the estimators: distribution quantiles,
// CDFs and a monotone bisection root finder. Everything here is pure.

#include <cstdint>
#include <functional>

namespace ci_planner::kernel {

/// A probability in [0, 1].
class Probability {
public:
    explicit Probability(double value);
    double value() const noexcept { return value_; }

private:
    double value_;
};

/// Student-t degrees of freedom, at least 1.
class DegreesOfFreedom {
public:
    explicit DegreesOfFreedom(std::int64_t value);
    std::int64_t value() const noexcept { return value_; }

private:
    std::int64_t value_;
};

/// Standard normal CDF.
double normal_cdf(double x) noexcept;

/// Inverse of the standard normal CDF; p must lie in (0, 1).
double normal_quantile(Probability p);

/// Regularized incomplete beta function I_x(a, b), a, b > 0, x in [0, 1].
double incomplete_beta(double x, double a, double b);

/// Student-t CDF with `df` degrees of freedom.
double t_cdf(double t, DegreesOfFreedom df);

/// Inverse of the Student-t CDF; p must lie in (0, 1).
double t_quantile(Probability p, DegreesOfFreedom df);

/// P(X <= k) for X ~ Binomial(n, p).
///
/// Terms are generated in log space so large n (up to and beyond 1e6) do not
/// underflow the leading (1-p)^n factor. Above 1e4 trials only the terms that
/// carry mass near k are summed, starting from a log-gamma evaluated pmf.
double binomial_cdf(std::int64_t k, std::int64_t n, Probability p);

/// Finds x in [lo, hi] with f(x) close to target for monotone f.
///
/// Stops once |f(x) - target| <= tol or the bracket is narrower than 1e-12,
/// and never runs more than 200 halvings. Throws BracketError when target is
/// not between f(lo) and f(hi) and NumericError on a non-finite evaluation.
double bisect(const std::function<double(double)>& f, double lo, double hi, double target,
              double tol);

}  // namespace ci_planner::kernel
