#include "ci_planner/kernel.hpp"

#include "ci_planner/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace ci_planner::kernel {

namespace {

constexpr std::int64_t kDirectSummationLimit = 10'000;
constexpr int kBisectMaxIterations = 200;
constexpr double kBisectMinWidth = 1e-12;

void require_open_unit(double p, const char* what) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError(std::string(what) + ": probability must lie in (0, 1), got " +
                          std::to_string(p));
    }
}

// Acklam's rational approximation to the normal quantile (relative error
// about 1.15e-9 before refinement).
double acklam_quantile(double p) {
    static constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02,
                                             -2.759285104469687e+02, 1.383577518672690e+02,
                                             -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02,
                                             -1.556989798598866e+02, 6.680131188771972e+01,
                                             -1.328068155288572e+01};
    static constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01,
                                             -2.400758277161838e+00, -2.549732539343734e+00,
                                             4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01,
                                             2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double x, double a, double b) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    constexpr int max_iter = 100'000;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) return h;
    }
    throw NumericError("incomplete beta continued fraction did not converge");
}

// I_x(a, b) with y = 1 - x supplied separately so callers can avoid the
// cancellation in 1 - x.
double incomplete_beta_xy(double x, double y, double a, double b) {
    if (x <= 0.0) return 0.0;
    if (y <= 0.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log(y);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(x, a, b) / a;
    }
    return 1.0 - front * beta_continued_fraction(y, b, a) / b;
}

// Upper tail of the t distribution, P(T > t) for t >= 0.
double t_upper_tail(double t, double df) {
    const double t2 = t * t;
    const double x = df / (df + t2);
    const double y = t2 / (df + t2);
    return 0.5 * incomplete_beta_xy(x, y, 0.5 * df, 0.5);
}

double log_binomial_pmf(std::int64_t i, std::int64_t n, double log_p, double log_q) {
    const auto di = static_cast<double>(i);
    const auto dn = static_cast<double>(n);
    return std::lgamma(dn + 1.0) - std::lgamma(di + 1.0) - std::lgamma(dn - di + 1.0) +
           di * log_p + (dn - di) * log_q;
}

}  // namespace

Probability::Probability(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw DomainError("probability must lie in [0, 1], got " + std::to_string(value));
    }
}

DegreesOfFreedom::DegreesOfFreedom(std::int64_t value) : value_(value) {
    if (value < 1) {
        throw DomainError("degrees of freedom must be at least 1, got " + std::to_string(value));
    }
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(Probability prob) {
    const double p = prob.value();
    require_open_unit(p, "normal_quantile");
    if (p == 0.5) return 0.0;
    // Solve in the lower half and mirror so q(1-p) = -q(p) holds exactly.
    const bool upper = p > 0.5;
    const double lower_p = upper ? 1.0 - p : p;
    double x = acklam_quantile(lower_p);
    // One Halley step on Phi(x) - p.
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - lower_p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return upper ? -x : x;
}

double incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0 && b > 0.0)) throw DomainError("incomplete_beta: shape parameters must be > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete_beta: x must lie in [0, 1]");
    return incomplete_beta_xy(x, 1.0 - x, a, b);
}

double t_cdf(double t, DegreesOfFreedom df) {
    if (std::isnan(t)) throw NumericError("t_cdf: NaN argument");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double tail = t_upper_tail(std::fabs(t), static_cast<double>(df.value()));
    return t >= 0.0 ? 1.0 - tail : tail;
}

double t_quantile(Probability prob, DegreesOfFreedom df) {
    const double p = prob.value();
    require_open_unit(p, "t_quantile");
    if (p == 0.5) return 0.0;
    const bool upper = p > 0.5;
    // Work on the upper tail probability, which is accurate for small tails.
    const double tail = upper ? 1.0 - p : p;
    const auto dof = static_cast<double>(df.value());
    const auto upper_tail = [dof](double t) { return t_upper_tail(t, dof); };

    double hi = 50.0;
    while (upper_tail(hi) > tail) {
        hi *= 2.0;
        if (!std::isfinite(hi)) throw NumericError("t_quantile: bracket diverged");
    }
    const double t = bisect(upper_tail, 0.0, hi, tail, 0.0);
    return upper ? t : -t;
}

double binomial_cdf(std::int64_t k, std::int64_t n, Probability prob) {
    if (n < 1) throw DomainError("binomial_cdf: n must be at least 1");
    if (k < 0 || k > n) {
        throw DomainError("binomial_cdf: k must satisfy 0 <= k <= n, got k=" + std::to_string(k) +
                          ", n=" + std::to_string(n));
    }
    const double p = prob.value();
    if (k == n || p == 0.0) return 1.0;
    if (p == 1.0) return 0.0;

    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);

    if (n <= kDirectSummationLimit) {
        const double log_ratio = log_p - log_q;
        if (static_cast<double>(k) > static_cast<double>(n) * p) {
            // Sum the (smaller) upper tail from i = n down to k + 1.
            double log_term = static_cast<double>(n) * log_p;
            double upper = std::exp(log_term);
            for (std::int64_t i = n; i > k + 1; --i) {
                log_term += std::log(static_cast<double>(i) / static_cast<double>(n - i + 1)) - log_ratio;
                upper += std::exp(log_term);
            }
            return std::clamp(1.0 - upper, 0.0, 1.0);
        }
        double log_term = static_cast<double>(n) * log_q;
        double sum = std::exp(log_term);
        for (std::int64_t i = 0; i < k; ++i) {
            log_term += std::log(static_cast<double>(n - i) / static_cast<double>(i + 1)) + log_ratio;
            sum += std::exp(log_term);
        }
        return std::min(sum, 1.0);
    }

    // Large n: sum only the tail that lies away from the mode, starting at its
    // largest term, and stop once terms no longer contribute.
    const auto mode = static_cast<std::int64_t>(std::floor(static_cast<double>(n + 1) * p));
    const double odds = p / (1.0 - p);
    if (k <= mode) {
        double term = std::exp(log_binomial_pmf(k, n, log_p, log_q));
        double sum = term;
        for (std::int64_t i = k; i > 0; --i) {
            term *= static_cast<double>(i) / (static_cast<double>(n - i + 1) * odds);
            sum += term;
            if (term <= sum * 1e-17) break;
        }
        return std::min(sum, 1.0);
    }
    double term = std::exp(log_binomial_pmf(k + 1, n, log_p, log_q));
    double upper = term;
    for (std::int64_t i = k + 1; i < n; ++i) {
        term *= static_cast<double>(n - i) / static_cast<double>(i + 1) * odds;
        upper += term;
        if (term <= upper * 1e-17) break;
    }
    return std::clamp(1.0 - upper, 0.0, 1.0);
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double target,
              double tol) {
    if (!(tol >= 0.0)) throw DomainError("bisect: tolerance must be non-negative");
    if (!(lo <= hi)) throw DomainError("bisect: require lo <= hi");

    const auto eval = [&f](double x) {
        const double v = f(x);
        if (!std::isfinite(v)) {
            throw NumericError("bisect: non-finite function value at x=" + std::to_string(x));
        }
        return v;
    };

    double f_lo = eval(lo);
    const double f_hi = eval(hi);
    if (std::fabs(f_lo - target) <= tol) return lo;
    if (std::fabs(f_hi - target) <= tol) return hi;
    if ((f_lo - target) * (f_hi - target) > 0.0) {
        throw BracketError("bisect: target " + std::to_string(target) + " not bracketed by f(" +
                           std::to_string(lo) + ")=" + std::to_string(f_lo) + " and f(" +
                           std::to_string(hi) + ")=" + std::to_string(f_hi));
    }

    double mid = 0.5 * (lo + hi);
    for (int iter = 0; iter < kBisectMaxIterations; ++iter) {
        mid = 0.5 * (lo + hi);
        const double f_mid = eval(mid);
        if (std::fabs(f_mid - target) <= tol || hi - lo < kBisectMinWidth) return mid;
        if ((f_lo - target) * (f_mid - target) <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    return mid;
}

}  // namespace ci_planner::kernel
