#include "ci_planner/planner.hpp"

#include "ci_planner/errors.hpp"
#include "ci_planner/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace ci_planner {

namespace {

void require_invertible(Method m, const char* what) {
    if (!supports_sample_size(m)) {
        throw UnsupportedMethodError("method " + std::string(method_name(m)) +
                                     " not invertible for " + what);
    }
}

std::optional<std::int64_t> fold_value(Method m, const std::optional<FoldCount>& folds) {
    if (m != Method::CrossValidation) return std::nullopt;
    if (!folds) throw DomainError("cross-validation planning requires the fold count k");
    return folds->value();
}

std::int64_t ceil_to_count(double x) {
    if (!(x < 9.0e15)) throw NumericError("required sample size is too large to represent");
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(x)));
}

}  // namespace

Radius::Radius(double value) : value_(value) {
    if (!(value > 0.0 && value <= 0.5)) {
        throw DomainError("radius must lie in (0, 0.5], got " + std::to_string(value));
    }
}

bool supports_sample_size(Method m) noexcept {
    switch (m) {
        case Method::HoldoutLangford:
        case Method::HoldoutZ:
        case Method::HoldoutT:
        case Method::CrossValidation:
        case Method::ProgressiveValidation:
            return true;
        default:
            return false;
    }
}

bool supports_confidence_level(Method m) noexcept { return supports_sample_size(m); }

double forward_radius(Method m, std::int64_t n, double alpha, std::optional<std::int64_t> folds) {
    switch (m) {
        case Method::HoldoutLangford:
        case Method::ProgressiveValidation:
            return radius::hoeffding(static_cast<double>(n), alpha);
        case Method::HoldoutZ:
            return radius::z_test(n, alpha);
        case Method::HoldoutT:
            return radius::t_test(n, alpha);
        case Method::CrossValidation:
            if (!folds) throw DomainError("cross-validation requires the fold count k");
            return radius::cross_validation(n, *folds, alpha);
        default:
            break;
    }
    throw UnsupportedMethodError("method " + std::string(method_name(m)) +
                                 " has no accuracy-independent radius");
}

PlanResult estimate_sample_size(Method m, Radius radius, ConfidenceLevel gamma,
                                std::optional<FoldCount> folds) {
    require_invertible(m, "sample size");
    const auto k = fold_value(m, folds);
    const double r = radius.value();
    const double alpha = gamma.alpha();
    const double log_term = std::log(2.0 / alpha);

    std::int64_t n = 0;
    std::int64_t step = 1;
    std::int64_t floor_n = 1;
    switch (m) {
        case Method::HoldoutLangford:
        case Method::ProgressiveValidation:
            n = ceil_to_count(log_term / (2.0 * r * r));
            break;
        case Method::CrossValidation:
            n = ceil_to_count(static_cast<double>(*k) * log_term / (2.0 * r * r));
            step = *k;
            floor_n = *k;
            break;
        case Method::HoldoutZ:
        case Method::HoldoutT: {
            const double z = kernel::normal_quantile(kernel::Probability(1.0 - alpha / 2.0));
            n = ceil_to_count(z * z / (4.0 * r * r));
            if (m == Method::HoldoutT) floor_n = 2;
            break;
        }
        default:
            break;
    }
    n = std::max(n, floor_n);

    const auto radius_at = [&](std::int64_t count) { return forward_radius(m, count, alpha, k); };

    // Rounding in the closed form can leave n one off in either direction.
    // For the t-test the z answer is a lower bound and this is the upward scan.
    while (radius_at(n) > r) ++n;
    while (n - step >= floor_n && radius_at(n - step) <= r) n -= step;

    return PlanResult{m, n, radius_at(n), PlanRequestEcho{r, gamma.gamma(), k}};
}

ConfidenceLevel estimate_confidence_level(Method m, SampleCount n, Radius radius,
                                          std::optional<FoldCount> folds) {
    if (!supports_confidence_level(m)) {
        throw UnsupportedMethodError("method " + std::string(method_name(m)) +
                                     " not invertible for confidence level");
    }
    const auto k = fold_value(m, folds);
    if (k && *k > n.value()) {
        throw DomainError("fold count k=" + std::to_string(*k) +
                          " exceeds the number of samples n=" + std::to_string(n.value()));
    }
    const double r = radius.value();
    const auto dn = static_cast<double>(n.value());

    double gamma = 0.0;
    switch (m) {
        case Method::HoldoutLangford:
        case Method::ProgressiveValidation:
            gamma = 1.0 - 2.0 * std::exp(-2.0 * dn * r * r);
            break;
        case Method::CrossValidation:
            gamma = 1.0 - 2.0 * std::exp(-2.0 * dn * r * r / static_cast<double>(*k));
            break;
        case Method::HoldoutZ:
            // 2 Phi(x) - 1 == erf(x / sqrt 2)
            gamma = std::erf(2.0 * r * std::sqrt(dn) / std::numbers::sqrt2);
            break;
        case Method::HoldoutT: {
            if (n.value() < 2) throw DomainError("t-test requires at least 2 samples");
            const double t = 2.0 * r * std::sqrt(dn);
            const kernel::DegreesOfFreedom df(n.value() - 1);
            gamma = 1.0 - 2.0 * (1.0 - kernel::t_cdf(t, df));
            break;
        }
        default:
            break;
    }
    if (!(gamma > 0.0)) {
        throw UnattainableError("radius " + std::to_string(r) +
                                " unattainable at any confidence for n=" +
                                std::to_string(n.value()));
    }
    if (gamma >= 1.0) gamma = std::nextafter(1.0, 0.0);
    return ConfidenceLevel(gamma);
}

}  // namespace ci_planner
