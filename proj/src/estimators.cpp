#include "ci_planner/estimators.hpp"

#include "ci_planner/errors.hpp"
#include "ci_planner/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ci_planner {

namespace {

// Tolerance on the binomial CDF when inverting the Clopper-Pearson tails.
constexpr double kTailInversionTol = 1e-12;

EstimateInputs holdout_inputs(SampleCount n, Accuracy acc, ConfidenceLevel gamma) {
    return EstimateInputs{n.value(), acc.value(), gamma.gamma(), std::nullopt, std::nullopt};
}

EstimateResult symmetric_result(Method method, double center, double r, EstimateInputs inputs) {
    return EstimateResult{method, clip_interval(center - r, center + r), r, std::move(inputs)};
}

double two_sided_z(ConfidenceLevel gamma) {
    return kernel::normal_quantile(kernel::Probability(1.0 - gamma.alpha() / 2.0));
}

}  // namespace

ConfidenceLevel::ConfidenceLevel(double gamma) : gamma_(gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw DomainError("confidence level must lie in (0, 1), got " + std::to_string(gamma));
    }
}

Accuracy::Accuracy(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw DomainError("accuracy must lie in [0, 1], got " + std::to_string(value));
    }
}

SampleCount::SampleCount(std::int64_t n) : n_(n) {
    if (n < 1) throw DomainError("sample count must be at least 1, got " + std::to_string(n));
}

FoldCount::FoldCount(std::int64_t k) : k_(k) {
    if (k < 2) throw DomainError("fold count must be at least 2, got " + std::to_string(k));
}

Interval clip_interval(double raw_lower, double raw_upper) noexcept {
    Interval out;
    out.clipped_low = raw_lower < 0.0;
    out.clipped_high = raw_upper > 1.0;
    out.lower = out.clipped_low ? 0.0 : raw_lower;
    out.upper = out.clipped_high ? 1.0 : raw_upper;
    return out;
}

std::string_view method_name(Method m) noexcept {
    switch (m) {
        case Method::HoldoutLangford: return "holdout_langford";
        case Method::HoldoutZ: return "holdout_z_test";
        case Method::HoldoutT: return "holdout_t_test";
        case Method::HoldoutWilson: return "holdout_wilson";
        case Method::HoldoutClopperPearson: return "holdout_clopper_pearson";
        case Method::Bootstrap: return "bootstrap";
        case Method::CrossValidation: return "cv";
        case Method::ProgressiveValidation: return "progressive";
    }
    return "unknown";
}

std::string_view method_display_name(Method m) noexcept {
    switch (m) {
        case Method::HoldoutLangford: return "Holdout (Langford / Hoeffding bound)";
        case Method::HoldoutZ: return "Holdout (Z-test)";
        case Method::HoldoutT: return "Holdout (t-test)";
        case Method::HoldoutWilson: return "Holdout (Wilson score)";
        case Method::HoldoutClopperPearson: return "Holdout (Clopper-Pearson exact)";
        case Method::Bootstrap: return "Bootstrap (percentile)";
        case Method::CrossValidation: return "Cross-validation";
        case Method::ProgressiveValidation: return "Progressive validation";
    }
    return "unknown";
}

std::optional<Method> try_parse_method(std::string_view name) noexcept {
    for (Method m : kAllMethods) {
        if (method_name(m) == name) return m;
    }
    return std::nullopt;
}

Method parse_method(std::string_view name) {
    if (auto m = try_parse_method(name)) return *m;
    throw DomainError("unknown method '" + std::string(name) + "'");
}

bool is_symmetric(Method m) noexcept {
    switch (m) {
        case Method::HoldoutWilson:
        case Method::HoldoutClopperPearson:
        case Method::Bootstrap:
            return false;
        default:
            return true;
    }
}

BootstrapSamples::BootstrapSamples(std::vector<double> values) : sorted_(std::move(values)) {
    if (sorted_.empty()) throw DomainError("bootstrap requires at least one resample accuracy");
    for (double v : sorted_) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DomainError("bootstrap resample accuracy must lie in [0, 1], got " +
                              std::to_string(v));
        }
    }
    std::sort(sorted_.begin(), sorted_.end());
}

namespace radius {

double hoeffding(double n, double alpha) { return std::sqrt(std::log(2.0 / alpha) / (2.0 * n)); }

double cross_validation(std::int64_t n, std::int64_t k, double alpha) {
    return std::sqrt(std::log(2.0 / alpha) * static_cast<double>(k) /
                     (2.0 * static_cast<double>(n)));
}

double z_test(std::int64_t n, double alpha) {
    const double z = kernel::normal_quantile(kernel::Probability(1.0 - alpha / 2.0));
    return z * std::sqrt(0.25 / static_cast<double>(n));
}

double t_test(std::int64_t n, double alpha) {
    if (n < 2) throw DomainError("t-test requires at least 2 samples");
    const double t = kernel::t_quantile(kernel::Probability(1.0 - alpha / 2.0),
                                        kernel::DegreesOfFreedom(n - 1));
    return t * std::sqrt(0.25 / static_cast<double>(n));
}

}  // namespace radius

double empirical_quantile(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw DomainError("empirical_quantile: empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(i);
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

EstimateResult holdout_langford(SampleCount n, Accuracy acc, ConfidenceLevel gamma) {
    const double r = radius::hoeffding(static_cast<double>(n.value()), gamma.alpha());
    return symmetric_result(Method::HoldoutLangford, acc.value(), r, holdout_inputs(n, acc, gamma));
}

EstimateResult holdout_z(SampleCount n, Accuracy acc, ConfidenceLevel gamma) {
    const double r = radius::z_test(n.value(), gamma.alpha());
    return symmetric_result(Method::HoldoutZ, acc.value(), r, holdout_inputs(n, acc, gamma));
}

EstimateResult holdout_t(SampleCount n, Accuracy acc, ConfidenceLevel gamma) {
    const double r = radius::t_test(n.value(), gamma.alpha());
    return symmetric_result(Method::HoldoutT, acc.value(), r, holdout_inputs(n, acc, gamma));
}

EstimateResult holdout_wilson(SampleCount n, Accuracy acc, ConfidenceLevel gamma) {
    const double p = acc.value();
    const auto dn = static_cast<double>(n.value());
    const double z = two_sided_z(gamma);
    const double z2 = z * z;
    const double denom = 1.0 + z2 / dn;
    const double center = (p + z2 / (2.0 * dn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / dn + z2 / (4.0 * dn * dn)) / denom;

    // The score interval lies inside [0, 1] analytically and reaches the
    // boundary exactly at p = 0 or 1; clamping only removes rounding noise.
    Interval interval;
    interval.lower = p == 0.0 ? 0.0 : std::clamp(center - half, 0.0, 1.0);
    interval.upper = p == 1.0 ? 1.0 : std::clamp(center + half, 0.0, 1.0);
    return EstimateResult{Method::HoldoutWilson, interval, interval.width() / 2.0,
                          holdout_inputs(n, acc, gamma)};
}

EstimateResult holdout_clopper_pearson(SampleCount n, Accuracy acc, ConfidenceLevel gamma) {
    const std::int64_t trials = n.value();
    const auto successes = std::min<std::int64_t>(
        trials, static_cast<std::int64_t>(std::floor(acc.value() * static_cast<double>(trials) + 0.5)));
    const double half_alpha = gamma.alpha() / 2.0;

    Interval interval;
    if (successes > 0) {
        // P(X >= k | p) = 1 - F(k - 1; p) rises with p; find where it hits alpha/2.
        const auto cdf = [&](double p) {
            return kernel::binomial_cdf(successes - 1, trials, kernel::Probability(p));
        };
        interval.lower = kernel::bisect(cdf, 0.0, 1.0, 1.0 - half_alpha, kTailInversionTol);
    } else {
        interval.lower = 0.0;
    }
    if (successes < trials) {
        const auto cdf = [&](double p) {
            return kernel::binomial_cdf(successes, trials, kernel::Probability(p));
        };
        interval.upper = kernel::bisect(cdf, 0.0, 1.0, half_alpha, kTailInversionTol);
    } else {
        interval.upper = 1.0;
    }
    return EstimateResult{Method::HoldoutClopperPearson, interval, interval.width() / 2.0,
                          holdout_inputs(n, acc, gamma)};
}

EstimateResult bootstrap_percentile(const BootstrapSamples& samples, ConfidenceLevel gamma) {
    const double half_alpha = gamma.alpha() / 2.0;
    Interval interval;
    interval.lower = empirical_quantile(samples.sorted(), half_alpha);
    interval.upper = empirical_quantile(samples.sorted(), 1.0 - half_alpha);
    EstimateInputs inputs;
    inputs.confidence = gamma.gamma();
    inputs.sample_count = samples.size();
    return EstimateResult{Method::Bootstrap, interval, interval.width() / 2.0, inputs};
}

EstimateResult cross_validation(SampleCount n, FoldCount k, Accuracy acc, ConfidenceLevel gamma) {
    if (k.value() > n.value()) {
        throw DomainError("fold count k=" + std::to_string(k.value()) +
                          " exceeds the number of samples n=" + std::to_string(n.value()));
    }
    const double r = radius::cross_validation(n.value(), k.value(), gamma.alpha());
    auto inputs = holdout_inputs(n, acc, gamma);
    inputs.folds = k.value();
    return symmetric_result(Method::CrossValidation, acc.value(), r, std::move(inputs));
}

EstimateResult progressive_validation(SampleCount n, Accuracy acc, ConfidenceLevel gamma) {
    const double r = radius::hoeffding(static_cast<double>(n.value()), gamma.alpha());
    return symmetric_result(Method::ProgressiveValidation, acc.value(), r,
                            holdout_inputs(n, acc, gamma));
}

namespace {

template <typename T>
const T& need(const std::optional<T>& field, Method m, const char* name) {
    if (!field) {
        throw DomainError("method " + std::string(method_name(m)) + " requires '" + name + "'");
    }
    return *field;
}

}  // namespace

EstimateResult estimate(const EstimateRequest& req) {
    const ConfidenceLevel gamma(req.confidence);
    const Method m = req.method;
    if (m == Method::Bootstrap) {
        return bootstrap_percentile(BootstrapSamples(need(req.samples, m, "samples")), gamma);
    }
    const SampleCount n(need(req.n, m, "n"));
    const Accuracy acc(need(req.acc, m, "acc"));
    switch (m) {
        case Method::HoldoutLangford: return holdout_langford(n, acc, gamma);
        case Method::HoldoutZ: return holdout_z(n, acc, gamma);
        case Method::HoldoutT: return holdout_t(n, acc, gamma);
        case Method::HoldoutWilson: return holdout_wilson(n, acc, gamma);
        case Method::HoldoutClopperPearson: return holdout_clopper_pearson(n, acc, gamma);
        case Method::CrossValidation:
            return cross_validation(n, FoldCount(need(req.folds, m, "folds")), acc, gamma);
        case Method::ProgressiveValidation: return progressive_validation(n, acc, gamma);
        case Method::Bootstrap: break;
    }
    throw DomainError("unhandled method");
}

GradedInterval graded_intervals(const EstimateRequest& request, std::span<const double> levels) {
    if (levels.empty()) throw DomainError("graded intervals need at least one confidence level");
    for (std::size_t i = 1; i < levels.size(); ++i) {
        if (!(levels[i] > levels[i - 1])) {
            throw DomainError("confidence levels must be strictly ascending");
        }
    }

    GradedInterval out;
    out.method = request.method;
    if (request.method == Method::Bootstrap) {
        const BootstrapSamples samples(need(request.samples, request.method, "samples"));
        out.center = empirical_quantile(samples.sorted(), 0.5);
    } else {
        out.center = need(request.acc, request.method, "acc");
    }

    EstimateRequest at_level = request;
    for (double level : levels) {
        at_level.confidence = level;
        const EstimateResult r = estimate(at_level);
        out.levels.push_back(GradedLevel{ConfidenceLevel(level), r.interval, r.radius});
    }
    return out;
}

}  // namespace ci_planner
