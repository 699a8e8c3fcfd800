#pragma once

// Confidence intervals around classification accuracy.
//
// Every holdout / cross-validation / progressive procedure takes the test
// size n, the observed accuracy and a confidence level, and returns an
// interval clipped to [0, 1]. The bootstrap procedure takes the accuracies
// measured on each resample instead.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ci_planner {

/// Confidence level gamma in (0, 1); alpha = 1 - gamma.
class ConfidenceLevel {
public:
    explicit ConfidenceLevel(double gamma);
    double gamma() const noexcept { return gamma_; }
    double alpha() const noexcept { return 1.0 - gamma_; }

    friend bool operator==(ConfidenceLevel, ConfidenceLevel) = default;

private:
    double gamma_;
};

/// Accuracy as a fraction in [0, 1].
class Accuracy {
public:
    explicit Accuracy(double value);
    double value() const noexcept { return value_; }

private:
    double value_;
};

/// Number of test predictions, at least 1.
class SampleCount {
public:
    explicit SampleCount(std::int64_t n);
    std::int64_t value() const noexcept { return n_; }

private:
    std::int64_t n_;
};

/// Cross-validation fold count, at least 2. The upper bound k <= n is
/// checked by the operations that know n.
class FoldCount {
public:
    explicit FoldCount(std::int64_t k);
    std::int64_t value() const noexcept { return k_; }

private:
    std::int64_t k_;
};

struct Interval {
    double lower = 0.0;
    double upper = 1.0;
    bool clipped_low = false;
    bool clipped_high = false;

    bool contains(double x) const noexcept { return lower <= x && x <= upper; }
    double width() const noexcept { return upper - lower; }
    bool operator==(const Interval&) const = default;
};

/// Clips a raw [lower, upper] pair to [0, 1] and records which side moved.
Interval clip_interval(double raw_lower, double raw_upper) noexcept;

enum class Method {
    HoldoutLangford,
    HoldoutZ,
    HoldoutT,
    HoldoutWilson,
    HoldoutClopperPearson,
    Bootstrap,
    CrossValidation,
    ProgressiveValidation,
};

inline constexpr Method kAllMethods[] = {
    Method::HoldoutLangford,       Method::HoldoutZ,  Method::HoldoutT,
    Method::HoldoutWilson,         Method::HoldoutClopperPearson,
    Method::Bootstrap,             Method::CrossValidation,
    Method::ProgressiveValidation,
};

/// Wire name, e.g. "holdout_z_test" or "cv".
std::string_view method_name(Method m) noexcept;
std::string_view method_display_name(Method m) noexcept;
/// Parses a wire name; throws DomainError on unknown names.
Method parse_method(std::string_view name);
std::optional<Method> try_parse_method(std::string_view name) noexcept;

/// True for methods whose interval is acc +/- radius before clipping.
bool is_symmetric(Method m) noexcept;

/// Resample accuracies of a bootstrap experiment; non-empty, all in [0, 1].
class BootstrapSamples {
public:
    explicit BootstrapSamples(std::vector<double> values);
    std::span<const double> sorted() const noexcept { return sorted_; }
    std::size_t size() const noexcept { return sorted_.size(); }

private:
    std::vector<double> sorted_;
};

/// Inputs echoed back in a result, exactly as provided.
struct EstimateInputs {
    std::optional<std::int64_t> n;
    std::optional<double> acc;
    double confidence = 0.0;
    std::optional<std::int64_t> folds;
    std::optional<std::size_t> sample_count;
};

struct EstimateResult {
    Method method{};
    Interval interval;
    /// Pre-clip half-width for symmetric methods, (upper - lower) / 2 of the
    /// returned interval otherwise.
    double radius = 0.0;
    EstimateInputs inputs;
};

EstimateResult holdout_langford(SampleCount n, Accuracy acc, ConfidenceLevel gamma);
EstimateResult holdout_z(SampleCount n, Accuracy acc, ConfidenceLevel gamma);
/// Requires n >= 2 (df = n - 1).
EstimateResult holdout_t(SampleCount n, Accuracy acc, ConfidenceLevel gamma);
EstimateResult holdout_wilson(SampleCount n, Accuracy acc, ConfidenceLevel gamma);
/// Exact binomial interval; the success count is round(acc * n), half up.
EstimateResult holdout_clopper_pearson(SampleCount n, Accuracy acc, ConfidenceLevel gamma);
/// Percentile interval with linear interpolation at position q * (m - 1).
EstimateResult bootstrap_percentile(const BootstrapSamples& samples, ConfidenceLevel gamma);
/// n is the total over all folds; each fold tests n / k examples.
EstimateResult cross_validation(SampleCount n, FoldCount k, Accuracy acc, ConfidenceLevel gamma);
EstimateResult progressive_validation(SampleCount n, Accuracy acc, ConfidenceLevel gamma);

/// Radius formulas shared with the planner. All take alpha = 1 - gamma.
namespace radius {
double hoeffding(double n, double alpha);
/// sqrt(ln(2/alpha) * k / (2n)); takes a raw fold count so k = 1 reduces to
/// the holdout bound.
double cross_validation(std::int64_t n, std::int64_t k, double alpha);
double z_test(std::int64_t n, double alpha);
double t_test(std::int64_t n, double alpha);
}  // namespace radius

/// Empirical quantile with linear interpolation between order statistics at
/// fractional position q * (m - 1), 0-indexed.
double empirical_quantile(std::span<const double> sorted, double q);

/// Method-agnostic request: fields not used by the method are ignored,
/// missing required fields raise DomainError.
struct EstimateRequest {
    Method method{};
    std::optional<std::int64_t> n;
    std::optional<double> acc;
    double confidence = 0.0;
    std::optional<std::int64_t> folds;
    std::optional<std::vector<double>> samples;
};

EstimateResult estimate(const EstimateRequest& request);

struct GradedLevel {
    ConfidenceLevel level;
    Interval interval;
    double radius = 0.0;
};

struct GradedInterval {
    Method method{};
    double center = 0.0;
    std::vector<GradedLevel> levels;  // ascending by gamma
};

inline const std::vector<double> kDefaultGradedLevels{0.90, 0.95, 0.99};

/// Nested intervals at several confidence levels. `levels` must be strictly
/// ascending; request.confidence is ignored. The center is acc, or the
/// resample median for the bootstrap.
GradedInterval graded_intervals(const EstimateRequest& request, std::span<const double> levels);

}  // namespace ci_planner
