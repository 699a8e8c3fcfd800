#pragma once

// Inverse problems: the smallest test set that reaches a target radius, and
// the confidence level a given test set supports for a target radius.
//
// Only methods whose radius does not depend on the observed accuracy can be
// inverted: Langford, Z, t, cross-validation and progressive validation.

#include "ci_planner/estimators.hpp"

#include <cstdint>
#include <optional>

namespace ci_planner {

/// Target half-width in (0, 0.5].
class Radius {
public:
    explicit Radius(double value);
    double value() const noexcept { return value_; }

private:
    double value_;
};

struct PlanRequestEcho {
    double radius = 0.0;
    double confidence = 0.0;
    std::optional<std::int64_t> folds;
};

struct PlanResult {
    Method method{};
    std::int64_t required_n = 0;
    double achieved_radius = 0.0;
    PlanRequestEcho requested;
};

bool supports_sample_size(Method m) noexcept;
bool supports_confidence_level(Method m) noexcept;

/// Radius the method reports at n, independent of accuracy. `folds` is used
/// only for cross-validation.
double forward_radius(Method m, std::int64_t n, double alpha, std::optional<std::int64_t> folds);

/// Minimum n such that the method's radius at n is <= radius. The closed
/// form is checked against the forward radius and nudged so that the
/// radius at required_n - step exceeds the target (step = k for
/// cross-validation, otherwise 1).
PlanResult estimate_sample_size(Method m, Radius radius, ConfidenceLevel gamma,
                                std::optional<FoldCount> folds = std::nullopt);

/// Confidence level at which the interval for n samples has the given
/// radius. Values that round to 1 are reported as the largest double below 1.
ConfidenceLevel estimate_confidence_level(Method m, SampleCount n, Radius radius,
                                          std::optional<FoldCount> folds = std::nullopt);

}  // namespace ci_planner
