#pragma once

// Method-selection assistant: maps a described experiment to a ranked list
// of applicable estimation methods, each with a fixed one-line rationale.

#include "ci_planner/estimators.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ci_planner::guidance {

enum class Scheme { Holdout, Bootstrap, CrossValidation, Progressive };

inline constexpr Scheme kAllSchemes[] = {Scheme::Holdout, Scheme::Bootstrap,
                                         Scheme::CrossValidation, Scheme::Progressive};

std::string_view scheme_name(Scheme s) noexcept;
/// Accepts "holdout", "bootstrap", "cross_validation", "progressive".
Scheme parse_scheme(std::string_view name);

/// Holdout experiments below this size get the small-sample ranking.
inline constexpr std::int64_t kSmallSampleThreshold = 30;

struct ExperimentDescription {
    Scheme scheme = Scheme::Holdout;
    std::optional<std::int64_t> n;
    std::optional<std::int64_t> folds;
    bool wants_distribution_free = false;
    bool has_resample_accuracies = false;
};

struct RankedMethod {
    Method method{};
    std::string_view rationale;
};

struct Recommendation {
    Scheme scheme{};
    std::vector<RankedMethod> ranked;
};

/// Methods that can be used for an experiment run under `s`.
std::vector<Method> applicable_methods(Scheme s);

/// Throws DomainError for inconsistent descriptions (folds outside
/// cross-validation, k > n, n < 1) and for a bootstrap without resample
/// accuracies.
Recommendation recommend(const ExperimentDescription& desc);

}  // namespace ci_planner::guidance
