#include "ci_planner/guidance.hpp"

#include "ci_planner/errors.hpp"

#include <string>

namespace ci_planner::guidance {

namespace {

constexpr std::string_view kWhyClopperPearson =
    "Exact binomial interval; guaranteed coverage even for small test sets.";
constexpr std::string_view kWhyT =
    "Student-t quantile widens the normal interval to account for a small sample.";
constexpr std::string_view kWhyLangford =
    "Distribution-free Hoeffding bound; conservative and valid for any n.";
constexpr std::string_view kWhyWilson =
    "Score interval with near-nominal coverage that stays inside [0, 1].";
constexpr std::string_view kWhyZ =
    "Normal approximation with worst-case variance; simple and accurate for large n.";
constexpr std::string_view kWhyBootstrap =
    "Percentile interval over the accuracies measured on each resample.";
constexpr std::string_view kWhyCrossValidation =
    "Hoeffding bound at the per-fold test size n/k.";
constexpr std::string_view kWhyProgressive =
    "Progressive validation concentrates like a holdout of the same size.";

std::string_view rationale(Method m) {
    switch (m) {
        case Method::HoldoutClopperPearson: return kWhyClopperPearson;
        case Method::HoldoutT: return kWhyT;
        case Method::HoldoutLangford: return kWhyLangford;
        case Method::HoldoutWilson: return kWhyWilson;
        case Method::HoldoutZ: return kWhyZ;
        case Method::Bootstrap: return kWhyBootstrap;
        case Method::CrossValidation: return kWhyCrossValidation;
        case Method::ProgressiveValidation: return kWhyProgressive;
    }
    return {};
}

std::vector<Method> ranking(const ExperimentDescription& d) {
    switch (d.scheme) {
        case Scheme::Holdout:
            // Without n we cannot tell a small study apart; use the large-n rows.
            if (d.n && *d.n < kSmallSampleThreshold) {
                return {Method::HoldoutClopperPearson, Method::HoldoutT, Method::HoldoutLangford,
                        Method::HoldoutWilson, Method::HoldoutZ};
            }
            if (d.wants_distribution_free) {
                return {Method::HoldoutLangford, Method::HoldoutClopperPearson,
                        Method::HoldoutWilson, Method::HoldoutZ, Method::HoldoutT};
            }
            return {Method::HoldoutWilson, Method::HoldoutZ, Method::HoldoutClopperPearson,
                    Method::HoldoutT, Method::HoldoutLangford};
        case Scheme::Bootstrap: return {Method::Bootstrap};
        case Scheme::CrossValidation: return {Method::CrossValidation};
        case Scheme::Progressive: return {Method::ProgressiveValidation};
    }
    return {};
}

}  // namespace

std::string_view scheme_name(Scheme s) noexcept {
    switch (s) {
        case Scheme::Holdout: return "holdout";
        case Scheme::Bootstrap: return "bootstrap";
        case Scheme::CrossValidation: return "cross_validation";
        case Scheme::Progressive: return "progressive";
    }
    return "unknown";
}

Scheme parse_scheme(std::string_view name) {
    for (Scheme s : kAllSchemes) {
        if (scheme_name(s) == name) return s;
    }
    throw DomainError("unknown scheme '" + std::string(name) + "'");
}

std::vector<Method> applicable_methods(Scheme s) {
    switch (s) {
        case Scheme::Holdout:
            return {Method::HoldoutLangford, Method::HoldoutZ, Method::HoldoutT,
                    Method::HoldoutWilson, Method::HoldoutClopperPearson};
        case Scheme::Bootstrap: return {Method::Bootstrap};
        case Scheme::CrossValidation: return {Method::CrossValidation};
        case Scheme::Progressive: return {Method::ProgressiveValidation};
    }
    return {};
}

Recommendation recommend(const ExperimentDescription& desc) {
    if (desc.n && *desc.n < 1) {
        throw DomainError("sample count must be at least 1, got " + std::to_string(*desc.n));
    }
    if (desc.folds) {
        if (desc.scheme != Scheme::CrossValidation) {
            throw DomainError("a fold count only applies to the cross_validation scheme");
        }
        const FoldCount k(*desc.folds);
        if (desc.n && k.value() > *desc.n) {
            throw DomainError("fold count k=" + std::to_string(k.value()) +
                              " exceeds the number of samples n=" + std::to_string(*desc.n));
        }
    }
    if (desc.scheme == Scheme::Bootstrap && !desc.has_resample_accuracies) {
        throw DomainError("bootstrap method requires the list of resample accuracies");
    }

    Recommendation out{desc.scheme, {}};
    for (Method m : ranking(desc)) out.ranked.push_back(RankedMethod{m, rationale(m)});
    return out;
}

}  // namespace ci_planner::guidance
