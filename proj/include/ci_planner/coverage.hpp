#pragma once

// Monte Carlo coverage experiments: draw Bernoulli(p) test sets, build the
// interval from the observed accuracy, and count how often it contains p.
//
// Random streams are counter based. Trial t of grid cell c under seed s uses
//
//   cell_seed    = s + c * 0x9E3779B97F4A7C15          (mod 2^64)
//   stream state = mix(mix(cell_seed) + t)              (mod 2^64)
//
// where mix is the SplitMix64 finalizer, and then produces SplitMix64
// outputs from that state. A draw u = (x >> 11) * 2^-53 is a success iff
// u < p. Cell 0 uses the seed unchanged, so a one-cell grid reproduces
// simulate_coverage exactly. Trials are independent of execution order.

#include "ci_planner/estimators.hpp"
#include "ci_planner/kernel.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ci_planner::coverage {

struct CoverageSpec {
    Method method{};
    double true_accuracy = 0.5;
    std::int64_t n = 1;
    double gamma = 0.9;
    std::int64_t trials = 1;
    std::uint64_t seed = 0;
    std::optional<std::int64_t> folds;

    bool operator==(const CoverageSpec&) const = default;
};

struct CoverageReport {
    CoverageSpec spec;
    std::int64_t covered = 0;
    double empirical_coverage = 0.0;
    double mean_width = 0.0;
    double clip_frequency = 0.0;

    bool operator==(const CoverageReport&) const = default;
};

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;
std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t cell) noexcept;

/// SplitMix64 stream for one trial.
class TrialStream {
public:
    TrialStream(std::uint64_t seed, std::uint64_t trial) noexcept;
    std::uint64_t next() noexcept;
    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() noexcept;

private:
    std::uint64_t state_;
};

/// Checks the spec and throws DomainError / UnsupportedMethodError.
void validate(const CoverageSpec& spec);

/// Observed accuracy of one simulated trial.
double simulate_accuracy(const CoverageSpec& spec, std::int64_t trial);

/// Interval produced in every trial, in trial order.
std::vector<Interval> trial_intervals(const CoverageSpec& spec);

/// `threads` = 0 uses the hardware concurrency. The report does not depend
/// on the thread count.
CoverageReport simulate_coverage(const CoverageSpec& spec, unsigned threads = 1);

struct GridSpec {
    std::vector<Method> methods;
    std::vector<double> p_values;
    std::vector<std::int64_t> n_values;
    double gamma = 0.9;
    std::int64_t trials = 1;
    std::uint64_t seed = 0;
    std::optional<std::int64_t> folds;
};

/// Cross product in method-major, then p, then n order. Each cell's spec
/// echoes its derived seed.
std::vector<CoverageReport> coverage_grid(const GridSpec& grid, unsigned threads = 1);

}  // namespace ci_planner::coverage
