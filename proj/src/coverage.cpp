#include "ci_planner/coverage.hpp"

#include "ci_planner/errors.hpp"

#include <algorithm>
#include <bit>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_map>

namespace ci_planner::coverage {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

struct TrialOutcome {
    bool covered = false;
    bool clipped = false;
    double width = 0.0;
};

// Interval lookups keyed by the observed accuracy; estimators are pure so a
// repeated accuracy always yields the same interval.
class IntervalCache {
public:
    explicit IntervalCache(const CoverageSpec& spec) : spec_(spec) {}

    const Interval& at(double acc) {
        const auto key = std::bit_cast<std::uint64_t>(acc);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        EstimateRequest req;
        req.method = spec_.method;
        req.n = spec_.n;
        req.acc = acc;
        req.confidence = spec_.gamma;
        req.folds = spec_.folds;
        return cache_.emplace(key, estimate(req).interval).first->second;
    }

private:
    const CoverageSpec& spec_;
    std::unordered_map<std::uint64_t, Interval> cache_;
};

void run_trials(const CoverageSpec& spec, std::int64_t begin, std::int64_t end,
                std::span<TrialOutcome> out) {
    IntervalCache cache(spec);
    for (std::int64_t t = begin; t < end; ++t) {
        const Interval& iv = cache.at(simulate_accuracy(spec, t));
        out[static_cast<std::size_t>(t)] =
            TrialOutcome{iv.contains(spec.true_accuracy), iv.clipped_low || iv.clipped_high,
                         iv.width()};
    }
}

unsigned resolve_threads(unsigned threads, std::int64_t work) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::int64_t>(threads, std::max<std::int64_t>(1, work)));
}

}  // namespace

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t cell) noexcept {
    return seed + cell * kGolden;
}

TrialStream::TrialStream(std::uint64_t seed, std::uint64_t trial) noexcept
    : state_(splitmix64_mix(splitmix64_mix(seed) + trial)) {}

std::uint64_t TrialStream::next() noexcept {
    state_ += kGolden;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double TrialStream::next_unit() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

void validate(const CoverageSpec& spec) {
    if (spec.method == Method::Bootstrap) {
        throw UnsupportedMethodError(
            "coverage simulation does not support the bootstrap method (its input is a list of "
            "resample accuracies, not n and acc)");
    }
    if (spec.trials < 1) throw DomainError("trials must be at least 1");
    kernel::Probability{spec.true_accuracy};
    const SampleCount n(spec.n);
    const ConfidenceLevel gamma(spec.gamma);
    if (spec.method == Method::HoldoutT && n.value() < 2) {
        throw DomainError("t-test requires at least 2 samples");
    }
    if (spec.method == Method::CrossValidation) {
        if (!spec.folds) throw DomainError("cross-validation coverage requires the fold count k");
        const FoldCount k(*spec.folds);
        if (k.value() > n.value() || n.value() % k.value() != 0) {
            throw DomainError("cross-validation coverage requires k to divide n (k=" +
                              std::to_string(k.value()) + ", n=" + std::to_string(n.value()) + ")");
        }
    }
}

double simulate_accuracy(const CoverageSpec& spec, std::int64_t trial) {
    TrialStream stream(spec.seed, static_cast<std::uint64_t>(trial));
    const double p = spec.true_accuracy;
    if (spec.method == Method::CrossValidation) {
        const std::int64_t k = *spec.folds;
        const std::int64_t fold_size = spec.n / k;
        double acc_sum = 0.0;
        for (std::int64_t f = 0; f < k; ++f) {
            std::int64_t hits = 0;
            for (std::int64_t i = 0; i < fold_size; ++i) hits += stream.next_unit() < p ? 1 : 0;
            acc_sum += static_cast<double>(hits) / static_cast<double>(fold_size);
        }
        return std::clamp(acc_sum / static_cast<double>(k), 0.0, 1.0);
    }
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < spec.n; ++i) hits += stream.next_unit() < p ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(spec.n);
}

std::vector<Interval> trial_intervals(const CoverageSpec& spec) {
    validate(spec);
    IntervalCache cache(spec);
    std::vector<Interval> out;
    out.reserve(static_cast<std::size_t>(spec.trials));
    for (std::int64_t t = 0; t < spec.trials; ++t) out.push_back(cache.at(simulate_accuracy(spec, t)));
    return out;
}

CoverageReport simulate_coverage(const CoverageSpec& spec, unsigned threads) {
    validate(spec);
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(spec.trials));
    const unsigned workers = resolve_threads(threads, spec.trials);

    if (workers == 1) {
        run_trials(spec, 0, spec.trials, outcomes);
    } else {
        std::vector<std::jthread> pool;
        std::exception_ptr failure;
        std::mutex failure_mutex;
        const std::int64_t chunk = (spec.trials + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::int64_t begin = w * chunk;
            const std::int64_t end = std::min(spec.trials, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([&, begin, end] {
                try {
                    run_trials(spec, begin, end, outcomes);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
        pool.clear();
        if (failure) std::rethrow_exception(failure);
    }

    // Sequential reduction in trial order keeps the sums bit-identical.
    CoverageReport report;
    report.spec = spec;
    std::int64_t clipped = 0;
    double width_sum = 0.0;
    for (const TrialOutcome& o : outcomes) {
        report.covered += o.covered ? 1 : 0;
        clipped += o.clipped ? 1 : 0;
        width_sum += o.width;
    }
    const auto trials = static_cast<double>(spec.trials);
    report.empirical_coverage = static_cast<double>(report.covered) / trials;
    report.mean_width = width_sum / trials;
    report.clip_frequency = static_cast<double>(clipped) / trials;
    return report;
}

std::vector<CoverageReport> coverage_grid(const GridSpec& grid, unsigned threads) {
    if (grid.methods.empty() || grid.p_values.empty() || grid.n_values.empty()) {
        throw DomainError("coverage grid needs at least one method, p value and n value");
    }
    std::vector<CoverageSpec> cells;
    for (Method m : grid.methods) {
        for (double p : grid.p_values) {
            for (std::int64_t n : grid.n_values) {
                CoverageSpec spec{m, p, n, grid.gamma, grid.trials,
                                  cell_seed(grid.seed, cells.size()),
                                  m == Method::CrossValidation ? grid.folds : std::nullopt};
                validate(spec);
                cells.push_back(spec);
            }
        }
    }
    std::vector<CoverageReport> out;
    out.reserve(cells.size());
    for (const CoverageSpec& spec : cells) out.push_back(simulate_coverage(spec, threads));
    return out;
}

}  // namespace ci_planner::coverage
