#include "doctest.h"

#include "ci_planner/coverage.hpp"
#include "ci_planner/errors.hpp"

#include <cmath>
#include <set>

using namespace ci_planner;
using namespace ci_planner::coverage;

TEST_CASE("SplitMix64 matches reference outputs") {
    CHECK(splitmix64_mix(0) == 0xE220A8397B1DCDAFULL);
    CHECK(splitmix64_mix(1234567) == 6457827717110365317ULL);
    TrialStream s(42, 0);
    CHECK(s.next() == 0x6310BF04D8207F46ULL);
    CHECK(s.next() == 0xEBDB7216A4FFED50ULL);
    CHECK(s.next() == 0x15471CCE9858769BULL);
    CHECK(cell_seed(42, 0) == 42);
    CHECK(cell_seed(42, 1) == 42 + 0x9E3779B97F4A7C15ULL);
}

TEST_CASE("unit draws lie in [0, 1) and have the right mean") {
    double sum = 0.0;
    const int draws = 100'000;
    TrialStream s(7, 3);
    for (int i = 0; i < draws; ++i) {
        const double u = s.next_unit();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    // 5 sigma for the mean of uniform draws.
    CHECK(std::fabs(sum / draws - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / draws));
}

TEST_CASE("simulated accuracy is a Bernoulli mean") {
    const CoverageSpec spec{Method::HoldoutZ, 0.7, 200, 0.9, 1, 99};
    double sum = 0.0;
    const int trials = 5000;
    for (int t = 0; t < trials; ++t) {
        const double acc = simulate_accuracy(spec, t);
        const double hits = acc * 200.0;
        REQUIRE(std::fabs(hits - std::round(hits)) < 1e-9);
        sum += acc;
    }
    const double se = std::sqrt(0.7 * 0.3 / 200.0 / trials);
    CHECK(std::fabs(sum / trials - 0.7) < 5.0 * se);

    // Same trial, same accuracy.
    CHECK(simulate_accuracy(spec, 17) == simulate_accuracy(spec, 17));
}

TEST_CASE("Clopper-Pearson coverage is at least nominal") {
    const auto r = simulate_coverage({Method::HoldoutClopperPearson, 0.5, 30, 0.95, 10'000, 42});
    CHECK(r.empirical_coverage >= 0.94);
    CHECK(r.covered <= r.spec.trials);
}

TEST_CASE("p = 1 is always covered") {
    for (Method m : kAllMethods) {
        if (m == Method::Bootstrap) continue;
        CoverageSpec spec{m, 1.0, 50, 0.9, 1000, 5};
        if (m == Method::CrossValidation) spec.folds = 5;
        CAPTURE(method_name(m));
        CHECK(simulate_coverage(spec).empirical_coverage == 1.0);
    }
}

TEST_CASE("Z at p = 0.5 attains roughly nominal coverage") {
    const auto r = simulate_coverage({Method::HoldoutZ, 0.5, 1000, 0.9, 10'000, 42});
    CHECK(r.empirical_coverage >= 0.88);
    CHECK(r.empirical_coverage <= 0.92);
}

TEST_CASE("reports are identical across thread counts") {
    const CoverageSpec spec{Method::HoldoutWilson, 0.83, 120, 0.95, 3001, 2024};
    const auto one = simulate_coverage(spec, 1);
    CHECK(simulate_coverage(spec, 2) == one);
    CHECK(simulate_coverage(spec, 7) == one);
    CHECK(simulate_coverage(spec, 0) == one);
    CHECK(simulate_coverage(spec, 1) == one);
}

TEST_CASE("aggregates follow from the per-trial intervals") {
    for (Method m : {Method::HoldoutLangford, Method::HoldoutT, Method::CrossValidation}) {
        CoverageSpec spec{m, 0.9, 40, 0.9, 97, 11};
        if (m == Method::CrossValidation) spec.folds = 4;
        const auto ivs = trial_intervals(spec);
        REQUIRE(ivs.size() == 97);
        std::int64_t covered = 0;
        std::int64_t clipped = 0;
        double width = 0.0;
        for (const auto& iv : ivs) {
            covered += iv.contains(0.9) ? 1 : 0;
            clipped += (iv.clipped_low || iv.clipped_high) ? 1 : 0;
            width += iv.width();
        }
        const auto r = simulate_coverage(spec);
        CAPTURE(method_name(m));
        CHECK(r.covered == covered);
        CHECK(r.empirical_coverage == static_cast<double>(covered) / 97.0);
        CHECK(r.clip_frequency == static_cast<double>(clipped) / 97.0);
        CHECK(r.mean_width == doctest::Approx(width / 97.0).epsilon(1e-14));
        CHECK(r.empirical_coverage >= 0.0);
        CHECK(r.empirical_coverage <= 1.0);
    }
}

TEST_CASE("single-cell grid equals simulate_coverage") {
    GridSpec g{{Method::HoldoutZ}, {0.6}, {80}, 0.9, 500, 42};
    const auto cells = coverage_grid(g);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0] == simulate_coverage({Method::HoldoutZ, 0.6, 80, 0.9, 500, 42}));
}

TEST_CASE("grid order and sub-seeds") {
    GridSpec g{{Method::HoldoutLangford, Method::HoldoutZ}, {0.6, 0.9}, {50, 100}, 0.9, 300, 7};
    const auto cells = coverage_grid(g, 3);
    REQUIRE(cells.size() == 8);
    std::set<std::uint64_t> seeds;
    std::size_t i = 0;
    for (Method m : g.methods) {
        for (double p : g.p_values) {
            for (std::int64_t n : g.n_values) {
                CHECK(cells[i].spec.method == m);
                CHECK(cells[i].spec.true_accuracy == p);
                CHECK(cells[i].spec.n == n);
                CHECK(cells[i].spec.seed == cell_seed(7, i));
                seeds.insert(cells[i].spec.seed);
                ++i;
            }
        }
    }
    CHECK(seeds.size() == 8);
    CHECK(coverage_grid(g, 1) == cells);
}

TEST_CASE("Langford intervals are wider than Z on average in every cell") {
    GridSpec g{{Method::HoldoutLangford, Method::HoldoutZ}, {0.5, 0.7, 0.9}, {30, 100, 300}, 0.9, 400, 1};
    const auto cells = coverage_grid(g);
    for (std::size_t i = 0; i < 9; ++i) CHECK(cells[i].mean_width >= cells[i + 9].mean_width);
}

TEST_CASE("invalid specs") {
    CHECK_THROWS_AS(simulate_coverage({Method::Bootstrap, 0.5, 30, 0.9, 10, 1}), UnsupportedMethodError);
    CHECK_THROWS_AS(simulate_coverage({Method::CrossValidation, 0.5, 30, 0.9, 10, 1, 7}), DomainError);
    CHECK_THROWS_AS(simulate_coverage({Method::CrossValidation, 0.5, 30, 0.9, 10, 1}), DomainError);
    CHECK_THROWS_AS(simulate_coverage({Method::HoldoutZ, 0.5, 30, 0.9, 0, 1}), DomainError);
    CHECK_THROWS_AS(simulate_coverage({Method::HoldoutZ, 1.5, 30, 0.9, 10, 1}), DomainError);
    CHECK_THROWS_AS(simulate_coverage({Method::HoldoutT, 0.5, 1, 0.9, 10, 1}), DomainError);
    CHECK_THROWS_AS(coverage_grid({{}, {0.5}, {10}}), DomainError);
    CHECK_THROWS_AS(coverage_grid({{Method::HoldoutZ}, {}, {10}}), DomainError);
    CHECK_THROWS_AS(coverage_grid({{Method::HoldoutZ}, {0.5}, {}}), DomainError);
    // Errors raised inside worker threads propagate.
    CHECK_THROWS_AS(simulate_coverage({Method::Bootstrap, 0.5, 30, 0.9, 100, 1}, 4), UnsupportedMethodError);
}
