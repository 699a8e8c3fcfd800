#include "doctest.h"

#include "ci_planner/errors.hpp"
#include "ci_planner/estimators.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace ci_planner;

namespace {

const ConfidenceLevel g90(0.90);
const ConfidenceLevel g95(0.95);

bool near(double a, double b, double tol = 1e-6) { return std::fabs(a - b) <= tol; }

EstimateRequest request(Method m, std::int64_t n, double acc, double gamma) {
    EstimateRequest r;
    r.method = m;
    r.n = n;
    r.acc = acc;
    r.confidence = gamma;
    if (m == Method::CrossValidation) r.folds = 5;
    if (m == Method::Bootstrap) {
        // A spread of resample accuracies around acc.
        std::vector<double> s;
        for (int i = 0; i < 201; ++i) s.push_back(std::clamp(acc + (i - 100) * 0.001, 0.0, 1.0));
        r.samples = s;
    }
    return r;
}

}  // namespace

TEST_CASE("domain types validate their ranges") {
    CHECK_THROWS_AS(ConfidenceLevel(0.0), DomainError);
    CHECK_THROWS_AS(ConfidenceLevel(1.0), DomainError);
    CHECK(ConfidenceLevel(0.9).alpha() == doctest::Approx(0.1));
    CHECK_THROWS_AS(Accuracy(-0.01), DomainError);
    CHECK_THROWS_AS(Accuracy(1.01), DomainError);
    CHECK_THROWS_AS(SampleCount(0), DomainError);
    CHECK_THROWS_AS(FoldCount(1), DomainError);
    CHECK_NOTHROW(Accuracy(0.0));
    CHECK_NOTHROW(Accuracy(1.0));
}

TEST_CASE("method names round trip") {
    for (Method m : kAllMethods) CHECK(parse_method(method_name(m)) == m);
    CHECK(method_name(Method::HoldoutZ) == "holdout_z_test");
    CHECK(method_name(Method::CrossValidation) == "cv");
    CHECK_THROWS_AS(parse_method("holdout_agresti"), DomainError);
}

TEST_CASE("holdout_langford") {
    const auto r = holdout_langford(SampleCount(100), Accuracy(0.75), g90);
    CHECK(near(r.radius, 0.12238734153404083, 1e-12));
    CHECK(near(r.interval.lower, 0.627613));
    CHECK(near(r.interval.upper, 0.872387));
    CHECK_FALSE(r.interval.clipped_low);
    CHECK_FALSE(r.interval.clipped_high);

    const auto top = holdout_langford(SampleCount(100), Accuracy(1.0), g90);
    CHECK(top.interval.upper == 1.0);
    CHECK(top.interval.clipped_high);
    CHECK(top.radius == r.radius);

    const auto quad = holdout_langford(SampleCount(400), Accuracy(0.75), g90);
    CHECK(near(quad.radius, 0.061194, 1e-6));
    CHECK(near(quad.radius * 2.0, r.radius, 1e-15));
}

TEST_CASE("holdout_z reproduces the 271-sample anchor") {
    const auto r = holdout_z(SampleCount(271), Accuracy(0.88), g90);
    CHECK(near(r.radius, 0.04995887103699373, 1e-12));
    CHECK(r.radius <= 0.05);
    CHECK(near(r.interval.lower, 0.830042));
    CHECK(near(r.interval.upper, 0.929958));
    const auto below = holdout_z(SampleCount(270), Accuracy(0.88), g90);
    CHECK(near(below.radius, 0.05005130195975049, 1e-12));
    CHECK(below.radius > 0.05);

    const auto mid = holdout_z(SampleCount(100), Accuracy(0.5), g90);
    CHECK(near(mid.interval.lower + mid.interval.upper, 1.0, 1e-15));
}

TEST_CASE("holdout_t") {
    const auto r = holdout_t(SampleCount(10), Accuracy(0.8), g95);
    // t(0.975, 9) * 0.5 / sqrt(10)
    CHECK(near(r.radius, 0.35767845299417, 1e-9));
    CHECK(near(r.interval.lower, 0.442322));
    CHECK(r.interval.upper == 1.0);
    CHECK(r.interval.clipped_high);

    const auto big = holdout_t(SampleCount(1'000'000), Accuracy(0.8), g95);
    CHECK(near(big.radius, holdout_z(SampleCount(1'000'000), Accuracy(0.8), g95).radius, 1e-6));

    const auto sym = holdout_t(SampleCount(40), Accuracy(0.5), g95);
    CHECK(near(0.5 * (sym.interval.lower + sym.interval.upper), 0.5, 1e-15));

    CHECK_THROWS_WITH_AS(holdout_t(SampleCount(1), Accuracy(0.5), g95),
                         "t-test requires at least 2 samples", DomainError);
}

TEST_CASE("holdout_wilson") {
    const auto r = holdout_wilson(SampleCount(100), Accuracy(0.5), g95);
    CHECK(near(r.interval.lower, 0.4038315303659956, 1e-9));
    CHECK(near(r.interval.upper, 0.5961684696340044, 1e-9));

    const auto top = holdout_wilson(SampleCount(10), Accuracy(1.0), g95);
    const double z = 1.959963984540054;
    CHECK(near(top.interval.lower, 1.0 / (1.0 + z * z / 10.0), 1e-12));
    CHECK(near(top.interval.lower, 0.7224672001371106, 1e-9));
    CHECK(top.interval.upper == 1.0);
    CHECK_FALSE(top.interval.clipped_high);
    CHECK_FALSE(top.interval.clipped_low);

    for (std::int64_t n : {3, 17, 250}) {
        const auto s = holdout_wilson(SampleCount(n), Accuracy(0.5), g90);
        CHECK(near(s.interval.lower + s.interval.upper, 1.0, 1e-14));
    }
}

TEST_CASE("holdout_clopper_pearson") {
    const auto zero = holdout_clopper_pearson(SampleCount(10), Accuracy(0.0), g95);
    CHECK(zero.interval.lower == 0.0);
    CHECK(near(zero.interval.upper, 1.0 - std::pow(0.025, 0.1), 1e-8));

    const auto full = holdout_clopper_pearson(SampleCount(10), Accuracy(1.0), g95);
    CHECK(near(full.interval.lower, std::pow(0.025, 0.1), 1e-8));
    CHECK(full.interval.upper == 1.0);

    const auto half = holdout_clopper_pearson(SampleCount(10), Accuracy(0.5), g95);
    const auto [lo, hi] = oracle::clopper_pearson(5, 10, 0.95);
    CHECK(near(half.interval.lower, lo, 1e-7));
    CHECK(near(half.interval.upper, hi, 1e-7));
    CHECK(near(half.interval.lower, 0.18708602844739855, 1e-7));
    CHECK(near(half.interval.upper, 0.8129139715526015, 1e-7));
}

TEST_CASE("clopper_pearson rounds acc * n half up") {
    const auto a = holdout_clopper_pearson(SampleCount(10), Accuracy(0.25), g90);
    const auto b = holdout_clopper_pearson(SampleCount(10), Accuracy(0.3), g90);
    CHECK(a.interval == b.interval);
    const auto c = holdout_clopper_pearson(SampleCount(10), Accuracy(0.24), g90);
    const auto d = holdout_clopper_pearson(SampleCount(10), Accuracy(0.2), g90);
    CHECK(c.interval == d.interval);
}

TEST_CASE("bootstrap_percentile") {
    const auto flat = bootstrap_percentile(BootstrapSamples(std::vector<double>(10, 0.8)), g90);
    CHECK(flat.interval.lower == 0.8);
    CHECK(flat.interval.upper == 0.8);

    std::vector<double> even;
    for (int i = 0; i <= 10; ++i) even.push_back(0.50 + 0.02 * i);
    const auto r = bootstrap_percentile(BootstrapSamples(even), ConfidenceLevel(0.80));
    CHECK(near(r.interval.lower, 0.52, 1e-12));
    CHECK(near(r.interval.upper, 0.68, 1e-12));
    CHECK(r.inputs.sample_count == 11u);

    std::mt19937 rng(7);
    std::vector<double> shuffled = even;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(bootstrap_percentile(BootstrapSamples(shuffled), ConfidenceLevel(0.80)).interval == r.interval);

    CHECK_THROWS_AS(BootstrapSamples({}), DomainError);
    CHECK_THROWS_AS(BootstrapSamples({0.5, 1.2}), DomainError);
}

TEST_CASE("empirical quantile interpolates between order statistics") {
    const std::vector<double> s{0.1, 0.2, 0.4, 0.8};
    CHECK(empirical_quantile(s, 0.0) == 0.1);
    CHECK(empirical_quantile(s, 1.0) == 0.8);
    CHECK(near(empirical_quantile(s, 0.5), 0.3, 1e-15));
    CHECK(near(empirical_quantile(s, 0.25), 0.175, 1e-15));
}

TEST_CASE("cross_validation") {
    const auto r = cross_validation(SampleCount(1000), FoldCount(10), Accuracy(0.85), g90);
    CHECK(near(r.radius, 0.12238734153404083, 1e-12));
    CHECK(near(r.interval.lower, 0.727613));
    CHECK(near(r.interval.upper, 0.972387));
    CHECK(r.inputs.folds == 10);

    const auto five = cross_validation(SampleCount(1000), FoldCount(5), Accuracy(0.85), g90);
    CHECK(near(r.radius / five.radius, std::sqrt(2.0), 1e-12));

    // With one fold the formula is the holdout bound.
    for (std::int64_t n : {1, 37, 1000}) {
        CHECK(radius::cross_validation(n, 1, g90.alpha()) ==
              holdout_langford(SampleCount(n), Accuracy(0.5), g90).radius);
    }

    CHECK_THROWS_AS(cross_validation(SampleCount(5), FoldCount(6), Accuracy(0.5), g90), DomainError);
    CHECK_THROWS_AS(FoldCount(1), DomainError);
}

TEST_CASE("progressive_validation") {
    const auto r = progressive_validation(SampleCount(300), Accuracy(0.9), g90);
    CHECK(near(r.radius, 0.07066036458008114, 1e-12));
    CHECK(near(r.interval.lower, 0.829340));
    CHECK(near(r.interval.upper, 0.970660));
    const auto low = progressive_validation(SampleCount(300), Accuracy(0.05), g90);
    CHECK(low.interval.lower == 0.0);
    CHECK(low.interval.clipped_low);
    for (std::int64_t n : {1, 10, 999}) {
        for (double g : {0.5, 0.9, 0.999}) {
            CHECK(progressive_validation(SampleCount(n), Accuracy(0.3), ConfidenceLevel(g)).radius ==
                  holdout_langford(SampleCount(n), Accuracy(0.3), ConfidenceLevel(g)).radius);
        }
    }
}

TEST_CASE("graded_intervals") {
    const auto req = request(Method::HoldoutLangford, 100, 0.75, 0.0);
    const auto g = graded_intervals(req, kDefaultGradedLevels);
    REQUIRE(g.levels.size() == 3);
    CHECK(g.center == 0.75);
    CHECK(near(g.levels[0].radius, 0.12238734153404083, 1e-12));
    CHECK(near(g.levels[1].radius, 0.13581015157406195, 1e-12));
    CHECK(near(g.levels[2].radius, 0.16276236307187293, 1e-12));
    for (std::size_t i = 1; i < g.levels.size(); ++i) {
        CHECK(g.levels[i].interval.lower < g.levels[i - 1].interval.lower);
        CHECK(g.levels[i].interval.upper > g.levels[i - 1].interval.upper);
    }

    for (Method m : kAllMethods) {
        const double level[] = {0.9};
        auto single_req = request(m, 100, 0.75, 0.9);
        const auto single = graded_intervals(single_req, level);
        REQUIRE(single.levels.size() == 1);
        CHECK(single.levels[0].interval == estimate(single_req).interval);
    }

    const auto cp = graded_intervals(request(Method::HoldoutClopperPearson, 50, 0.9, 0.0), kDefaultGradedLevels);
    for (std::size_t i = 1; i < cp.levels.size(); ++i) {
        CHECK(cp.levels[i].interval.lower < cp.levels[i - 1].interval.lower);
        CHECK(cp.levels[i].interval.upper > cp.levels[i - 1].interval.upper);
    }

    const double unordered[] = {0.95, 0.9};
    CHECK_THROWS_AS(graded_intervals(req, unordered), DomainError);
    const double repeated[] = {0.9, 0.9};
    CHECK_THROWS_AS(graded_intervals(req, repeated), DomainError);
    CHECK_THROWS_AS(graded_intervals(req, std::span<const double>{}), DomainError);
}

TEST_CASE("estimate reports missing inputs") {
    EstimateRequest r;
    r.method = Method::CrossValidation;
    r.n = 100;
    r.acc = 0.8;
    r.confidence = 0.9;
    CHECK_THROWS_AS(estimate(r), DomainError);
    r.method = Method::Bootstrap;
    CHECK_THROWS_AS(estimate(r), DomainError);
}

// Properties -----------------------------------------------------------------

TEST_CASE("every interval lies in [0, 1] for random inputs") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::int64_t> n_dist(2, 2000);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> gamma_dist(0.01, 0.999);
    for (Method m : kAllMethods) {
        const int reps = m == Method::HoldoutClopperPearson || m == Method::HoldoutT ? 200 : 1000;
        for (int i = 0; i < reps; ++i) {
            const auto req = request(m, std::max<std::int64_t>(5, n_dist(rng)), unit(rng), gamma_dist(rng));
            const auto r = estimate(req);
            CAPTURE(method_name(m));
            CHECK(0.0 <= r.interval.lower);
            CHECK(r.interval.lower <= r.interval.upper);
            CHECK(r.interval.upper <= 1.0);
            CHECK(r.radius >= 0.0);
            if (is_symmetric(m)) {
                CHECK(r.interval.clipped_low == (*req.acc - r.radius < 0.0));
                CHECK(r.interval.clipped_high == (*req.acc + r.radius > 1.0));
            } else {
                CHECK_FALSE(r.interval.clipped_low);
                CHECK_FALSE(r.interval.clipped_high);
            }
        }
    }
}

TEST_CASE("width is non-decreasing in the confidence level") {
    for (Method m : kAllMethods) {
        for (std::int64_t n : {10, 100, 1000}) {
            for (double acc : {0.0, 0.3, 0.8, 1.0}) {
                double prev = -1.0;
                for (double g : {0.5, 0.8, 0.9, 0.95, 0.99}) {
                    const double w = estimate(request(m, n, acc, g)).interval.width();
                    CHECK(w >= prev);
                    prev = w;
                }
            }
        }
    }
}

TEST_CASE("radius is non-increasing in n") {
    const Method symmetric[] = {Method::HoldoutLangford, Method::HoldoutZ, Method::HoldoutT,
                                Method::CrossValidation, Method::ProgressiveValidation};
    for (Method m : symmetric) {
        for (double g : {0.8, 0.95}) {
            double prev = INFINITY;
            for (std::int64_t n = 5; n <= 2000; n += 13) {
                const double r = estimate(request(m, n, 0.5, g)).radius;
                CHECK(r <= prev);
                prev = r;
            }
        }
    }
    for (Method m : {Method::HoldoutWilson, Method::HoldoutClopperPearson}) {
        for (double acc : {0.1, 0.5, 0.9}) {
            double prev = INFINITY;
            for (std::int64_t n : {10, 30, 100, 300, 1000}) {
                const double w = estimate(request(m, n, acc, 0.95)).interval.width();
                CHECK(w <= prev);
                prev = w;
            }
        }
    }
}

TEST_CASE("radius ordering: Langford >= Z and t > Z") {
    for (int i = 0; i < 50; ++i) {
        const double g = 0.01 + 0.98 * i / 49.0;
        for (std::int64_t n : {1, 2, 10, 271, 5000}) {
            CHECK(radius::hoeffding(static_cast<double>(n), 1.0 - g) >= radius::z_test(n, 1.0 - g));
        }
    }
    for (double g : {0.9, 0.95}) {
        for (std::int64_t n = 2; n <= 1000; ++n) {
            CHECK(radius::t_test(n, 1.0 - g) > radius::z_test(n, 1.0 - g));
        }
    }
}

TEST_CASE("cross-validation radius equals Langford at the fold size") {
    for (std::int64_t k : {2, 5, 10}) {
        for (std::int64_t per_fold : {1, 7, 100}) {
            const std::int64_t n = k * per_fold;
            for (double g : {0.8, 0.9, 0.99}) {
                const double cv = cross_validation(SampleCount(n), FoldCount(k), Accuracy(0.5), ConfidenceLevel(g)).radius;
                const double lf = holdout_langford(SampleCount(per_fold), Accuracy(0.5), ConfidenceLevel(g)).radius;
                CHECK(std::fabs(cv - lf) <= 1e-12);
            }
        }
    }
}

TEST_CASE("symmetric methods are centered on acc before clipping") {
    const Method symmetric[] = {Method::HoldoutLangford, Method::HoldoutZ, Method::HoldoutT,
                                Method::CrossValidation, Method::ProgressiveValidation};
    for (Method m : symmetric) {
        for (double acc : {0.2, 0.5, 0.77}) {
            const auto r = estimate(request(m, 2000, acc, 0.9));
            REQUIRE_FALSE(r.interval.clipped_low);
            REQUIRE_FALSE(r.interval.clipped_high);
            CHECK(r.interval.lower == acc - r.radius);
            CHECK(r.interval.upper == acc + r.radius);
        }
    }
}

TEST_CASE("Wilson interval lies inside Clopper-Pearson on the check grid") {
    // At n = 100, gamma = 0.95 the Wilson bound is wider than the exact one
    // on the outermost success counts; these four cells are the only
    // exceptions on the grid.
    const auto known_exception = [](std::int64_t n, double g, std::int64_t k) {
        return n == 100 && g == 0.95 && (k <= 1 || k >= 99);
    };
    int exceptions = 0;
    for (std::int64_t n : {10, 30, 100}) {
        for (double g : {0.9, 0.95}) {
            for (std::int64_t k = 0; k <= n; ++k) {
                const Accuracy acc(static_cast<double>(k) / static_cast<double>(n));
                const auto w = holdout_wilson(SampleCount(n), acc, ConfidenceLevel(g)).interval;
                const auto cp = holdout_clopper_pearson(SampleCount(n), acc, ConfidenceLevel(g)).interval;
                CAPTURE(n);
                CAPTURE(g);
                CAPTURE(k);
                const bool contained = cp.lower <= w.lower + 1e-12 && w.upper <= cp.upper + 1e-12;
                CHECK(contained != known_exception(n, g, k));
                exceptions += contained ? 0 : 1;
            }
        }
    }
    CHECK(exceptions == 4);
}
