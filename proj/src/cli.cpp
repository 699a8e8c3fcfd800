#include "ci_planner/cli.hpp"

#include "ci_planner/coverage.hpp"
#include "ci_planner/service.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace ci_planner::cli {

namespace {

using service::Json;

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string percent(double gamma) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g%%", gamma * 100.0);
    return buf;
}

std::string bounds(const Json& obj) {
    return "[" + fixed6(obj.at("lower").get<double>()) + ", " + fixed6(obj.at("upper").get<double>()) + "]";
}

void clip_notes(std::ostream& out, const Json& obj, const char* indent) {
    if (obj.at("clipped_low").get<bool>()) out << indent << "lower bound clipped to 0\n";
    if (obj.at("clipped_high").get<bool>()) out << indent << "upper bound clipped to 1\n";
}

void render_estimate(std::ostream& out, const Json& r) {
    const Json& in = r.at("inputs");
    const double gamma = in.at("confidence").get<double>();
    out << "method:      " << r.at("method").get<std::string>() << '\n';
    if (in.contains("sample_count")) {
        out << "samples:     " << in.at("sample_count").get<std::size_t>() << " resample accuracies\n";
    } else {
        out << "n:           " << in.at("n").get<std::int64_t>() << '\n';
        out << "accuracy:    " << fixed6(in.at("acc").get<double>()) << '\n';
    }
    if (in.contains("folds")) out << "folds:       " << in.at("folds").get<std::int64_t>() << '\n';
    out << "confidence:  " << fixed6(gamma) << '\n';
    out << "interval:    " << bounds(r) << "  (" << percent(gamma) << " CI)\n";
    const bool half_width = r.at("radius_kind").get<std::string>() == "half_width";
    out << (half_width ? "half-width:  " : "radius:      ") << fixed6(r.at("radius").get<double>()) << '\n';
    clip_notes(out, r, "note:        ");
}

void render_graded(std::ostream& out, const Json& r) {
    out << "method:      " << r.at("method").get<std::string>() << '\n';
    out << "center:      " << fixed6(r.at("center").get<double>()) << '\n';
    for (const Json& level : r.at("levels")) {
        out << "  " << percent(level.at("confidence").get<double>()) << " CI: " << bounds(level)
            << "  radius " << fixed6(level.at("radius").get<double>()) << '\n';
        clip_notes(out, level, "    ");
    }
}

void render_sample_size(std::ostream& out, const Json& r) {
    const Json& req = r.at("requested");
    out << "method:      " << r.at("method").get<std::string>() << '\n';
    if (req.contains("folds")) out << "folds:       " << req.at("folds").get<std::int64_t>() << '\n';
    out << "n = " << r.at("required_n").get<std::int64_t>() << " samples needed for radius "
        << fixed6(req.at("radius").get<double>()) << " at confidence "
        << fixed6(req.at("confidence").get<double>()) << '\n';
    out << "achieved radius: " << fixed6(r.at("achieved_radius").get<double>()) << '\n';
}

void render_confidence_level(std::ostream& out, const Json& r) {
    out << "method:      " << r.at("method").get<std::string>() << '\n';
    out << "confidence = " << fixed6(r.at("confidence").get<double>()) << " for n = "
        << r.at("n").get<std::int64_t>() << " and radius " << fixed6(r.at("radius").get<double>());
    if (r.contains("folds")) out << " with " << r.at("folds").get<std::int64_t>() << " folds";
    out << '\n';
}

void render_recommend(std::ostream& out, const Json& r) {
    out << "scheme: " << r.at("scheme").get<std::string>() << '\n';
    int rank = 0;
    for (const Json& entry : r.at("ranked")) {
        out << ++rank << ". " << entry.at("method").get<std::string>() << " - "
            << entry.at("rationale").get<std::string>() << '\n';
    }
}

void render_coverage(std::ostream& out, const coverage::CoverageReport& r) {
    out << method_name(r.spec.method) << " p=" << fixed6(r.spec.true_accuracy) << " n=" << r.spec.n;
    if (r.spec.folds) out << " k=" << *r.spec.folds;
    out << " confidence=" << fixed6(r.spec.gamma) << " seed=" << r.spec.seed << ": coverage "
        << fixed6(r.empirical_coverage) << " (" << r.covered << '/' << r.spec.trials
        << "), mean width " << fixed6(r.mean_width) << ", clip frequency "
        << fixed6(r.clip_frequency) << '\n';
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw service::RequestError("cannot read samples file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Method method_arg(const std::string& name) {
    if (auto m = try_parse_method(name)) return *m;
    throw service::RequestError("unknown method '" + name + "'");
}

struct Options {
    std::string format = "text";
    std::string method;
    std::vector<std::string> methods;
    std::int64_t n = 0;
    std::vector<std::int64_t> n_list;
    double acc = 0.0;
    double confidence = 0.0;
    double radius = 0.0;
    std::int64_t folds = 0;
    std::string samples_path;
    std::vector<double> graded;
    std::string scheme;
    bool distribution_free = false;
    bool has_resamples = false;
    double p = 0.0;
    std::vector<double> p_list;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Confidence intervals and sample size planning for classification accuracy",
                 "ci-planner"};
    app.fallthrough();
    app.require_subcommand(1);
    Options o;
    app.add_option("--format", o.format, "Output format: text, json (csv for coverage commands)")
        ->check(CLI::IsMember({"text", "json", "csv"}));

    auto* estimate = app.add_subcommand("estimate", "Confidence interval for an observed accuracy");
    estimate->add_option("--method", o.method, "Estimation method")->required();
    auto* est_n = estimate->add_option("--n", o.n, "Number of test samples");
    auto* est_acc = estimate->add_option("--acc", o.acc, "Observed accuracy in [0, 1]");
    auto* est_conf = estimate->add_option("--confidence", o.confidence, "Confidence level in (0, 1)");
    auto* est_folds = estimate->add_option("--folds", o.folds, "Cross-validation folds");
    auto* est_samples = estimate->add_option("--samples", o.samples_path,
                                             "File with one bootstrap resample accuracy per line");
    auto* est_graded = estimate->add_option("--graded", o.graded, "Comma-separated ascending levels")
                           ->delimiter(',');

    auto* plan = app.add_subcommand("sample-size", "Test-set size needed for a target radius");
    plan->add_option("--method", o.method, "Estimation method")->required();
    auto* plan_radius = plan->add_option("--radius", o.radius, "Target half-width");
    auto* plan_conf = plan->add_option("--confidence", o.confidence, "Confidence level");
    auto* plan_folds = plan->add_option("--folds", o.folds, "Cross-validation folds");

    auto* level = app.add_subcommand("confidence-level", "Confidence level reached by n samples");
    level->add_option("--method", o.method, "Estimation method")->required();
    auto* level_n = level->add_option("--n", o.n, "Number of test samples");
    auto* level_radius = level->add_option("--radius", o.radius, "Target half-width");
    auto* level_folds = level->add_option("--folds", o.folds, "Cross-validation folds");

    auto* rec = app.add_subcommand("recommend", "Suggest estimation methods for an experiment");
    rec->add_option("--scheme", o.scheme, "holdout, bootstrap, cross_validation or progressive")
        ->required();
    auto* rec_n = rec->add_option("--n", o.n, "Number of test samples");
    auto* rec_folds = rec->add_option("--folds", o.folds, "Cross-validation folds");
    rec->add_flag("--distribution-free", o.distribution_free, "Prefer distribution-free bounds");
    rec->add_flag("--has-resamples", o.has_resamples, "Bootstrap resample accuracies are available");

    auto* cov = app.add_subcommand("coverage", "Monte Carlo coverage of one method");
    cov->add_option("--method", o.method, "Estimation method")->required();
    cov->add_option("--p", o.p, "True accuracy (Bernoulli success rate)")->required();
    cov->add_option("--n", o.n, "Test samples per trial")->required();
    cov->add_option("--confidence", o.confidence, "Confidence level")->required();
    cov->add_option("--trials", o.trials, "Number of simulated experiments")->required();
    cov->add_option("--seed", o.seed, "Random seed")->required();
    auto* cov_folds = cov->add_option("--folds", o.folds, "Cross-validation folds");
    cov->add_option("--threads", o.threads, "Worker threads (0 = all cores)");

    auto* grid = app.add_subcommand("coverage-grid", "Coverage over methods x p x n");
    grid->add_option("--methods", o.methods, "Comma-separated methods")->delimiter(',')->required();
    grid->add_option("--p", o.p_list, "Comma-separated true accuracies")->delimiter(',')->required();
    grid->add_option("--n", o.n_list, "Comma-separated test sizes")->delimiter(',')->required();
    grid->add_option("--confidence", o.confidence, "Confidence level")->required();
    grid->add_option("--trials", o.trials, "Trials per cell")->required();
    grid->add_option("--seed", o.seed, "Random seed")->required();
    auto* grid_folds = grid->add_option("--folds", o.folds, "Cross-validation folds");
    grid->add_option("--threads", o.threads, "Worker threads (0 = all cores)");

    std::vector<const char*> argv{"ci-planner"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsageError;
    }

    CLI::App* active = app.get_subcommands().front();
    const bool json = o.format == "json";
    const bool csv = o.format == "csv";
    const bool is_coverage = active == cov || active == grid;

    try {
        if (csv && !is_coverage) {
            throw service::RequestError("--format csv is only available for coverage commands");
        }

        if (is_coverage) {
            std::vector<coverage::CoverageReport> reports;
            const auto folds = (cov_folds->count() + grid_folds->count()) > 0
                                   ? std::optional<std::int64_t>(o.folds)
                                   : std::nullopt;
            if (active == cov) {
                coverage::CoverageSpec spec{method_arg(o.method), o.p,      o.n, o.confidence,
                                            o.trials,            o.seed,   folds};
                reports.push_back(coverage::simulate_coverage(spec, o.threads));
            } else {
                coverage::GridSpec spec;
                for (const auto& name : o.methods) spec.methods.push_back(method_arg(name));
                spec.p_values = o.p_list;
                spec.n_values = o.n_list;
                spec.gamma = o.confidence;
                spec.trials = o.trials;
                spec.seed = o.seed;
                spec.folds = folds;
                reports = coverage::coverage_grid(spec, o.threads);
            }
            if (json) {
                Json result;
                if (active == cov) {
                    result = service::to_json(reports.front());
                } else {
                    result = Json::array();
                    for (const auto& r : reports) result.push_back(service::to_json(r));
                }
                out << service::dump(service::result_body(std::move(result)));
            } else if (csv) {
                out << service::coverage_csv_header() << '\n';
                for (const auto& r : reports) out << service::coverage_csv_row(r) << '\n';
            } else {
                for (const auto& r : reports) render_coverage(out, r);
            }
            return kSuccess;
        }

        Json request = Json::object();
        Json result;
        void (*render)(std::ostream&, const Json&) = nullptr;
        if (active == estimate) {
            request["method"] = o.method;
            if (est_n->count()) request["n"] = o.n;
            if (est_acc->count()) request["acc"] = o.acc;
            if (est_conf->count()) request["confidence"] = o.confidence;
            if (est_folds->count()) request["folds"] = o.folds;
            if (est_samples->count()) {
                request["samples"] = service::parse_sample_text(read_file(o.samples_path));
            }
            if (est_graded->count()) {
                request["levels"] = o.graded;
                result = service::handle_graded(request);
                render = render_graded;
            } else {
                result = service::handle_estimate(request);
                render = render_estimate;
            }
        } else if (active == plan) {
            request["method"] = o.method;
            if (plan_radius->count()) request["radius"] = o.radius;
            if (plan_conf->count()) request["confidence"] = o.confidence;
            if (plan_folds->count()) request["folds"] = o.folds;
            result = service::handle_sample_size(request);
            render = render_sample_size;
        } else if (active == level) {
            request["method"] = o.method;
            if (level_n->count()) request["n"] = o.n;
            if (level_radius->count()) request["radius"] = o.radius;
            if (level_folds->count()) request["folds"] = o.folds;
            result = service::handle_confidence_level(request);
            render = render_confidence_level;
        } else {
            request["scheme"] = o.scheme;
            if (rec_n->count()) request["n"] = o.n;
            if (rec_folds->count()) request["folds"] = o.folds;
            if (o.distribution_free) request["distribution_free"] = true;
            if (o.has_resamples) request["has_resamples"] = true;
            result = service::handle_recommend(request);
            render = render_recommend;
        }

        if (json) {
            out << service::dump(service::result_body(std::move(result)));
        } else {
            render(out, result);
        }
        return kSuccess;
    } catch (...) {
        const service::ErrorInfo info = service::classify(std::current_exception());
        if (json) {
            err << service::dump(service::error_body(info));
        } else {
            err << "error: " << info.message << '\n';
        }
        if (info.status == 400) {
            if (!json) err << '\n' << active->help();
            return kUsageError;
        }
        return kDomainError;
    }
}

}  // namespace ci_planner::cli
