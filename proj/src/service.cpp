#include "ci_planner/service.hpp"

#include "ci_planner/errors.hpp"

#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>

namespace ci_planner::service {

namespace {

const Json& require_object(const Json& request) {
    if (!request.is_object()) throw RequestError("request body must be a JSON object");
    return request;
}

std::optional<double> number_field(const Json& req, const char* name) {
    const auto it = req.find(name);
    if (it == req.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) throw RequestError(std::string("field '") + name + "' must be a number");
    return it->get<double>();
}

std::optional<std::int64_t> integer_field(const Json& req, const char* name) {
    const auto it = req.find(name);
    if (it == req.end() || it->is_null()) return std::nullopt;
    if (it->is_number_integer()) return it->get<std::int64_t>();
    if (it->is_number_float()) {
        const double v = it->get<double>();
        if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 9.0e15) {
            return static_cast<std::int64_t>(v);
        }
    }
    throw RequestError(std::string("field '") + name + "' must be an integer");
}

std::optional<bool> bool_field(const Json& req, const char* name) {
    const auto it = req.find(name);
    if (it == req.end() || it->is_null()) return std::nullopt;
    if (!it->is_boolean()) throw RequestError(std::string("field '") + name + "' must be a boolean");
    return it->get<bool>();
}

std::optional<std::vector<double>> number_list_field(const Json& req, const char* name) {
    const auto it = req.find(name);
    if (it == req.end() || it->is_null()) return std::nullopt;
    if (!it->is_array()) throw RequestError(std::string("field '") + name + "' must be an array");
    std::vector<double> out;
    out.reserve(it->size());
    for (const auto& v : *it) {
        if (!v.is_number()) {
            throw RequestError(std::string("field '") + name + "' must contain only numbers");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

template <typename T>
T require(const std::optional<T>& v, const char* name, std::string_view context) {
    if (!v) {
        throw RequestError(std::string("missing field '") + name + "' required by " +
                           std::string(context));
    }
    return *v;
}

Method method_field(const Json& req) {
    const auto it = req.find("method");
    if (it == req.end() || !it->is_string()) {
        throw RequestError("missing string field 'method'");
    }
    const auto name = it->get<std::string>();
    if (auto m = try_parse_method(name)) return *m;
    throw RequestError("unknown method '" + name + "'");
}

std::string method_context(Method m) { return "method " + std::string(method_name(m)); }

// Parses the fields every interval request shares and checks the ones the
// method needs are present.
EstimateRequest estimate_request(const Json& req, bool need_confidence) {
    require_object(req);
    EstimateRequest out;
    out.method = method_field(req);
    const auto ctx = method_context(out.method);
    out.n = integer_field(req, "n");
    out.acc = number_field(req, "acc");
    out.folds = integer_field(req, "folds");
    out.samples = number_list_field(req, "samples");
    const auto confidence = number_field(req, "confidence");
    if (need_confidence) out.confidence = require(confidence, "confidence", ctx);

    for (std::string_view field : required_inputs(out.method)) {
        const bool present = (field == "n" && out.n) || (field == "acc" && out.acc) ||
                             (field == "folds" && out.folds) || (field == "samples" && out.samples) ||
                             field == "confidence";
        if (!present) {
            throw RequestError("missing field '" + std::string(field) + "' required by " + ctx);
        }
    }
    return out;
}

Json interval_fields(Json obj, const Interval& iv) {
    obj["interval"] = Json::array({iv.lower, iv.upper});
    obj["lower"] = iv.lower;
    obj["upper"] = iv.upper;
    obj["clipped_low"] = iv.clipped_low;
    obj["clipped_high"] = iv.clipped_high;
    return obj;
}

// Shortest text that parses back to the same double.
std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::vector<std::string_view> required_inputs(Method m) {
    switch (m) {
        case Method::Bootstrap: return {"samples", "confidence"};
        case Method::CrossValidation: return {"n", "acc", "confidence", "folds"};
        default: return {"n", "acc", "confidence"};
    }
}

ErrorInfo classify(std::exception_ptr error) {
    try {
        std::rethrow_exception(error);
    } catch (const RequestError& e) {
        return {400, "bad_request", e.what()};
    } catch (const Json::exception& e) {
        return {400, "bad_request", e.what()};
    } catch (const UnsupportedMethodError& e) {
        return {422, "unsupported_method", e.what()};
    } catch (const UnattainableError& e) {
        return {422, "unattainable", e.what()};
    } catch (const DomainError& e) {
        return {422, "domain_error", e.what()};
    } catch (const BracketError& e) {
        return {422, "numeric_error", e.what()};
    } catch (const NumericError& e) {
        return {422, "numeric_error", e.what()};
    } catch (const std::exception& e) {
        return {500, "internal_error", e.what()};
    } catch (...) {
        return {500, "internal_error", "unknown error"};
    }
}

Json error_body(const ErrorInfo& info) {
    return Json{{"error", Json{{"code", info.code}, {"message", info.message}}}};
}

Json result_body(Json result) { return Json{{"result", std::move(result)}}; }

std::string dump(const Json& body) { return body.dump() + "\n"; }

Json to_json(const EstimateResult& r) {
    Json out{{"method", method_name(r.method)}};
    out = interval_fields(std::move(out), r.interval);
    out["radius"] = r.radius;
    out["radius_kind"] = is_symmetric(r.method) ? "radius" : "half_width";
    Json inputs = Json::object();
    if (r.inputs.n) inputs["n"] = *r.inputs.n;
    if (r.inputs.acc) inputs["acc"] = *r.inputs.acc;
    inputs["confidence"] = r.inputs.confidence;
    if (r.inputs.folds) inputs["folds"] = *r.inputs.folds;
    if (r.inputs.sample_count) inputs["sample_count"] = *r.inputs.sample_count;
    out["inputs"] = std::move(inputs);
    return out;
}

Json to_json(const PlanResult& r) {
    Json requested{{"radius", r.requested.radius}, {"confidence", r.requested.confidence}};
    if (r.requested.folds) requested["folds"] = *r.requested.folds;
    return Json{{"method", method_name(r.method)},
                {"required_n", r.required_n},
                {"achieved_radius", r.achieved_radius},
                {"requested", std::move(requested)}};
}

Json to_json(const GradedInterval& g) {
    Json levels = Json::array();
    for (const GradedLevel& level : g.levels) {
        Json entry{{"confidence", level.level.gamma()}};
        entry = interval_fields(std::move(entry), level.interval);
        entry["radius"] = level.radius;
        levels.push_back(std::move(entry));
    }
    return Json{{"method", method_name(g.method)}, {"center", g.center}, {"levels", std::move(levels)}};
}

Json to_json(const guidance::Recommendation& r) {
    Json ranked = Json::array();
    for (const auto& entry : r.ranked) {
        ranked.push_back(Json{{"method", method_name(entry.method)}, {"rationale", entry.rationale}});
    }
    return Json{{"scheme", guidance::scheme_name(r.scheme)}, {"ranked", std::move(ranked)}};
}

Json to_json(const coverage::CoverageReport& r) {
    Json out{{"method", method_name(r.spec.method)},
             {"p", r.spec.true_accuracy},
             {"n", r.spec.n},
             {"confidence", r.spec.gamma},
             {"trials", r.spec.trials},
             {"seed", r.spec.seed}};
    if (r.spec.folds) out["folds"] = *r.spec.folds;
    out["covered"] = r.covered;
    out["empirical_coverage"] = r.empirical_coverage;
    out["mean_width"] = r.mean_width;
    out["clip_frequency"] = r.clip_frequency;
    return out;
}

Json methods_catalog() {
    Json out = Json::array();
    for (Method m : kAllMethods) {
        Json inputs = Json::array();
        for (auto field : required_inputs(m)) inputs.push_back(field);
        out.push_back(Json{{"name", method_name(m)},
                           {"display_name", method_display_name(m)},
                           {"required_inputs", std::move(inputs)},
                           {"symmetric", is_symmetric(m)},
                           {"supports_sample_size", supports_sample_size(m)},
                           {"supports_confidence_level", supports_confidence_level(m)}});
    }
    return out;
}

Json handle_estimate(const Json& request) {
    return to_json(estimate(estimate_request(request, true)));
}

Json handle_graded(const Json& request) {
    const EstimateRequest req = estimate_request(request, false);
    const auto levels = number_list_field(request, "levels").value_or(kDefaultGradedLevels);
    return to_json(graded_intervals(req, levels));
}

Json handle_sample_size(const Json& request) {
    require_object(request);
    const Method m = method_field(request);
    if (!supports_sample_size(m)) {
        throw UnsupportedMethodError("method " + std::string(method_name(m)) +
                                     " not invertible for sample size");
    }
    const auto ctx = method_context(m);
    const Radius radius(require(number_field(request, "radius"), "radius", ctx));
    const ConfidenceLevel gamma(require(number_field(request, "confidence"), "confidence", ctx));
    std::optional<FoldCount> folds;
    if (m == Method::CrossValidation) folds = FoldCount(require(integer_field(request, "folds"), "folds", ctx));
    return to_json(estimate_sample_size(m, radius, gamma, folds));
}

Json handle_confidence_level(const Json& request) {
    require_object(request);
    const Method m = method_field(request);
    if (!supports_confidence_level(m)) {
        throw UnsupportedMethodError("method " + std::string(method_name(m)) +
                                     " not invertible for confidence level");
    }
    const auto ctx = method_context(m);
    const SampleCount n(require(integer_field(request, "n"), "n", ctx));
    const Radius radius(require(number_field(request, "radius"), "radius", ctx));
    std::optional<FoldCount> folds;
    if (m == Method::CrossValidation) folds = FoldCount(require(integer_field(request, "folds"), "folds", ctx));
    const ConfidenceLevel gamma = estimate_confidence_level(m, n, radius, folds);

    Json out{{"method", method_name(m)}, {"confidence", gamma.gamma()}, {"n", n.value()},
             {"radius", radius.value()}};
    if (folds) out["folds"] = folds->value();
    return out;
}

Json handle_recommend(const Json& request) {
    require_object(request);
    const auto it = request.find("scheme");
    if (it == request.end() || !it->is_string()) throw RequestError("missing string field 'scheme'");
    guidance::ExperimentDescription desc;
    const auto scheme = it->get<std::string>();
    bool known = false;
    for (auto s : guidance::kAllSchemes) {
        if (guidance::scheme_name(s) == scheme) {
            desc.scheme = s;
            known = true;
        }
    }
    if (!known) throw RequestError("unknown scheme '" + scheme + "'");
    desc.n = integer_field(request, "n");
    desc.folds = integer_field(request, "folds");
    desc.wants_distribution_free = bool_field(request, "distribution_free").value_or(false);
    desc.has_resample_accuracies = bool_field(request, "has_resamples").value_or(false);
    return to_json(guidance::recommend(desc));
}

Response handle(std::string_view verb, std::string_view path, std::string_view body) {
    using Handler = Json (*)(const Json&);
    Handler handler = nullptr;
    if (verb == "GET" && path == "/api/methods") {
        return Response{200, result_body(methods_catalog())};
    }
    if (verb == "POST") {
        if (path == "/api/estimate") handler = handle_estimate;
        else if (path == "/api/sample-size") handler = handle_sample_size;
        else if (path == "/api/confidence-level") handler = handle_confidence_level;
        else if (path == "/api/recommend") handler = handle_recommend;
        else if (path == "/api/graded") handler = handle_graded;
    }
    if (handler == nullptr) {
        return Response{404, error_body({404, "not_found",
                                         "no endpoint " + std::string(verb) + " " + std::string(path)})};
    }

    Json request;
    try {
        request = Json::parse(body);
    } catch (const Json::parse_error& e) {
        return Response{400, error_body({400, "bad_request", std::string("malformed JSON: ") + e.what()})};
    }
    try {
        return Response{200, result_body(handler(request))};
    } catch (...) {
        const ErrorInfo info = classify(std::current_exception());
        return Response{info.status, error_body(info)};
    }
}

std::vector<double> parse_sample_text(std::string_view text) {
    std::vector<double> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos) continue;
        line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);

        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
        if (ec != std::errc{} || ptr != line.data() + line.size()) {
            throw RequestError("sample line " + std::to_string(line_no) + ": cannot parse '" +
                               std::string(line) + "' as a number");
        }
        out.push_back(value);
    }
    return out;
}

std::string coverage_csv_header() {
    return "method,p,n,confidence,trials,seed,folds,covered,empirical_coverage,mean_width,"
           "clip_frequency";
}

std::string coverage_csv_row(const coverage::CoverageReport& r) {
    std::ostringstream row;
    row << method_name(r.spec.method) << ',' << format_double(r.spec.true_accuracy) << ','
        << r.spec.n << ',' << format_double(r.spec.gamma) << ',' << r.spec.trials << ','
        << r.spec.seed << ',' << (r.spec.folds ? std::to_string(*r.spec.folds) : "") << ','
        << r.covered << ',' << format_double(r.empirical_coverage) << ','
        << format_double(r.mean_width) << ',' << format_double(r.clip_frequency);
    return row.str();
}

}  // namespace ci_planner::service
