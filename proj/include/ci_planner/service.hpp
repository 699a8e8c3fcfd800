#pragma once

// JSON request handling shared by the HTTP service and the command line.
//
// Both front ends turn their input into the same JSON request object and
// serialize the same response body, so `ci-planner --format json` output is
// byte-identical to the HTTP response for an equivalent request.
//
// Response bodies carry exactly one of
//   {"result": ...}
//   {"error": {"code": "...", "message": "..."}}
// Error codes: bad_request (400), not_found (404), and for well-formed
// requests with invalid values (422) domain_error, unsupported_method,
// unattainable, numeric_error.

#include "ci_planner/coverage.hpp"
#include "ci_planner/estimators.hpp"
#include "ci_planner/guidance.hpp"
#include "ci_planner/planner.hpp"

#include "json.hpp"

#include <exception>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ci_planner::service {

using Json = nlohmann::ordered_json;

/// Malformed request: missing or ill-typed field, unknown method or scheme.
class RequestError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Response {
    int status = 200;
    Json body;
};

struct ErrorInfo {
    int status = 500;
    std::string code;
    std::string message;
};

/// Maps an exception thrown by a handler to its status and error code.
ErrorInfo classify(std::exception_ptr error);

Json error_body(const ErrorInfo& info);
Json result_body(Json result);

/// Canonical serializer for every response body.
std::string dump(const Json& body);

// Serializers.
Json to_json(const EstimateResult& r);
Json to_json(const PlanResult& r);
Json to_json(const GradedInterval& g);
Json to_json(const guidance::Recommendation& r);
Json to_json(const coverage::CoverageReport& r);
Json methods_catalog();

/// Input fields a method needs for an interval estimate.
std::vector<std::string_view> required_inputs(Method m);

// Handlers: parse the request object and return the `result` payload.
// They throw RequestError for shape problems and module errors otherwise.
Json handle_estimate(const Json& request);
Json handle_sample_size(const Json& request);
Json handle_confidence_level(const Json& request);
Json handle_recommend(const Json& request);
Json handle_graded(const Json& request);

/// Full dispatch for one HTTP request; never throws.
Response handle(std::string_view verb, std::string_view path, std::string_view body);

/// Parses the bootstrap sample text format: one accuracy per line, `#`
/// starts a comment, blank lines are ignored. Throws RequestError naming
/// the offending line.
std::vector<double> parse_sample_text(std::string_view text);

std::string coverage_csv_header();
std::string coverage_csv_row(const coverage::CoverageReport& r);

}  // namespace ci_planner::service
