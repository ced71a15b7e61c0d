#pragma once
// Analysis and mitigation reports and their canonical JSON form.
//
// Canonical JSON: object keys sorted, two-space indentation, floating-point
// fields printed with six decimals, counts and indices as integers, an
// unrecoverable impact as null.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "antic/at_engine.hpp"

namespace antic::io {

std::string format_fixed(double value);

/// Writes `value` canonically. Floating-point numbers get six decimals.
std::string canonical_json(const nlohmann::json& value);

struct LinkRecord {
    std::size_t producer = 0;
    std::string condition;
    std::size_t consumer = 0;
};

struct EventRecord {
    std::string event;
    LinkRecord link;
    std::size_t trigger_index = 0;
    std::optional<double> impact;
};

struct PrestrengthRecord {
    std::string literal;
    std::size_t p = 0;
    std::size_t e = 0;
    double score = 0.0;
};

struct AnalysisReport {
    std::vector<PrestrengthRecord> prestrength;
    std::vector<EventRecord> conditioning_events;
    std::string risk_level = "LOW";
    std::vector<std::size_t> justification;
};

struct ActionRecord {
    std::size_t position = 0;
    std::string action;
};

struct ResidualRecord {
    std::size_t event = 0;
    std::optional<double> impact;
    double residual = 0.0;
};

struct AntRecord {
    std::vector<ActionRecord> actions;
    std::vector<std::size_t> covered;
    double added_cost = 0.0;
    std::vector<ResidualRecord> residuals;
};

struct ExpectationRecord {
    std::size_t event = 0;
    double saving = 0.0;
};

struct MitigationReport {
    std::vector<std::string> plan_prime;
    std::vector<AntRecord> ant;
    std::vector<ExpectationRecord> expectations;
    AtAssessment assessment;
    std::string savings_accounting = "original";
    std::string risk_level = "LOW";
    std::string status = "goal-reached";
};

using Report = std::variant<AnalysisReport, MitigationReport>;

AnalysisReport make_report(const Analysis& analysis);
MitigationReport make_report(const MitigationResult& result, std::span<const ConditioningEvent> events,
                             SavingsAccounting accounting);

std::string write_report(const AnalysisReport& report);
std::string write_report(const MitigationReport& report);
std::string write_report(const Report& report);

/// Reads either report kind (told apart by its keys). Throws Error on
/// malformed input.
Report read_report(std::string_view text);

/// Recomputes the assessment from a report's recorded events and
/// anticipatory action sets.
AtAssessment assess_report(const Report& report);

}  // namespace antic::io
