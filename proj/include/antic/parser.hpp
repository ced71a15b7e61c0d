#pragma once
// Reader/writer for the on-disk domain, problem and plan formats.
//
// Domain and problem files use a small PDDL-like s-expression subset. Agent
// actions are `(:action ...)` blocks, exogenous events `(:event ...)`, and
// mitigation candidates `(:mitigation ...)`; all share the same body:
//
//   (:action move :parameters (?a - agent ?from - cell ?to - cell)
//     :precondition (and (at ?a ?from) (not (blocked ?to)))
//     :effect (and (not (at ?a ?from)) (at ?a ?to))
//     :cost 1)
//
// Plans are line oriented: `INDEX: (action obj...)`, indices 0..n-1.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "antic/strips.hpp"

namespace antic::io {

struct SourceSpan {
    std::string file;
    std::size_t line = 1;
    std::size_t column = 1;
};

enum class Severity { error, warning };

struct ParseDiagnostic {
    Severity severity = Severity::error;
    std::string message;
    SourceSpan span;

    /// `file:line:column: error: message`
    std::string format() const;
};

/// Thrown on the first error; no partial model is ever returned.
class ParseError : public Error {
public:
    explicit ParseError(std::vector<ParseDiagnostic> diagnostics);
    const std::vector<ParseDiagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<ParseDiagnostic> diagnostics_;
};

/// Warnings produced while parsing are appended to `warnings` when given.
DomainModel parse_domain(std::string_view text, std::string_view file = "<domain>",
                         std::vector<ParseDiagnostic>* warnings = nullptr);

Problem parse_problem(std::string_view text, const DomainModel& domain,
                      std::string_view file = "<problem>",
                      std::vector<ParseDiagnostic>* warnings = nullptr);

GroundPlan parse_plan(std::string_view text, const DomainModel& domain, const Problem& problem,
                      std::string_view file = "<plan>");

std::string write_domain(const DomainModel& domain);
std::string write_problem(const Problem& problem);
std::string write_plan(const GroundPlan& plan);

/// Whole-file read; throws Error when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Parse and ground a domain/problem pair from disk.
GroundedTask load_task(const std::filesystem::path& domain_path,
                       const std::filesystem::path& problem_path);
GroundPlan load_plan(const std::filesystem::path& path, const GroundedTask& task);

}  // namespace antic::io
