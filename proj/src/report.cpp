#include "antic/report.hpp"

#include <cmath>
#include <cstdio>

namespace antic::io {

using nlohmann::json;

std::string format_fixed(double value) {
    if (value == 0.0) value = 0.0;  // no "-0.000000"
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    std::string out(buf);
    if (out == "-0.000000") out = "0.000000";
    return out;
}

namespace {

void write_value(const json& v, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
    const std::string close(static_cast<std::size_t>(depth) * 2, ' ');
    switch (v.type()) {
        case json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad;
                out += json(it.key()).dump();
                out += ": ";
                write_value(it.value(), out, depth + 1);
            }
            out += "\n" + close + "}";
            return;
        }
        case json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& item : v) {
                if (!first) out += ",\n";
                first = false;
                out += pad;
                write_value(item, out, depth + 1);
            }
            out += "\n" + close + "]";
            return;
        }
        case json::value_t::number_float: {
            const double d = v.get<double>();
            out += std::isfinite(d) ? format_fixed(d) : "null";
            return;
        }
        default:
            out += v.dump();
    }
}

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

std::optional<double> read_optional(const json& v) {
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
}

json to_json(const AnalysisReport& r) {
    json pre = json::array();
    for (const auto& p : r.prestrength)
        pre.push_back({{"literal", p.literal}, {"p", p.p}, {"e", p.e}, {"score", p.score}});
    json events = json::array();
    for (const auto& e : r.conditioning_events) {
        events.push_back({{"event", e.event},
                          {"link", {{"producer", e.link.producer}, {"condition", e.link.condition}, {"consumer", e.link.consumer}}},
                          {"trigger_index", e.trigger_index},
                          {"impact", optional_number(e.impact)}});
    }
    return {{"prestrength", pre},
            {"conditioning_events", events},
            {"risk", {{"level", r.risk_level}, {"justification", r.justification}}}};
}

json to_json(const MitigationReport& r) {
    json ant = json::array();
    for (const auto& set : r.ant) {
        json actions = json::array();
        for (const auto& a : set.actions) actions.push_back({{"position", a.position}, {"action", a.action}});
        json residuals = json::array();
        for (const auto& x : set.residuals)
            residuals.push_back({{"event", x.event}, {"impact", optional_number(x.impact)}, {"residual", x.residual}});
        ant.push_back({{"actions", actions}, {"covered", set.covered}, {"added_cost", set.added_cost}, {"residuals", residuals}});
    }
    json expectations = json::array();
    for (const auto& e : r.expectations) expectations.push_back({{"event", e.event}, {"saving", e.saving}});
    const auto& a = r.assessment;
    return {{"plan_prime", r.plan_prime},
            {"ant", ant},
            {"expectations", expectations},
            {"assessment",
             {{"identified", a.identified},
              {"mitigated", a.mitigated},
              {"cost", a.cost},
              {"impact_sum", a.impact_sum},
              {"at_assess", a.value},
              {"uneconomic", a.uneconomic}}},
            {"savings_accounting", r.savings_accounting},
            {"risk", {{"level", r.risk_level}}},
            {"status", r.status}};
}

AnalysisReport analysis_from_json(const json& j) {
    AnalysisReport r;
    for (const auto& p : j.at("prestrength"))
        r.prestrength.push_back({p.at("literal").get<std::string>(), p.at("p").get<std::size_t>(),
                                 p.at("e").get<std::size_t>(), p.at("score").get<double>()});
    for (const auto& e : j.at("conditioning_events")) {
        EventRecord ev;
        ev.event = e.at("event").get<std::string>();
        ev.link.producer = e.at("link").at("producer").get<std::size_t>();
        ev.link.condition = e.at("link").at("condition").get<std::string>();
        ev.link.consumer = e.at("link").at("consumer").get<std::size_t>();
        ev.trigger_index = e.at("trigger_index").get<std::size_t>();
        ev.impact = read_optional(e.at("impact"));
        r.conditioning_events.push_back(std::move(ev));
    }
    r.risk_level = j.at("risk").at("level").get<std::string>();
    r.justification = j.at("risk").at("justification").get<std::vector<std::size_t>>();
    return r;
}

MitigationReport mitigation_from_json(const json& j) {
    MitigationReport r;
    r.plan_prime = j.at("plan_prime").get<std::vector<std::string>>();
    for (const auto& s : j.at("ant")) {
        AntRecord set;
        for (const auto& a : s.at("actions"))
            set.actions.push_back({a.at("position").get<std::size_t>(), a.at("action").get<std::string>()});
        set.covered = s.at("covered").get<std::vector<std::size_t>>();
        set.added_cost = s.at("added_cost").get<double>();
        for (const auto& x : s.at("residuals"))
            set.residuals.push_back(
                {x.at("event").get<std::size_t>(), read_optional(x.at("impact")), x.at("residual").get<double>()});
        r.ant.push_back(std::move(set));
    }
    for (const auto& e : j.at("expectations"))
        r.expectations.push_back({e.at("event").get<std::size_t>(), e.at("saving").get<double>()});
    const auto& a = j.at("assessment");
    r.assessment.identified = a.at("identified").get<std::size_t>();
    r.assessment.mitigated = a.at("mitigated").get<std::size_t>();
    r.assessment.cost = a.at("cost").get<double>();
    r.assessment.impact_sum = a.at("impact_sum").get<double>();
    r.assessment.value = a.at("at_assess").get<double>();
    r.assessment.uneconomic = a.at("uneconomic").get<bool>();
    r.savings_accounting = j.at("savings_accounting").get<std::string>();
    r.risk_level = j.at("risk").at("level").get<std::string>();
    r.status = j.at("status").get<std::string>();
    return r;
}

}  // namespace

std::string canonical_json(const json& value) {
    std::string out;
    write_value(value, out, 0);
    return out;
}

AnalysisReport make_report(const Analysis& analysis) {
    AnalysisReport r;
    for (const auto& p : analysis.prestrength)
        r.prestrength.push_back({to_string(p.literal), p.uses, p.establishers, p.score()});
    for (const auto& e : analysis.events) {
        r.conditioning_events.push_back(
            {e.event.name(), {e.link.producer, to_string(e.link.condition), e.link.consumer}, e.trigger_index, e.impact});
    }
    r.risk_level = std::string(to_string(analysis.risk.level));
    r.justification = analysis.risk.justification;
    return r;
}

MitigationReport make_report(const MitigationResult& result, std::span<const ConditioningEvent> events,
                             SavingsAccounting accounting) {
    MitigationReport r;
    for (const auto& s : result.plan.steps) r.plan_prime.push_back(s.name());
    for (const auto& set : result.ant) {
        AntRecord rec;
        for (const auto& a : set.actions) rec.actions.push_back({a.position, a.action.name()});
        rec.covered = set.covered;
        rec.added_cost = set.added_cost;
        for (std::size_t i = 0; i < set.covered.size(); ++i) {
            const auto idx = set.covered[i];
            rec.residuals.push_back({idx, idx < events.size() ? events[idx].impact : std::nullopt, set.residuals[i]});
        }
        r.ant.push_back(std::move(rec));
    }
    for (const auto& e : result.expectations) r.expectations.push_back({e.event, e.saving});
    r.assessment = result.assessment;
    r.savings_accounting = std::string(to_string(accounting));
    r.risk_level = std::string(to_string(result.risk.level));
    r.status = std::string(to_string(result.status));
    return r;
}

std::string write_report(const AnalysisReport& report) { return canonical_json(to_json(report)) + "\n"; }
std::string write_report(const MitigationReport& report) { return canonical_json(to_json(report)) + "\n"; }

std::string write_report(const Report& report) {
    return std::visit([](const auto& r) { return write_report(r); }, report);
}

Report read_report(std::string_view text) {
    try {
        const auto j = json::parse(text);
        if (!j.is_object()) throw Error("report must be a JSON object");
        if (j.contains("plan_prime")) return mitigation_from_json(j);
        if (j.contains("conditioning_events")) return analysis_from_json(j);
        throw Error("not an analysis or mitigation report");
    } catch (const json::exception& e) {
        throw Error(std::string("malformed report: ") + e.what());
    }
}

AtAssessment assess_report(const Report& report) {
    if (const auto* a = std::get_if<AnalysisReport>(&report)) return at_assess(a->conditioning_events.size(), {});
    const auto& m = std::get<MitigationReport>(report);
    const bool net = m.savings_accounting == "net";
    std::vector<AntContribution> parts;
    for (const auto& set : m.ant) {
        AntContribution c;
        c.cost = set.added_cost;
        for (const auto& x : set.residuals) {
            if (!x.impact) throw Error("report lists an unrecoverable event as mitigated");
            c.mitigated_impacts.push_back(net ? *x.impact - x.residual : *x.impact);
        }
        parts.push_back(std::move(c));
    }
    return at_assess(m.assessment.identified, parts);
}

}  // namespace antic::io
