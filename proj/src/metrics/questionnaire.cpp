#include <algorithm>
#include <set>

#include <json.hpp>

#include "embedded_data.hpp"
#include "fairbench/error.hpp"
#include "fairbench/metrics.hpp"

namespace fairbench::metrics {

namespace {

using nlohmann::json;

const json& document() {
    static const json doc = json::parse(embedded::questionnaire_json);
    return doc;
}

bool matches(const json& when, const std::map<std::string, std::string>& answers) {
    for (const auto& [question, option] : when.items()) {
        const auto it = answers.find(question);
        if (it == answers.end() || it->second != option.get<std::string>()) return false;
    }
    return true;
}

MetricKind metric_from(const json& v) {
    const auto id = v.get<std::string>();
    if (auto k = parse_metric_kind(id)) return *k;
    throw ParseError("questionnaire references unknown metric '" + id + "'");
}

}  // namespace

std::string_view questionnaire_document() { return embedded::questionnaire_json; }

std::vector<MetricKind> recommend_metrics(const std::map<std::string, std::string>& answers) {
    const json& doc = document();
    const json& questions = doc.at("questions");

    for (const auto& [question, option] : answers) {
        const auto q = std::find_if(questions.begin(), questions.end(),
                                    [&](const json& x) { return x.at("id") == question; });
        if (q == questions.end()) throw UnknownReferenceError("question", question);
        const auto& options = q->at("options");
        const bool known = std::any_of(options.begin(), options.end(),
                                       [&](const json& o) { return o.at("id") == option; });
        if (!known) throw UnknownReferenceError("answer for question '" + question + "'", option);
    }

    std::map<std::string, std::string> effective;
    for (const auto& q : questions) {
        const auto id = q.at("id").get<std::string>();
        if (auto it = answers.find(id); it != answers.end()) {
            effective[id] = it->second;
        } else if (q.contains("default")) {
            effective[id] = q.at("default").get<std::string>();
        }
    }
    for (const auto& q : questions) {
        const auto id = q.at("id").get<std::string>();
        if (!q.value("required", false) || answers.count(id)) continue;
        const bool waived = q.contains("required_unless") && matches(q.at("required_unless"), effective);
        if (!waived) throw InvalidArgument("question '" + id + "' must be answered");
    }

    std::set<MetricKind> picked;
    for (const auto& rule : doc.at("rules")) {
        if (!matches(rule.at("when"), effective)) continue;
        if (rule.contains("set")) {
            picked.clear();
            for (const auto& m : rule.at("set")) picked.insert(metric_from(m));
        }
        if (rule.contains("add")) {
            for (const auto& m : rule.at("add")) picked.insert(metric_from(m));
        }
        if (rule.contains("remove")) {
            for (const auto& m : rule.at("remove")) picked.erase(metric_from(m));
        }
        if (rule.value("stop", false)) break;
    }
    return {picked.begin(), picked.end()};
}

}  // namespace fairbench::metrics
