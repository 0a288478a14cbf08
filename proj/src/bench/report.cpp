#include <json.hpp>

#include "fairbench/bench.hpp"
#include "fairbench/text.hpp"

namespace fairbench::bench {

namespace {

std::string cell(const std::optional<double>& v) { return v ? text::fixed6(*v) : std::string("NA"); }

nlohmann::ordered_json number_or_null(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json key_json(const CombinationKey& k) {
    nlohmann::ordered_json j;
    j["scaler"] = std::string(data::to_string(k.scaler));
    j["model"] = std::string(learners::to_string(k.learner));
    j["method"] = std::string(mitigation::to_string(k.mitigation));
    return j;
}

}  // namespace

std::string report_csv(const QualityReport& report) {
    std::string out = "scaler,model,method";
    for (auto m : report.metrics) {
        const std::string code(metrics::report_code(m));
        out += "," + code + "_mean," + code + "_std";
    }
    out += ",score\n";
    for (const auto& row : report.rows) {
        out += std::string(data::to_string(row.key.scaler)) + "," + std::string(learners::to_string(row.key.learner)) +
               "," + std::string(mitigation::to_string(row.key.mitigation));
        for (std::size_t m = 0; m < report.metrics.size(); ++m) {
            const MetricSummary& s = row.metrics[m];
            out += "," + (row.failed ? std::string("NA") : cell(s.mean));
            out += "," + (row.failed ? std::string("NA") : cell(s.std));
        }
        out += "," + (row.failed ? std::string("NA") : cell(row.score));
        out += "\n";
    }
    return out;
}

std::string report_document(const QualityReport& report) {
    nlohmann::ordered_json doc;
    doc["metrics"] = nlohmann::ordered_json::array();
    for (auto m : report.metrics) doc["metrics"].push_back(std::string(metrics::to_string(m)));
    doc["tradeoff"] = {{"kind", std::string(to_string(report.tradeoff.kind))}, {"weights", report.tradeoff.weights}};
    doc["folds"] = report.folds;
    doc["best"] = key_json(report.rows.at(report.best).key);
    doc["best"]["row"] = report.best;
    doc["front"] = nlohmann::ordered_json::array();
    for (std::size_t i : report.front) doc["front"].push_back(i);
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : report.rows) {
        auto r = key_json(row.key);
        r["failed"] = row.failed;
        if (row.failed) r["error"] = row.error;
        r["metrics"] = nlohmann::ordered_json::object();
        for (std::size_t m = 0; m < report.metrics.size(); ++m) {
            const MetricSummary& s = row.metrics[m];
            nlohmann::ordered_json mj;
            mj["mean"] = number_or_null(s.mean);
            mj["std"] = number_or_null(s.std);
            mj["goodness"] = number_or_null(s.goodness);
            mj["mean_text"] = row.failed ? std::string("NA") : cell(s.mean);
            mj["std_text"] = row.failed ? std::string("NA") : cell(s.std);
            mj["undefined_folds"] = s.undefined_folds;
            r["metrics"][std::string(metrics::report_code(report.metrics[m]))] = mj;
        }
        r["score"] = number_or_null(row.score);
        r["score_text"] = row.failed ? std::string("NA") : cell(row.score);
        r["on_front"] = row.on_front;
        doc["rows"].push_back(std::move(r));
    }
    doc["flags"] = report.flags;
    return doc.dump(2) + "\n";
}

}  // namespace fairbench::bench
