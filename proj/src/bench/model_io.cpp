#include <charconv>

#include <json.hpp>

#include "fairbench/bench.hpp"
#include "fairbench/error.hpp"
#include "fairbench/text.hpp"

// Artifact layout: a header line "FBM1 <version>" followed by a JSON body in
// which every real number is written as shortest round-trip decimal text.

namespace fairbench::bench {

namespace {

using json = nlohmann::ordered_json;

json num(double v) { return text::shortest(v); }

json nums(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(text::shortest(x));
    return a;
}

double read_num(const json& j, const char* what) {
    if (!j.is_string()) throw ParseError(std::string("model artifact: ") + what + " must be decimal text");
    const auto s = j.get<std::string>();
    if (auto v = text::parse_number(s)) return *v;
    throw ParseError(std::string("model artifact: bad number '") + s + "' in " + what);
}

std::vector<double> read_nums(const json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string("model artifact: ") + what + " must be an array");
    std::vector<double> out;
    for (const auto& x : j) out.push_back(read_num(x, what));
    return out;
}

json params_json(const learners::Parameters& params) {
    return std::visit(
        [](const auto& p) -> json {
            using P = std::decay_t<decltype(p)>;
            json j;
            if constexpr (std::is_same_v<P, learners::ConstantParams>) {
                j["type"] = "constant";
                j["value"] = num(p.value);
            } else if constexpr (std::is_same_v<P, learners::LogisticParams>) {
                j["type"] = "logistic";
                j["weights"] = nums(p.weights);
                j["bias"] = num(p.bias);
                j["threshold"] = num(p.threshold);
            } else if constexpr (std::is_same_v<P, learners::TreeParams>) {
                j["type"] = "tree";
                json nodes = json::array();
                for (const auto& n : p.nodes) {
                    nodes.push_back(json::array({n.feature, num(n.threshold), n.left, n.right, num(n.value)}));
                }
                j["nodes"] = std::move(nodes);
            } else if constexpr (std::is_same_v<P, learners::MlpParams>) {
                j["type"] = "mlp";
                j["hidden"] = p.hidden;
                j["w1"] = nums(p.w1);
                j["b1"] = nums(p.b1);
                j["w2"] = nums(p.w2);
                j["b2"] = num(p.b2);
                j["threshold"] = num(p.threshold);
            } else {
                j["type"] = "linear";
                j["coefficients"] = nums(p.coefficients);
                j["intercept"] = num(p.intercept);
            }
            return j;
        },
        params);
}

learners::Parameters read_params(const json& j, std::size_t width) {
    const auto type = j.at("type").get<std::string>();
    if (type == "constant") return learners::ConstantParams{read_num(j.at("value"), "value")};
    if (type == "logistic") {
        learners::LogisticParams p;
        p.weights = read_nums(j.at("weights"), "weights");
        p.bias = read_num(j.at("bias"), "bias");
        p.threshold = read_num(j.at("threshold"), "threshold");
        if (p.weights.size() != width) throw ParseError("model artifact: weight count does not match the encoder");
        return p;
    }
    if (type == "tree") {
        learners::TreeParams p;
        for (const auto& n : j.at("nodes")) {
            if (!n.is_array() || n.size() != 5) throw ParseError("model artifact: tree node must have 5 fields");
            learners::TreeNode node;
            node.feature = n[0].get<std::int64_t>();
            node.threshold = read_num(n[1], "threshold");
            node.left = n[2].get<std::int64_t>();
            node.right = n[3].get<std::int64_t>();
            node.value = read_num(n[4], "value");
            p.nodes.push_back(node);
        }
        const auto count = static_cast<std::int64_t>(p.nodes.size());
        if (count == 0) throw ParseError("model artifact: tree has no nodes");
        for (std::size_t i = 0; i < p.nodes.size(); ++i) {
            const auto& n = p.nodes[i];
            if (n.feature < 0) continue;
            const auto self = static_cast<std::int64_t>(i);
            if (n.feature >= static_cast<std::int64_t>(width) || n.left <= self || n.right <= self ||
                n.left >= count || n.right >= count) {
                throw ParseError("model artifact: tree node " + std::to_string(i) + " is inconsistent");
            }
        }
        return p;
    }
    if (type == "mlp") {
        learners::MlpParams p;
        p.hidden = j.at("hidden").get<std::size_t>();
        p.w1 = read_nums(j.at("w1"), "w1");
        p.b1 = read_nums(j.at("b1"), "b1");
        p.w2 = read_nums(j.at("w2"), "w2");
        p.b2 = read_num(j.at("b2"), "b2");
        p.threshold = read_num(j.at("threshold"), "threshold");
        if (p.w1.size() != p.hidden * width || p.b1.size() != p.hidden || p.w2.size() != p.hidden) {
            throw ParseError("model artifact: mlp layer sizes do not match");
        }
        return p;
    }
    if (type == "linear") {
        learners::LinearParams p;
        p.coefficients = read_nums(j.at("coefficients"), "coefficients");
        p.intercept = read_num(j.at("intercept"), "intercept");
        if (p.coefficients.size() != width) throw ParseError("model artifact: coefficient count does not match");
        return p;
    }
    throw ParseError("model artifact: unknown parameter type '" + type + "'");
}

}  // namespace

std::string serialize_model(const learners::FittedModel& model) {
    json body;
    body["kind"] = std::string(learners::to_string(model.kind));
    body["task"] = std::string(data::to_string(model.task));
    json cols = json::array();
    for (const auto& c : model.encoder.columns) {
        json cj;
        cj["name"] = c.name;
        cj["type"] = c.type == data::ColumnType::numeric ? "numeric" : "categorical";
        if (c.type == data::ColumnType::categorical) cj["levels"] = c.levels;
        cols.push_back(std::move(cj));
    }
    body["encoder"] = std::move(cols);
    if (model.scaler) {
        json sj;
        sj["kind"] = std::string(data::to_string(model.scaler->kind));
        json sc = json::array();
        for (const auto& c : model.scaler->columns) sc.push_back(json::array({c.column, num(c.center), num(c.spread)}));
        sj["columns"] = std::move(sc);
        body["scaler"] = std::move(sj);
    } else {
        body["scaler"] = nullptr;
    }
    body["params"] = params_json(model.params);
    return std::string(kModelMagic) + " " + std::to_string(kModelFormatVersion) + "\n" + body.dump(1) + "\n";
}

learners::FittedModel deserialize_model(std::string_view bytes) {
    if (bytes.substr(0, kModelMagic.size()) != kModelMagic) {
        throw ParseError("not a model artifact: expected magic '" + std::string(kModelMagic) + "'");
    }
    const auto eol = bytes.find('\n');
    if (eol == std::string_view::npos) throw ParseError("model artifact truncated after the header");
    const auto header = bytes.substr(0, eol);
    if (header.size() < kModelMagic.size() + 2 || header[kModelMagic.size()] != ' ') {
        throw ParseError("model artifact header must be '" + std::string(kModelMagic) + " <version>'");
    }
    int version = 0;
    const auto vtext = header.substr(kModelMagic.size() + 1);
    const auto [ptr, ec] = std::from_chars(vtext.data(), vtext.data() + vtext.size(), version);
    if (ec != std::errc() || ptr != vtext.data() + vtext.size()) {
        throw ParseError("model artifact header has a malformed version");
    }
    if (version != kModelFormatVersion) {
        throw ParseError("model artifact format version " + std::to_string(version) +
                         " is not supported (this reader understands version " +
                         std::to_string(kModelFormatVersion) + ")");
    }

    json body;
    try {
        body = json::parse(bytes.substr(eol + 1));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("model artifact body is truncated or malformed: ") + e.what());
    }
    try {
        learners::FittedModel m;
        const auto kind = body.at("kind").get<std::string>();
        const auto k = learners::parse_learner_kind(kind);
        if (!k) throw ParseError("model artifact: unknown learner kind '" + kind + "'");
        m.kind = *k;
        m.task = learners::capability(*k).task;
        for (const auto& cj : body.at("encoder")) {
            learners::EncodedColumn c;
            c.name = cj.at("name").get<std::string>();
            const auto type = cj.at("type").get<std::string>();
            if (type == "numeric") {
                c.type = data::ColumnType::numeric;
            } else if (type == "categorical") {
                c.type = data::ColumnType::categorical;
                c.levels = cj.at("levels").get<std::vector<std::string>>();
            } else {
                throw ParseError("model artifact: unknown column type '" + type + "'");
            }
            m.encoder.columns.push_back(std::move(c));
        }
        if (const auto& sj = body.at("scaler"); !sj.is_null()) {
            data::Scaler s;
            const auto sk = data::parse_scaler_kind(sj.at("kind").get<std::string>());
            if (!sk) throw ParseError("model artifact: unknown scaler kind");
            s.kind = *sk;
            for (const auto& c : sj.at("columns")) {
                if (!c.is_array() || c.size() != 3) throw ParseError("model artifact: scaler column needs 3 fields");
                s.columns.push_back({c[0].get<std::string>(), read_num(c[1], "center"), read_num(c[2], "spread")});
            }
            m.scaler = std::move(s);
        }
        m.params = read_params(body.at("params"), m.encoder.width());
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model artifact is missing or mistypes a field: ") + e.what());
    }
}

}  // namespace fairbench::bench
