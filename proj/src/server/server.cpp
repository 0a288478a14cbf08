#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "fairbench/error.hpp"
#include "fairbench/manifest.hpp"
#include "fairbench/metrics.hpp"
#include "fairbench/server.hpp"
#include "fairbench/text.hpp"

namespace fairbench::server {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kJson = "application/json";

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

std::size_t env_count(const char* name, std::size_t fallback) {
    const auto v = env(name);
    if (!v) return fallback;
    const auto n = text::parse_number(*v);
    if (!n || *n < 0 || *n != static_cast<double>(static_cast<std::size_t>(*n))) {
        throw InvalidArgument(std::string(name) + " must be a non-negative integer");
    }
    return static_cast<std::size_t>(*n);
}

void send_json(httplib::Response& res, int status, const ordered_json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, const std::string& message,
                const std::vector<std::string>& violations = {}) {
    ordered_json body;
    body["error"] = message;
    if (!violations.empty()) body["violations"] = violations;
    send_json(res, status, body);
}

// Maps library errors from a request body to status codes.
void send_exception(httplib::Response& res, const std::exception& e) {
    if (const auto* c = dynamic_cast<const ConstraintError*>(&e)) return send_error(res, 422, e.what(), c->violations());
    if (dynamic_cast<const ParseError*>(&e)) return send_error(res, 400, e.what());
    if (dynamic_cast<const UnknownReferenceError*>(&e) || dynamic_cast<const InvalidArgument*>(&e) ||
        dynamic_cast<const CapabilityError*>(&e)) {
        return send_error(res, 422, e.what());
    }
    send_error(res, 500, e.what());
}

ordered_json job_status(const Job& job) {
    ordered_json out;
    out["state"] = std::string(to_string(job.state));
    out["percentage"] = job.percentage;
    if (job.state == JobState::failed) out["message"] = job.message;
    return out;
}

std::string featuremodel_body(const extfm::FeatureModel& model) {
    ordered_json out;
    out["feature_model"] = ordered_json::parse(extfm::to_document(model));
    out["questionnaire"] = ordered_json::parse(metrics::questionnaire_document());
    return out.dump();
}

}  // namespace

ServerConfig config_from_env(ServerConfig base) {
    if (auto v = env("FAIRBENCH_HOST")) base.host = *v;
    base.port = static_cast<int>(env_count("FAIRBENCH_PORT", static_cast<std::size_t>(base.port)));
    if (base.port > 65535) throw InvalidArgument("FAIRBENCH_PORT must be at most 65535");
    base.workers = env_count("FAIRBENCH_WORKERS", base.workers);
    base.engine_threads = env_count("FAIRBENCH_ENGINE_THREADS", base.engine_threads);
    if (auto v = env("FAIRBENCH_DATA_DIR")) base.data_dir = *v;
    base.upload_limit = env_count("FAIRBENCH_UPLOAD_LIMIT", base.upload_limit);
    base.retention = std::chrono::seconds(env_count("FAIRBENCH_RETENTION", static_cast<std::size_t>(base.retention.count())));
    base.cors = env_count("FAIRBENCH_CORS", base.cors ? 1 : 0) != 0;
    return base;
}

struct Server::Impl {
    httplib::Server http;
    extfm::FeatureModel model = extfm::load_feature_model();
    std::string featuremodel;
};

Server::Server(ServerConfig config) : config_(std::move(config)) {
    if (config_.workers == 0) throw InvalidArgument("workers must be at least 1");
    store_ = std::make_unique<JobStore>(config_.data_dir);
    if (config_.retention.count() > 0) store_->prune(config_.retention);
    runner_ = std::make_unique<JobRunner>(*store_, config_.workers, config_.engine_threads);
    for (const auto& id : store_->recovered_queue()) runner_->submit(id);

    impl_ = std::make_unique<Impl>();
    impl_->featuremodel = featuremodel_body(impl_->model);
    auto& http = impl_->http;
    const auto& model = impl_->model;
    http.set_payload_max_length(config_.upload_limit);
    // Refuse on the declared length, before any body bytes are read.
    http.set_pre_routing_handler([limit = config_.upload_limit](const httplib::Request& req, httplib::Response& res) {
        if (!req.has_header("Content-Length")) return httplib::Server::HandlerResponse::Unhandled;
        const auto declared = text::parse_number(req.get_header_value("Content-Length"));
        if (declared && *declared <= static_cast<double>(limit)) return httplib::Server::HandlerResponse::Unhandled;
        send_error(res, 413, "request body exceeds the upload limit of " + std::to_string(limit) + " bytes");
        res.set_header("Connection", "close");
        return httplib::Server::HandlerResponse::Handled;
    });

    if (config_.cors) {
        http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                  {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                  {"Access-Control-Allow-Headers", "Content-Type"}});
        http.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    }

    http.Get("/api/v1/featuremodel", [this](const httplib::Request&, httplib::Response& res) {
        res.set_content(impl_->featuremodel, kJson);
    });

    http.Post("/api/v1/validate", [&model](const httplib::Request& req, httplib::Response& res) {
        try {
            const auto config = manifest::parse_configuration_document(req.body);
            for (const auto& id : config.selected) model.index_of(id);
            const auto state = extfm::propagate(model, config);
            ordered_json out;
            out["features"] = ordered_json::array();
            for (const auto& [id, fs] : state.features) {
                ordered_json f;
                f["id"] = id;
                f["status"] = std::string(extfm::to_string(fs.status));
                f["reason"] = fs.reason;
                out["features"].push_back(f);
            }
            std::vector<std::string> violations;
            for (const auto& v : extfm::validate_configuration(model, extfm::close_selection(model, config))) {
                violations.push_back(v.reason);
            }
            out["valid"] = violations.empty();
            out["violations"] = violations;
            send_json(res, 200, out);
        } catch (const std::exception& e) {
            send_exception(res, e);
        }
    });

    http.Post("/api/v1/recommend", [](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> answers;
        try {
            const json body = json::parse(req.body);
            if (!body.is_object() || !body.contains("answers") || !body["answers"].is_object()) {
                return send_error(res, 400, "expected {\"answers\": {question: option}}");
            }
            for (const auto& [k, v] : body["answers"].items()) {
                if (!v.is_string()) return send_error(res, 400, "answer to '" + k + "' must be a string");
                answers[k] = v.get<std::string>();
            }
        } catch (const json::exception& e) {
            return send_error(res, 400, std::string("malformed body: ") + e.what());
        }
        try {
            ordered_json out;
            out["metrics"] = ordered_json::array();
            for (auto m : metrics::recommend_metrics(answers)) out["metrics"].push_back(std::string(metrics::to_string(m)));
            send_json(res, 200, out);
        } catch (const std::exception& e) {
            send_exception(res, e);
        }
    });

    http.Post("/api/v1/manifest", [&model](const httplib::Request& req, httplib::Response& res) {
        try {
            const auto config = manifest::parse_configuration_document(req.body);
            res.set_content(manifest::generate_manifest(model, config), "application/yaml");
        } catch (const std::exception& e) {
            send_exception(res, e);
        }
    });

    http.Post("/api/v1/experiments", [this](const httplib::Request& req, httplib::Response& res) {
        if (!req.is_multipart_form_data() || !req.has_file("manifest") || !req.has_file("dataset")) {
            return send_error(res, 400, "expected multipart fields 'manifest' and 'dataset'");
        }
        const std::string manifest_text = req.get_file_value("manifest").content;
        const std::string dataset_text = req.get_file_value("dataset").content;
        manifest::ParsedManifest pm;
        try {
            pm = manifest::load_manifest(manifest_text);
        } catch (const std::exception& e) {
            return send_exception(res, e);
        }
        try {
            manifest::load_dataset(pm, dataset_text);
        } catch (const ParseError& e) {
            return send_error(res, 400, e.what());
        } catch (const std::exception& e) {
            return send_error(res, 422, e.what());
        }
        if (config_.retention.count() > 0) store_->prune(config_.retention);
        const std::string id = store_->create(manifest_text, dataset_text);
        runner_->submit(id);
        ordered_json out;
        out["task_id"] = id;
        if (!pm.warnings.empty()) out["warnings"] = pm.warnings;
        send_json(res, 202, out);
    });

    http.Get(R"(/api/v1/experiments/([0-9a-fA-F]+)/status)", [this](const httplib::Request& req, httplib::Response& res) {
        const auto job = store_->get(req.matches[1]);
        if (!job) return send_error(res, 404, "unknown experiment");
        send_json(res, 200, job_status(*job));
    });

    http.Get(R"(/api/v1/experiments/([0-9a-fA-F]+)/result)", [this](const httplib::Request& req, httplib::Response& res) {
        const auto job = store_->get(req.matches[1]);
        if (!job) return send_error(res, 404, "unknown experiment");
        if (job->state == JobState::failed) return send_json(res, 200, job_status(*job));
        if (job->state != JobState::done) return send_error(res, 409, "experiment is " + std::string(to_string(job->state)));
        ordered_json out;
        out["state"] = "done";
        out["best"] = job->best;
        out["report"] = ordered_json::parse(store_->read_file(job->id, "result.json"));
        send_json(res, 200, out);
    });

    const auto artifact = [this](const char* file, const char* type) {
        return [this, file, type](const httplib::Request& req, httplib::Response& res) {
            const auto job = store_->get(req.matches[1]);
            if (!job) return send_error(res, 404, "unknown experiment");
            if (job->state == JobState::failed) return send_error(res, 409, "experiment failed: " + job->message);
            if (job->state != JobState::done) {
                return send_error(res, 409, "experiment is " + std::string(to_string(job->state)));
            }
            res.set_content(store_->read_file(job->id, file), type);
        };
    };
    http.Get(R"(/api/v1/experiments/([0-9a-fA-F]+)/report\.csv)", artifact("report.csv", "text/csv"));
    http.Get(R"(/api/v1/experiments/([0-9a-fA-F]+)/model)", artifact("model.fbm", "application/octet-stream"));
}

Server::~Server() { stop(); }

int Server::start() {
    auto& http = impl_->http;
    if (config_.port == 0) {
        port_ = http.bind_to_any_port(config_.host);
    } else {
        port_ = http.bind_to_port(config_.host, config_.port) ? config_.port : -1;
    }
    if (port_ < 0) throw Error("cannot listen on " + config_.host + ":" + std::to_string(config_.port));
    thread_ = std::thread([&http] { http.listen_after_bind(); });
    http.wait_until_ready();
    return port_;
}

void Server::run() {
    start();
    if (thread_.joinable()) thread_.join();
}

void Server::stop() {
    if (impl_) impl_->http.stop();
    if (thread_.joinable()) thread_.join();
    if (runner_) runner_->stop();
}

}  // namespace fairbench::server
