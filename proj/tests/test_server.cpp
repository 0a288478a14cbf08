#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <filesystem>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fairbench/data.hpp"
#include "fairbench/extfm.hpp"
#include "fairbench/manifest.hpp"
#include "fairbench/server.hpp"

using namespace fairbench;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("fairbench-test-" + name + "-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    return dir;
}

server::ServerConfig config_for(const fs::path& dir) {
    server::ServerConfig c;
    c.port = 0;
    c.workers = 1;
    c.data_dir = dir;
    c.upload_limit = 1 << 20;
    return c;
}

std::string manifest_text() {
    const auto model = extfm::load_feature_model();
    auto c = manifest::parse_configuration_document(R"({
      "selected": ["standard_scaler", "logistic_regression", "no_method", "reweighing",
                   "statistical_parity", "accuracy", "mean", "k_fold"],
      "attributes": {"experiment": {"seed": 3}, "dataset": {"label_name": "label"},
                     "classification": {"positive_value": "good", "sensitive_features": "sex=M"},
                     "k_fold": {"k": 3}}
    })");
    return manifest::generate_manifest(model, c, {"2026-01-02T03:04:05Z"});
}

std::string dataset_text() { return data::to_csv(data::make_synthetic_biased({120, 2, 1.0})); }

httplib::Result submit(httplib::Client& cli, const std::string& manifest, const std::string& dataset) {
    httplib::MultipartFormDataItems items{{"manifest", manifest, "m.yaml", "application/yaml"},
                                          {"dataset", dataset, "d.csv", "text/csv"}};
    return cli.Post("/api/v1/experiments", items);
}

json wait_terminal(httplib::Client& cli, const std::string& id) {
    for (int i = 0; i < 600; ++i) {
        auto r = cli.Get("/api/v1/experiments/" + id + "/status");
        REQUIRE(r);
        const auto j = json::parse(r->body);
        if (j["state"] == "done" || j["state"] == "failed") return j;
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    FAIL("job did not finish");
    return {};
}

}  // namespace

TEST_CASE("feature model, validation and manifest endpoints") {
    const auto dir = fresh_dir("fm");
    server::Server srv(config_for(dir));
    httplib::Client cli("127.0.0.1", srv.start());

    auto r1 = cli.Get("/api/v1/featuremodel");
    auto r2 = cli.Get("/api/v1/featuremodel");
    REQUIRE(r1);
    CHECK(r1->status == 200);
    CHECK(r1->body == r2->body);
    const auto fm = json::parse(r1->body);
    CHECK(fm.contains("questionnaire"));
    CHECK(r1->body.find("Regression task is not compatible with fairness methods") != std::string::npos);
    CHECK(r1->body.find("Not compatible with MLP Classifier or MLP Regressor") != std::string::npos);

    auto v = cli.Post("/api/v1/validate", R"({"selected": ["reweighing", "mlp_classifier"]})", "application/json");
    REQUIRE(v);
    CHECK(v->status == 200);
    const auto vj = json::parse(v->body);
    CHECK(vj["valid"] == false);
    bool found = false;
    for (const auto& m : vj["violations"]) found = found || m == "Not compatible with MLP Classifier or MLP Regressor";
    CHECK(found);

    auto empty = cli.Post("/api/v1/validate", R"({"selected": []})", "application/json");
    REQUIRE(empty);
    CHECK(empty->status == 200);
    std::size_t states = 0;
    const auto empty_doc = json::parse(empty->body);
    for (const auto& f : empty_doc["features"]) {
        CHECK((f["status"] == "free" || f["status"] == "implied"));
        ++states;
    }
    CHECK(states == extfm::load_feature_model().size());

    auto unknown = cli.Post("/api/v1/validate", R"({"selected": ["quantum_forest"]})", "application/json");
    CHECK(unknown->status == 422);
    CHECK(json::parse(unknown->body)["error"].get<std::string>().find("quantum_forest") != std::string::npos);
    CHECK(cli.Post("/api/v1/validate", "{", "application/json")->status == 400);

    auto man = cli.Post("/api/v1/manifest",
                        R"({"selected": ["linear_regression", "reweighing", "mean_absolute_error", "mean", "holdout"],
                            "attributes": {"dataset": {"label_name": "y"}}})",
                        "application/json");
    CHECK(man->status == 422);
    CHECK(man->body.find("Regression task is not compatible with fairness methods") != std::string::npos);

    auto rec = cli.Post("/api/v1/recommend", R"({"answers": {"fairness_goal": "equal_outcomes"}})", "application/json");
    CHECK(rec->status == 200);
    CHECK(json::parse(rec->body)["metrics"].is_array());
    srv.stop();
    fs::remove_all(dir);
}

TEST_CASE("experiment lifecycle and error codes") {
    const auto dir = fresh_dir("life");
    server::Server srv(config_for(dir));
    httplib::Client cli("127.0.0.1", srv.start());

    auto mlp = manifest_text();
    mlp.replace(mlp.find("logistic_regression]"), 20, "logistic_regression, mlp_classifier]");
    auto bad = submit(cli, mlp, dataset_text());
    REQUIRE(bad);
    CHECK(bad->status == 422);
    CHECK(bad->body.find("Not compatible with MLP Classifier or MLP Regressor") != std::string::npos);
    CHECK(submit(cli, "format_version: [", dataset_text())->status == 400);
    CHECK(submit(cli, manifest_text(), "a,b\n1,2\n")->status == 422);
    CHECK(cli.Post("/api/v1/experiments", "{}", "application/json")->status == 400);

    auto ok = submit(cli, manifest_text(), dataset_text());
    REQUIRE(ok);
    REQUIRE(ok->status == 202);
    const std::string id = json::parse(ok->body)["task_id"];
    CHECK(id.size() == 32);

    const auto st = wait_terminal(cli, id);
    CHECK(st["state"] == "done");
    CHECK(st["percentage"] == 100.0);
    auto res = cli.Get("/api/v1/experiments/" + id + "/result");
    CHECK(res->status == 200);
    CHECK(json::parse(res->body)["best"].get<std::string>().find('/') != std::string::npos);
    auto csv = cli.Get("/api/v1/experiments/" + id + "/report.csv");
    CHECK(csv->status == 200);
    CHECK(csv->body.rfind("scaler,model,method,", 0) == 0);
    auto model = cli.Get("/api/v1/experiments/" + id + "/model");
    CHECK(model->status == 200);
    CHECK(model->body.rfind("FBM1 1", 0) == 0);

    // Same inputs, same bytes as the library path.
    const auto local = manifest::run_manifest(manifest_text(), dataset_text());
    CHECK(local.report_csv == csv->body);
    CHECK(local.model_bytes == model->body);

    CHECK(cli.Get("/api/v1/experiments/00000000000000000000000000000000/status")->status == 404);
    CHECK(cli.Get("/api/v1/experiments/00000000000000000000000000000000/model")->status == 404);
    CHECK(srv.executions() == 1);
    srv.stop();
    fs::remove_all(dir);
}

TEST_CASE("oversized uploads are rejected with 413") {
    const auto dir = fresh_dir("big");
    server::Server srv(config_for(dir));
    const int port = srv.start();

    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    REQUIRE(fd >= 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
    REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
    const std::string req =
        "POST /api/v1/experiments HTTP/1.1\r\nHost: x\r\nContent-Type: multipart/form-data; boundary=b\r\n"
        "Content-Length: 2147483648\r\n\r\n";
    const std::string head = req + std::string(4096, 'x');
    REQUIRE(::send(fd, head.data(), head.size(), 0) == static_cast<ssize_t>(head.size()));
    timeval tv{5, 0};
    ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
    std::string reply;
    char buf[512];
    for (ssize_t n; reply.find("\r\n\r\n") == std::string::npos && (n = ::recv(fd, buf, sizeof buf, 0)) > 0;) {
        reply.append(buf, static_cast<std::size_t>(n));
    }
    ::close(fd);
    CHECK(reply.rfind("HTTP/1.1 413", 0) == 0);
    srv.stop();
    fs::remove_all(dir);
}

TEST_CASE("failed jobs and conflicts") {
    const auto dir = fresh_dir("fail");
    {
        server::JobStore store(dir);
        const auto id = store.create("not: a manifest", "x\n");
        CHECK(store.get(id)->state == server::JobState::queued);
        // A store record left running by a crashed process.
        const auto crashed = store.create(manifest_text(), dataset_text());
        CHECK(store.try_start(crashed));
        CHECK_FALSE(store.try_start(crashed));
        store.set_progress(crashed, 40);
        store.set_progress(crashed, 30);
        CHECK(store.get(crashed)->percentage == 40);
    }
    server::Server srv(config_for(dir));
    httplib::Client cli("127.0.0.1", srv.start());
    const auto jobs = srv.store().list();
    REQUIRE(jobs.size() == 2);
    const auto& queued = jobs[0];
    const auto& crashed = jobs[1];
    CHECK(crashed.state == server::JobState::failed);
    CHECK(crashed.message == "interrupted");

    const auto st = wait_terminal(cli, queued.id);
    CHECK(st["state"] == "failed");
    CHECK_FALSE(st["message"].get<std::string>().empty());
    auto res = cli.Get("/api/v1/experiments/" + queued.id + "/result");
    CHECK(res->status == 200);
    CHECK(json::parse(res->body)["state"] == "failed");
    CHECK(cli.Get("/api/v1/experiments/" + queued.id + "/model")->status == 409);
    CHECK(cli.Get("/api/v1/experiments/" + crashed.id + "/report.csv")->status == 409);

    // A job claimed directly through the store stays running: the runner never sees it.
    const auto held = srv.store().create(manifest_text(), dataset_text());
    CHECK(cli.Get("/api/v1/experiments/" + held + "/result")->status == 409);
    REQUIRE(srv.store().try_start(held));
    srv.store().set_progress(held, 37.5);
    const auto mid = json::parse(cli.Get("/api/v1/experiments/" + held + "/status")->body);
    CHECK(mid["state"] == "running");
    CHECK(mid["percentage"] == 37.5);
    CHECK(cli.Get("/api/v1/experiments/" + held + "/result")->status == 409);
    CHECK(cli.Get("/api/v1/experiments/" + held + "/model")->status == 409);
    srv.store().set_failed(held, "stopped by test");
    srv.stop();
    fs::remove_all(dir);
}

TEST_CASE("finished jobs survive a restart") {
    const auto dir = fresh_dir("restart");
    std::string id, body;
    {
        server::Server srv(config_for(dir));
        httplib::Client cli("127.0.0.1", srv.start());
        id = json::parse(submit(cli, manifest_text(), dataset_text())->body)["task_id"];
        CHECK(wait_terminal(cli, id)["state"] == "done");
        body = cli.Get("/api/v1/experiments/" + id + "/report.csv")->body;
        srv.stop();
    }
    server::Server srv(config_for(dir));
    httplib::Client cli("127.0.0.1", srv.start());
    auto st = cli.Get("/api/v1/experiments/" + id + "/status");
    CHECK(json::parse(st->body)["state"] == "done");
    CHECK(cli.Get("/api/v1/experiments/" + id + "/report.csv")->body == body);
    CHECK(srv.executions() == 0);
    srv.stop();
    fs::remove_all(dir);
}

TEST_CASE("retention prunes old finished jobs") {
    const auto dir = fresh_dir("prune");
    server::JobStore store(dir);
    const auto id = store.create("m", "d");
    store.set_failed(id, "boom");
    CHECK(store.prune(std::chrono::seconds(3600)) == 0);
    CHECK(store.prune(std::chrono::seconds(0)) == 1);
    CHECK_FALSE(store.get(id));
    CHECK_FALSE(fs::exists(store.job_dir(id)));
    fs::remove_all(dir);
}

TEST_CASE("environment configuration") {
    ::setenv("FAIRBENCH_PORT", "9123", 1);
    ::setenv("FAIRBENCH_CORS", "1", 1);
    const auto c = server::config_from_env({});
    CHECK(c.port == 9123);
    CHECK(c.cors);
    ::setenv("FAIRBENCH_WORKERS", "-2", 1);
    CHECK_THROWS(server::config_from_env({}));
    ::unsetenv("FAIRBENCH_PORT");
    ::unsetenv("FAIRBENCH_CORS");
    ::unsetenv("FAIRBENCH_WORKERS");
}
