#include <algorithm>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "fairbench/error.hpp"
#include "fairbench/manifest.hpp"
#include "fairbench/rng.hpp"
#include "fairbench/server.hpp"

namespace fairbench::server {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::int64_t epoch_now() { return static_cast<std::int64_t>(std::time(nullptr)); }

std::string new_id() {
    static std::mutex m;
    static std::uint64_t counter = 0;
    static const std::uint64_t salt = [] {
        std::random_device rd;
        return (static_cast<std::uint64_t>(rd()) << 32) ^ rd() ^
               static_cast<std::uint64_t>(std::chrono::steady_clock::now().time_since_epoch().count());
    }();
    std::lock_guard<std::mutex> lock(m);
    ++counter;
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(mix_seed(salt ^ counter)),
                  static_cast<unsigned long long>(mix_seed(mix_seed(salt) + counter)));
    return buf;
}

// Write to a temporary sibling, then rename over the target.
void write_atomic(const fs::path& path, std::string_view content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_all(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::optional<JobState> parse_state(const std::string& s) {
    for (auto st : {JobState::queued, JobState::running, JobState::done, JobState::failed}) {
        if (to_string(st) == s) return st;
    }
    return std::nullopt;
}

bool valid_id(const std::string& id) {
    return !id.empty() && id.size() <= 64 &&
           std::all_of(id.begin(), id.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
}

}  // namespace

std::string_view to_string(JobState s) noexcept {
    switch (s) {
        case JobState::queued: return "queued";
        case JobState::running: return "running";
        case JobState::done: return "done";
        case JobState::failed: return "failed";
    }
    return "";
}

JobStore::JobStore(fs::path data_dir) : root_(std::move(data_dir) / "jobs") {
    fs::create_directories(root_);
    std::vector<Job> queued;
    for (const auto& entry : fs::directory_iterator(root_)) {
        if (!entry.is_directory()) continue;
        const fs::path file = entry.path() / "job.json";
        if (!fs::exists(file)) continue;
        Job job;
        try {
            const json j = json::parse(read_all(file));
            job.id = j.at("id").get<std::string>();
            job.sequence = j.at("sequence").get<std::uint64_t>();
            job.state = parse_state(j.at("state").get<std::string>()).value_or(JobState::failed);
            job.percentage = j.value("percentage", 0.0);
            job.message = j.value("message", "");
            job.best = j.value("best", "");
            job.created = j.value("created", "");
            job.started = j.value("started", "");
            job.finished = j.value("finished", "");
            job.finished_epoch = j.value("finished_epoch", std::int64_t{0});
        } catch (const std::exception&) {
            continue;  // unreadable record: leave it on disk, do not serve it
        }
        if (job.id != entry.path().filename().string()) continue;
        if (job.state == JobState::running) {
            job.state = JobState::failed;
            job.message = "interrupted";
            job.finished = utc_now();
            job.finished_epoch = epoch_now();
            persist(job);
        }
        if (job.state == JobState::queued) queued.push_back(job);
        next_sequence_ = std::max(next_sequence_, job.sequence + 1);
        jobs_[job.id] = job;
    }
    std::sort(queued.begin(), queued.end(), [](const Job& a, const Job& b) { return a.sequence < b.sequence; });
    for (const auto& j : queued) recovered_.push_back(j.id);
}

std::vector<std::string> JobStore::recovered_queue() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return recovered_;
}

void JobStore::persist(const Job& job) const {
    json j;
    j["id"] = job.id;
    j["sequence"] = job.sequence;
    j["state"] = std::string(to_string(job.state));
    j["percentage"] = job.percentage;
    j["message"] = job.message;
    j["best"] = job.best;
    j["created"] = job.created;
    j["started"] = job.started;
    j["finished"] = job.finished;
    j["finished_epoch"] = job.finished_epoch;
    write_atomic(root_ / job.id / "job.json", j.dump(2) + "\n");
}

std::string JobStore::create(std::string_view manifest, std::string_view dataset) {
    Job job;
    job.id = new_id();
    job.created = utc_now();
    const fs::path dir = root_ / job.id;
    fs::create_directories(dir);
    write_atomic(dir / "manifest.yaml", manifest);
    write_atomic(dir / "dataset.csv", dataset);
    std::lock_guard<std::mutex> lock(mutex_);
    job.sequence = next_sequence_++;
    persist(job);
    jobs_[job.id] = job;
    return job.id;
}

std::optional<Job> JobStore::get(const std::string& id) const {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = jobs_.find(id); it != jobs_.end()) return it->second;
    return std::nullopt;
}

std::vector<Job> JobStore::list() const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<Job> out;
    for (const auto& [_, j] : jobs_) out.push_back(j);
    std::sort(out.begin(), out.end(), [](const Job& a, const Job& b) { return a.sequence < b.sequence; });
    return out;
}

bool JobStore::try_start(const std::string& id) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = jobs_.find(id);
    if (it == jobs_.end() || it->second.state != JobState::queued) return false;
    it->second.state = JobState::running;
    it->second.percentage = 0.0;
    it->second.started = utc_now();
    persist(it->second);
    return true;
}

void JobStore::set_progress(const std::string& id, double percentage) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = jobs_.find(id);
    if (it == jobs_.end() || it->second.state != JobState::running) return;
    if (percentage <= it->second.percentage) return;
    it->second.percentage = percentage;
    persist(it->second);
}

void JobStore::set_done(const std::string& id, const std::string& best,
                        const std::map<std::string, std::string>& artifacts) {
    const fs::path dir = root_ / id;
    for (const auto& [name, content] : artifacts) write_atomic(dir / name, content);
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = jobs_.find(id);
    if (it == jobs_.end() || it->second.state != JobState::running) return;
    it->second.state = JobState::done;
    it->second.percentage = 100.0;
    it->second.best = best;
    it->second.finished = utc_now();
    it->second.finished_epoch = epoch_now();
    persist(it->second);
}

void JobStore::set_failed(const std::string& id, const std::string& message) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = jobs_.find(id);
    if (it == jobs_.end() || it->second.state == JobState::done || it->second.state == JobState::failed) return;
    it->second.state = JobState::failed;
    it->second.message = message;
    it->second.finished = utc_now();
    it->second.finished_epoch = epoch_now();
    persist(it->second);
}

std::string JobStore::read_file(const std::string& id, const std::string& name) const {
    if (!valid_id(id)) throw InvalidArgument("malformed job id");
    return read_all(root_ / id / name);
}

fs::path JobStore::job_dir(const std::string& id) const { return root_ / id; }

std::size_t JobStore::prune(std::chrono::seconds age) {
    const std::int64_t cutoff = epoch_now() - static_cast<std::int64_t>(age.count());
    std::vector<std::string> doomed;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        for (auto it = jobs_.begin(); it != jobs_.end();) {
            const Job& j = it->second;
            const bool finished = j.state == JobState::done || j.state == JobState::failed;
            if (finished && j.finished_epoch <= cutoff) {
                doomed.push_back(j.id);
                it = jobs_.erase(it);
            } else {
                ++it;
            }
        }
    }
    for (const auto& id : doomed) {
        std::error_code ec;
        fs::remove_all(root_ / id, ec);
    }
    return doomed.size();
}

JobRunner::JobRunner(JobStore& store, std::size_t workers, std::size_t engine_threads)
    : store_(store), engine_threads_(std::max<std::size_t>(1, engine_threads)) {
    for (std::size_t i = 0; i < std::max<std::size_t>(1, workers); ++i) {
        workers_.emplace_back([this] { worker_loop(); });
    }
}

JobRunner::~JobRunner() { stop(); }

void JobRunner::submit(const std::string& id) {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        queue_.push_back(id);
    }
    cv_.notify_one();
}

void JobRunner::stop() {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        if (stopping_ && workers_.empty()) return;
        stopping_ = true;
    }
    cv_.notify_all();
    for (auto& t : workers_) {
        if (t.joinable()) t.join();
    }
    workers_.clear();
}

void JobRunner::worker_loop() {
    while (true) {
        std::string id;
        {
            std::unique_lock<std::mutex> lock(mutex_);
            cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
            if (stopping_) return;
            id = queue_.front();
            queue_.pop_front();
        }
        run_job(id);
    }
}

void JobRunner::run_job(const std::string& id) {
    if (!store_.try_start(id)) return;
    ++executions_;
    try {
        const std::string manifest_text = store_.read_file(id, "manifest.yaml");
        const std::string dataset_text = store_.read_file(id, "dataset.csv");
        bench::RunOptions options;
        options.threads = engine_threads_;
        // 100 is reserved for the done state; refitting the best model follows the last unit.
        options.progress = [&](double pct, std::size_t, std::size_t) { store_.set_progress(id, std::min(pct, 99.0)); };
        const auto artifacts = manifest::run_manifest(manifest_text, dataset_text, std::nullopt, options);
        store_.set_done(id, artifacts.best,
                        {{"report.csv", artifacts.report_csv},
                         {"result.json", artifacts.result_document},
                         {"model.fbm", artifacts.model_bytes}});
    } catch (const std::exception& e) {
        store_.set_failed(id, e.what());
    }
}

}  // namespace fairbench::server
