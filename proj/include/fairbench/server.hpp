#pragma once

// REST facade under /api/v1 with asynchronous experiment jobs. Jobs live in a
// file-backed store under <data_dir>/jobs/<id>/ and are executed FIFO by an
// in-process worker pool.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace fairbench::server {

enum class JobState { queued, running, done, failed };

std::string_view to_string(JobState s) noexcept;

struct Job {
    std::string id;
    std::uint64_t sequence = 0;  ///< submission order
    JobState state = JobState::queued;
    double percentage = 0.0;
    std::string message;  ///< failure message
    std::string best;
    std::string created;
    std::string started;
    std::string finished;
    std::int64_t finished_epoch = 0;  ///< seconds, for retention
};

struct ServerConfig {
    std::string host = "127.0.0.1";
    int port = 8080;  ///< 0 picks a free port
    std::size_t workers = 2;
    std::size_t engine_threads = 1;
    std::filesystem::path data_dir = "fairbench-data";
    std::size_t upload_limit = 10 * 1024 * 1024;  ///< bytes per request body
    std::chrono::seconds retention{0};             ///< 0 keeps finished jobs forever
    bool cors = false;
};

/// Overrides fields from FAIRBENCH_HOST, FAIRBENCH_PORT, FAIRBENCH_WORKERS,
/// FAIRBENCH_ENGINE_THREADS, FAIRBENCH_DATA_DIR, FAIRBENCH_UPLOAD_LIMIT,
/// FAIRBENCH_RETENTION (seconds) and FAIRBENCH_CORS (0/1).
ServerConfig config_from_env(ServerConfig base);

/// Durable job records. Safe for concurrent use.
class JobStore {
public:
    /// Loads existing jobs. Jobs found running are marked failed("interrupted").
    explicit JobStore(std::filesystem::path data_dir);

    /// Queued jobs found on disk at load time, in submission order.
    std::vector<std::string> recovered_queue() const;

    std::string create(std::string_view manifest, std::string_view dataset);
    std::optional<Job> get(const std::string& id) const;
    std::vector<Job> list() const;

    /// queued -> running; false when the job is not queued (claimed already).
    bool try_start(const std::string& id);
    /// Ignored unless running; percentages never decrease.
    void set_progress(const std::string& id, double percentage);
    void set_done(const std::string& id, const std::string& best, const std::map<std::string, std::string>& artifacts);
    void set_failed(const std::string& id, const std::string& message);

    std::string read_file(const std::string& id, const std::string& name) const;
    std::filesystem::path job_dir(const std::string& id) const;

    /// Removes finished jobs whose finish time is older than `age`.
    std::size_t prune(std::chrono::seconds age);

private:
    void persist(const Job& job) const;

    std::filesystem::path root_;
    mutable std::mutex mutex_;
    std::map<std::string, Job> jobs_;
    std::vector<std::string> recovered_;
    std::uint64_t next_sequence_ = 1;
};

/// FIFO queue plus worker threads that execute jobs from a store.
class JobRunner {
public:
    JobRunner(JobStore& store, std::size_t workers, std::size_t engine_threads);
    ~JobRunner();

    JobRunner(const JobRunner&) = delete;
    JobRunner& operator=(const JobRunner&) = delete;

    void submit(const std::string& id);
    /// Finishes the jobs already running, then joins the workers.
    void stop();
    /// Number of engine executions started (for at-most-once checks).
    std::size_t executions() const noexcept { return executions_.load(); }

private:
    void worker_loop();
    void run_job(const std::string& id);

    JobStore& store_;
    std::size_t engine_threads_;
    std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<std::string> queue_;
    bool stopping_ = false;
    std::vector<std::thread> workers_;
    std::atomic<std::size_t> executions_{0};
};

class Server {
public:
    explicit Server(ServerConfig config);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and serves on a background thread; returns the bound port.
    int start();
    /// Serves on the calling thread until stop().
    void run();
    void stop();

    int port() const noexcept { return port_; }
    JobStore& store() noexcept { return *store_; }
    std::size_t executions() const noexcept { return runner_->executions(); }

private:
    struct Impl;
    ServerConfig config_;
    std::unique_ptr<JobStore> store_;
    std::unique_ptr<JobRunner> runner_;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace fairbench::server
