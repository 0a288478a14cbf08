// fairbench command-line front end.
//
// Exit codes: 0 success, 1 usage, 2 validation failure (manifest or
// configuration), 3 execution failure (dataset or engine).

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "fairbench/error.hpp"
#include "fairbench/manifest.hpp"
#include "fairbench/server.hpp"

namespace fs = std::filesystem;
using namespace fairbench;

namespace {

enum Exit { ok = 0, usage = 1, validation = 2, execution = 3 };

// Thrown for failures that should exit with a specific code.
struct Failure {
    int code;
    std::string message;
};

std::string read_file(const std::string& path, int code) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{code, "cannot read " + path};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Failure{execution, "cannot write " + path.string()};
}

void print_violations(const ConstraintError& e) {
    for (const auto& v : e.violations()) std::cerr << "constraint violation: " << v << "\n";
}

manifest::ParsedManifest load_or_fail(const std::string& path, std::optional<std::uint64_t> seed) {
    const std::string text = read_file(path, validation);
    try {
        auto pm = manifest::load_manifest(text, seed);
        for (const auto& w : pm.warnings) std::cerr << "warning: " << w << "\n";
        return pm;
    } catch (const ConstraintError& e) {
        print_violations(e);
        throw Failure{validation, "manifest rejected"};
    } catch (const Error& e) {
        throw Failure{validation, e.what()};
    }
}

int cmd_run(const std::string& manifest_path, const std::string& dataset_path, const std::string& outdir,
            std::optional<std::uint64_t> seed, std::size_t threads, bool quiet) {
    const auto pm = load_or_fail(manifest_path, seed);
    const std::string csv = read_file(dataset_path, execution);
    manifest::RunArtifacts art;
    try {
        const auto bound = manifest::load_dataset(pm, csv);
        bench::RunOptions options;
        options.threads = threads;
        if (!quiet) {
            options.progress = [](double pct, std::size_t done, std::size_t total) {
                std::cerr << "\r" << done << "/" << total << " units (" << static_cast<int>(pct) << "%)" << std::flush;
                if (done == total) std::cerr << "\n";
            };
        }
        art = manifest::execute(pm, bound, options);
    } catch (const Error& e) {
        throw Failure{execution, e.what()};
    }
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw Failure{execution, "cannot create " + outdir + ": " + ec.message()};
    write_file(fs::path(outdir) / "report.csv", art.report_csv);
    write_file(fs::path(outdir) / "model.fbm", art.model_bytes);
    for (const auto& f : art.report.flags) std::cerr << "note: " << f << "\n";
    std::cout << art.best << "\n";
    return ok;
}

int cmd_validate(const std::string& manifest_path) {
    const auto pm = load_or_fail(manifest_path, std::nullopt);
    std::cout << "valid: " << bench::plan(pm.spec).size() << " combinations\n";
    return ok;
}

int cmd_generate(const std::string& config_path, const std::string& out_path, bool emit_script) {
    const std::string text = read_file(config_path, validation);
    std::string yaml;
    try {
        const auto model = extfm::load_feature_model();
        yaml = manifest::generate_manifest(model, manifest::parse_configuration_document(text));
    } catch (const ConstraintError& e) {
        print_violations(e);
        throw Failure{validation, "configuration rejected"};
    } catch (const Error& e) {
        throw Failure{validation, e.what()};
    }
    if (out_path == "-") {
        std::cout << yaml;
    } else {
        write_file(out_path, yaml);
    }
    if (emit_script) {
        if (out_path == "-") throw Failure{usage, "--emit-script needs -o <file>"};
        const fs::path script = fs::path(out_path).replace_extension(".sh");
        write_file(script, manifest::shell_wrapper(fs::path(out_path).filename().string()));
        fs::permissions(script, fs::perms::owner_exec | fs::perms::group_exec | fs::perms::others_exec,
                        fs::perm_options::add);
    }
    return ok;
}

int cmd_compare(const std::string& a, const std::string& b) {
    try {
        std::cout << manifest::format_comparison(
            manifest::compare_reports(read_file(a, usage), read_file(b, usage)));
    } catch (const Error& e) {
        throw Failure{validation, e.what()};
    }
    return ok;
}

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

int cmd_serve(const server::ServerConfig& config) {
    server::Server srv(std::move(config));
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    const int port = srv.start();
    std::cerr << "listening on " << config.host << ":" << port << "\n";
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(200));
    srv.stop();
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fairbench: fairness benchmarking workbench"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(manifest::kToolVersion));

    std::string manifest_path, dataset_path, outdir = "out", config_path, out_path = "-", report_a, report_b;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 1;
    bool quiet = false, emit_script = false;

    auto* run = app.add_subcommand("run", "Benchmark every combination in a manifest");
    run->add_option("-m,--manifest", manifest_path, "Experiment manifest")->required();
    run->add_option("-d,--dataset", dataset_path, "Dataset CSV")->required();
    run->add_option("-o,--out", outdir, "Output directory");
    run->add_option("--seed", seed, "Override the manifest seed");
    run->add_option("--threads", threads, "Engine worker threads")->check(CLI::PositiveNumber);
    run->add_flag("-q,--quiet", quiet, "No progress output");

    auto* validate = app.add_subcommand("validate", "Check a manifest against the feature model");
    validate->add_option("-m,--manifest", manifest_path, "Experiment manifest")->required();

    auto* generate = app.add_subcommand("generate", "Write a manifest from a configuration document");
    generate->add_option("-c,--config", config_path, "Configuration document (JSON)")->required();
    generate->add_option("-o,--out", out_path, "Manifest path, - for stdout");
    generate->add_flag("--emit-script", emit_script, "Also write a shell wrapper next to the manifest");

    auto* compare = app.add_subcommand("compare", "Kruskal-Wallis comparison of two reports");
    compare->add_option("-a", report_a, "First report.csv")->required();
    compare->add_option("-b", report_b, "Second report.csv")->required();

    server::ServerConfig sc;
    std::string data_dir;
    std::size_t retention = 0;
    auto* serve = app.add_subcommand("serve", "Start the REST server (flags override FAIRBENCH_* variables)");
    serve->add_option("--host", sc.host, "Listen address");
    serve->add_option("--port", sc.port, "Listen port, 0 for any")->check(CLI::Range(0, 65535));
    serve->add_option("--workers", sc.workers, "Concurrent jobs")->check(CLI::PositiveNumber);
    serve->add_option("--engine-threads", sc.engine_threads, "Threads per job")->check(CLI::PositiveNumber);
    serve->add_option("--data-dir", data_dir, "Job storage directory");
    serve->add_option("--upload-limit", sc.upload_limit, "Maximum request body in bytes");
    serve->add_option("--retention", retention, "Prune finished jobs older than this many seconds (0 keeps)");
    serve->add_flag("--cors", sc.cors, "Allow cross-origin requests");

    auto* featuremodel = app.add_subcommand("featuremodel", "Print the built-in feature model document");

    std::size_t synth_rows = 200;
    std::uint64_t synth_seed = 0;
    double synth_bias = 1.0;
    auto* synth = app.add_subcommand("synth", "Print a synthetic biased dataset");
    synth->add_option("--rows", synth_rows, "Rows")->check(CLI::Range(2, 10000000));
    synth->add_option("--seed", synth_seed, "Seed");
    synth->add_option("--bias", synth_bias, "Log-odds shift between sexes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : usage;
    }

    try {
        if (*run) return cmd_run(manifest_path, dataset_path, outdir, seed, threads, quiet);
        if (*validate) return cmd_validate(manifest_path);
        if (*generate) return cmd_generate(config_path, out_path, emit_script);
        if (*compare) return cmd_compare(report_a, report_b);
        if (*serve) {
            // Flags given on the command line win over the environment.
            server::ServerConfig defaults;
            server::ServerConfig cfg = server::config_from_env(defaults);
            if (serve->count("--host")) cfg.host = sc.host;
            if (serve->count("--port")) cfg.port = sc.port;
            if (serve->count("--workers")) cfg.workers = sc.workers;
            if (serve->count("--engine-threads")) cfg.engine_threads = sc.engine_threads;
            if (serve->count("--data-dir")) cfg.data_dir = data_dir;
            if (serve->count("--upload-limit")) cfg.upload_limit = sc.upload_limit;
            if (serve->count("--retention")) cfg.retention = std::chrono::seconds(retention);
            if (serve->count("--cors")) cfg.cors = true;
            return cmd_serve(cfg);
        }
        if (*featuremodel) {
            std::cout << extfm::to_document(extfm::load_feature_model());
            return ok;
        }
        if (*synth) {
            std::cout << data::to_csv(data::make_synthetic_biased({synth_rows, synth_seed, synth_bias}));
            return ok;
        }
    } catch (const Failure& f) {
        if (!f.message.empty()) std::cerr << "error: " << f.message << "\n";
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return execution;
    }
    return usage;
}
