#include "fairbench/error.hpp"
#include "fairbench/manifest.hpp"

namespace fairbench::manifest {

ParsedManifest load_manifest(std::string_view manifest_text, std::optional<std::uint64_t> seed_override) {
    static const extfm::FeatureModel model = extfm::load_feature_model();
    ParsedManifest pm = parse_manifest(manifest_text, model);
    if (seed_override) {
        pm.config.attributes[{model.features()[model.root()].id, "seed"}] = std::to_string(*seed_override);
        pm.spec.seed = *seed_override;
        for (auto& l : pm.spec.learners) l.seed = *seed_override;
    }
    return pm;
}

data::BoundDataset load_dataset(const ParsedManifest& manifest, std::string_view csv_text) {
    return data::bind_schema(data::parse_csv(csv_text), manifest.spec.schema);
}

RunArtifacts execute(const ParsedManifest& manifest, const data::BoundDataset& bound, const bench::RunOptions& options) {
    RunArtifacts out;
    out.report = bench::run_experiment(manifest.spec, bound, options);
    const auto& best = out.report.rows.at(out.report.best).key;
    out.best = bench::to_string(best);
    out.report_csv = bench::report_csv(out.report);
    out.result_document = bench::report_document(out.report);
    out.model_bytes = bench::serialize_model(bench::finalize(manifest.spec, bound, best));
    return out;
}

RunArtifacts run_manifest(std::string_view manifest_text, std::string_view csv_text,
                          std::optional<std::uint64_t> seed_override, const bench::RunOptions& options) {
    const ParsedManifest pm = load_manifest(manifest_text, seed_override);
    const data::BoundDataset bound = load_dataset(pm, csv_text);
    return execute(pm, bound, options);
}

}  // namespace fairbench::manifest
