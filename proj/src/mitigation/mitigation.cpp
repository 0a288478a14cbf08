#include <cmath>

#include "fairbench/error.hpp"
#include "fairbench/mitigation.hpp"

namespace fairbench::mitigation {

std::string_view to_string(MitigationKind k) noexcept {
    switch (k) {
        case MitigationKind::none: return "none";
        case MitigationKind::reweighing: return "reweighing";
        case MitigationKind::dir: return "dir";
        case MitigationKind::demv: return "demv";
    }
    return "";
}

std::optional<MitigationKind> parse_mitigation_kind(std::string_view s) noexcept {
    for (auto k : {MitigationKind::none, MitigationKind::reweighing, MitigationKind::dir, MitigationKind::demv}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

void check_spec(const MitigationSpec& spec) {
    if (!(spec.repair_level >= 0.0 && spec.repair_level <= 1.0)) {
        throw InvalidArgument("repair level must be in [0, 1]");
    }
    if (!(spec.tolerance > 0.0) || !std::isfinite(spec.tolerance)) {
        throw InvalidArgument("DEMV tolerance must be positive");
    }
}

MitigationOutput apply(const MitigationSpec& spec, const data::BoundDataset& train, std::uint64_t seed) {
    check_spec(spec);
    MitigationOutput out;
    switch (spec.kind) {
        case MitigationKind::none:
            out.data = train;
            break;
        case MitigationKind::reweighing:
            out.data = train;
            out.weights = reweigh(train);
            break;
        case MitigationKind::dir: {
            auto r = dir_repair(train, spec.repair_level);
            if (r.passthrough) out.flags.push_back("dir: a group is empty in the training rows, data left unchanged");
            out.data = train.with_features(std::move(r.table));
            break;
        }
        case MitigationKind::demv: {
            auto r = demv_balance(train, spec.tolerance, spec.max_iterations, seed);
            out.iterations = r.iterations;
            out.converged = r.converged;
            if (!r.converged) out.flags.push_back("demv: did not converge");
            if (r.skipped_empty) out.flags.push_back("demv: skipped a removal that would empty a subgroup");
            out.data = std::move(r.data);
            break;
        }
    }
    return out;
}

}  // namespace fairbench::mitigation
