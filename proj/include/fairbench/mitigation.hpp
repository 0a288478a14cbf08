#pragma once

// Pre-processing bias mitigation. Every transform here is applied to
// training rows only; the bench engine never passes test rows in.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairbench/data.hpp"

namespace fairbench::mitigation {

enum class MitigationKind { none, reweighing, dir, demv };

/// "none", "reweighing", "dir", "demv".
std::string_view to_string(MitigationKind k) noexcept;
std::optional<MitigationKind> parse_mitigation_kind(std::string_view s) noexcept;

struct MitigationSpec {
    MitigationKind kind = MitigationKind::none;
    double repair_level = 1.0;         ///< dir
    double tolerance = 0.05;           ///< demv
    std::size_t max_iterations = 10000;  ///< demv
};

/// Throws InvalidArgument when the parameters are out of range.
void check_spec(const MitigationSpec& spec);

/// w_i = n_s * n_y / (n * n_sy) over the privileged mask and the binary label.
std::vector<double> reweigh(const data::BoundDataset& train);

struct DirResult {
    data::DataTable table;
    bool passthrough = false;  ///< a group was empty
};

/// Repairs every numeric, non-sensitive feature column toward the per-quantile
/// median of the two group-conditional distributions.
DirResult dir_repair(const data::BoundDataset& train, double repair_level);

struct DemvResult {
    data::BoundDataset data;
    std::size_t iterations = 0;
    bool converged = false;
    bool skipped_empty = false;  ///< a removal would have emptied a subgroup
};

/// Subgroup g = (sensitive-value combination, label). Ratio W_exp(g)/W_obs(g).
struct SubgroupRatio {
    std::uint32_t combination = 0;
    double label = 0.0;
    std::size_t count = 0;
    double ratio = 1.0;
};

std::vector<SubgroupRatio> subgroup_ratios(const data::BoundDataset& d);

DemvResult demv_balance(const data::BoundDataset& train, double tolerance, std::size_t max_iterations,
                        std::uint64_t seed);

struct MitigationOutput {
    data::BoundDataset data;                    ///< transformed (dir, demv) or untouched
    std::optional<std::vector<double>> weights;  ///< reweighing only
    std::size_t iterations = 0;
    bool converged = true;
    std::vector<std::string> flags;
};

MitigationOutput apply(const MitigationSpec& spec, const data::BoundDataset& train, std::uint64_t seed);

}  // namespace fairbench::mitigation
