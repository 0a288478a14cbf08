#pragma once

#include <string>
#include <vector>

#include "fairbench/extfm.hpp"

namespace fairbench::extfm::detail {

/// Selection mask in declaration order from feature ids; throws on unknown ids.
std::vector<char> to_mask(const FeatureModel& model, const std::set<std::string>& ids);

std::string group_conflict_message(const FeatureModel& model, const Group& group);
std::string group_empty_message(const FeatureModel& model, const Group& group);

/// Number of selected leaf features strictly below `feature`.
std::size_t selected_leaves_below(const FeatureModel& model, const std::vector<char>& mask, std::size_t feature);

}  // namespace fairbench::extfm::detail
