#pragma once

#include <string_view>

// Text of the files under data/, compiled into the library.
namespace fairbench::embedded {

extern const std::string_view workflow_model_json;
extern const std::string_view questionnaire_json;

}  // namespace fairbench::embedded
