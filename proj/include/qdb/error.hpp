#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qdb {

enum class ErrorCode {
    invalid_argument,
    missing_judgment,
    missing_embedding,
    no_document,
    incompatible_reward,
    incompatible_configuration,
    invalid_score,
    undefined_metric,
    metric_unavailable,
    undefined_regression,
    already_expanded,
    no_arms,
    malformed_input,
    invalid_instance,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace qdb
