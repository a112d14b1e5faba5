#include "qdb/error.hpp"

namespace qdb {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid-argument";
        case ErrorCode::missing_judgment: return "missing-judgment";
        case ErrorCode::missing_embedding: return "missing-embedding";
        case ErrorCode::no_document: return "no-document";
        case ErrorCode::incompatible_reward: return "incompatible-reward";
        case ErrorCode::incompatible_configuration: return "incompatible-configuration";
        case ErrorCode::invalid_score: return "invalid-score";
        case ErrorCode::undefined_metric: return "undefined-metric";
        case ErrorCode::metric_unavailable: return "metric-unavailable";
        case ErrorCode::undefined_regression: return "undefined-regression";
        case ErrorCode::already_expanded: return "already-expanded";
        case ErrorCode::no_arms: return "no-arms";
        case ErrorCode::malformed_input: return "malformed-input";
        case ErrorCode::invalid_instance: return "invalid-instance";
    }
    return "unknown";
}

}  // namespace qdb
