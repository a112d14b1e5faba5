#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace qdb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct DocumentRef {
    std::string doc_id;
    double score = 0.0;
    std::optional<std::string> text;
};

struct SubQuery {
    std::string sq_id;
    std::optional<std::string> parent_id;  // absent for root-level sub-queries
    std::string text;
    std::vector<DocumentRef> ranking;
};

/// One user request as loaded from disk. Plain data; may violate invariants
/// until checked by validate_instance().
struct RequestInstance {
    std::string request_id;
    std::string request_text;
    std::vector<SubQuery> subqueries;
    std::map<std::string, int> judgments;
    std::optional<std::map<std::string, std::set<std::string>>> nuggets;
    std::optional<std::map<std::string, std::vector<double>>> embeddings;
};

struct Observation {
    std::size_t step = 0;  // 1-based
    std::string arm;       // sq_id
    std::size_t rank = 0;  // 0-based position in the arm's ranking
    std::string doc_id;
    int relevance = 0;
    double raw_reward = 0.0;
    double clamped_reward = 0.0;

    // Dense indices into the Environment that produced this observation.
    std::size_t arm_index = 0;
    std::size_t doc_index = 0;
};

struct ObservationLog {
    std::vector<Observation> observations;
    std::size_t budget_steps = 0;

    std::size_t size() const noexcept { return observations.size(); }
    bool empty() const noexcept { return observations.empty(); }
};

inline double clamp_unit(double r) noexcept { return r < 0.0 ? 0.0 : (r > 1.0 ? 1.0 : r); }

}  // namespace qdb
