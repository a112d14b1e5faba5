#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdb/types.hpp"

namespace qdb {

/// Two-level tree: `headers` root sub-queries, each with `children` leaves.
/// Every node of header h's subtree draws relevance from branch_probs[h].
struct HierarchySpec {
    std::size_t headers = 4;
    std::size_t children = 4;
    std::vector<double> branch_probs;
};

struct SyntheticSpec {
    std::size_t arms = 8;
    std::size_t docs = 10;                // per arm
    std::vector<double> rel_probs;        // one per arm, or a single value for all
    double rank_decay = 1.0;              // relevance probability multiplier per rank step
    int embed_dim = 16;                   // 0 disables embeddings
    double redundancy_rate = 0.0;         // chance a doc copies an earlier doc's embedding
    double score_noise = 0.1;
    std::optional<HierarchySpec> hierarchy;  // overrides `arms` and `rel_probs`
    std::string request_id;               // defaults to "syn-<seed>"
};

void check_spec(const SyntheticSpec& spec);

/// Deterministic in (spec, seed). Doc (i, j) is relevant with probability
/// p_i * rank_decay^j and scores p_i * rank_decay^j + N(0, score_noise^2).
/// Each relevant doc carries one nugget, shared with the doc whose embedding
/// it duplicates.
RequestInstance generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

/// K=8, N=10 fixture: arm 0 at `hot`, the rest at `cold`.
SyntheticSpec hot_cold_spec(double hot = 0.9, double cold = 0.1, std::size_t arms = 8, std::size_t docs = 10);

}  // namespace qdb
