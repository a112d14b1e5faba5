#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qdb/environment.hpp"
#include "qdb/types.hpp"

namespace qdb {

inline constexpr int kAlphaNdcgCutoffs[] = {5, 10, 20, 40, 50};

struct MetricReport {
    double precision = 0.0;
    std::optional<double> recall;            // absent when the pool holds no relevant document
    std::map<int, double> alpha_ndcg;        // empty when the instance carries no nuggets
    std::size_t relevant_found = 0;          // unique relevant documents observed
    std::size_t unique_observed = 0;
};

/// Relevant fraction of the unique documents observed (deduplicated by doc_id).
double precision(const ObservationLog& log, const Environment& env);

/// Unique relevant observed over unique relevant in the union of all rankings.
double recall(const ObservationLog& log, const Environment& env);

/// Diversity-aware nDCG over the observation order, duplicates dropped. The
/// ideal ordering is the greedy best-gain sequence over every retrieved
/// document. Throws metric-unavailable without nugget data.
double alpha_ndcg(const ObservationLog& log, const Environment& env, double alpha, int cutoff);

MetricReport evaluate(const ObservationLog& log, const Environment& env, double alpha = 0.5,
                      std::span<const int> cutoffs = kAlphaNdcgCutoffs);

struct Regression {
    double slope = 0.0;
    double intercept = 0.0;
};

/// OLS of relevance on 0-based rank, pooled over every arm of the instance.
Regression rank_relevance_regression(const Environment& env);

struct OracleResult {
    std::size_t best_relevant_count = 0;
    std::vector<std::pair<std::string, std::size_t>> prefix_lengths;  // declaration order
};

/// Exact maximum number of relevant pulls achievable by consuming each arm
/// as a rank prefix with min(budget_steps, total documents) pulls in total.
/// Counts pulls, not unique documents.
OracleResult oracle_offline(const Environment& env, std::size_t budget_steps);

/// Relevant pulls in the log, duplicates across arms included.
std::size_t relevant_pulls(const ObservationLog& log) noexcept;

/// oracle.best_relevant_count - relevant_pulls(log); non-negative for
/// prefix-consuming policies, possibly negative for baseline_random.
long long regret(const ObservationLog& log, const OracleResult& oracle) noexcept;

}  // namespace qdb
