#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "qdb/environment.hpp"
#include "qdb/types.hpp"

namespace qdb {

enum class RewardKind {
    bernoulli,
    bernoulli_ucb,
    bernoulli_topk,
    bernoulli_rank_aware,
    gaussian_score,
    diversity,
    diversity_concave,
    topk_ucb_diversity,
};

inline constexpr RewardKind kAllRewardKinds[] = {
    RewardKind::bernoulli,     RewardKind::bernoulli_ucb, RewardKind::bernoulli_topk,
    RewardKind::bernoulli_rank_aware, RewardKind::gaussian_score, RewardKind::diversity,
    RewardKind::diversity_concave, RewardKind::topk_ucb_diversity,
};

enum class ScoreNorm { minmax_per_arm, zscore_per_arm, none };

std::string_view to_string(RewardKind kind) noexcept;
std::string_view to_string(ScoreNorm norm) noexcept;
std::optional<RewardKind> parse_reward_kind(std::string_view name) noexcept;
std::optional<ScoreNorm> parse_score_norm(std::string_view name) noexcept;

struct RewardParams {
    int k = 5;          // top-k window width
    double c = 0.001;   // UCB scale
    double a = 5.0;     // concave shape
    double b_shape = 15.0;
    ScoreNorm score_norm = ScoreNorm::minmax_per_arm;
};

/// Throws invalid-argument when k < 1 or c < 0.
void check_params(const RewardParams& params);

bool has_ucb_term(RewardKind kind) noexcept;
bool needs_embeddings(RewardKind kind) noexcept;
/// True when every raw reward of this kind already lies in [0, 1] (before UCB).
bool is_unit_interval(RewardKind kind, const RewardParams& params) noexcept;

/// UCB optimism term. `forced` marks the pulls == 0 case: the arm must be
/// selected before any sampled arm, and it contributes nothing numerically.
struct UcbBonus {
    bool forced = false;
    double value = 0.0;
};
UcbBonus ucb_bonus(std::size_t pulls, double c) noexcept;

int relevance(const Environment& env, std::string_view doc_id);

double reward_bernoulli(const Environment& env, std::size_t arm, std::size_t rank);
double reward_bernoulli_ucb(const Environment& env, std::size_t arm, std::size_t rank, std::size_t pulls,
                            const RewardParams& params);
/// Mean relevance over ranks [rank, rank + k), truncated at the end of the list.
double reward_topk(const Environment& env, std::size_t arm, std::size_t rank, int k);
double reward_rank_aware(const Environment& env, std::size_t arm, std::size_t rank);
double reward_gaussian_score(const Environment& env, std::size_t arm, std::size_t rank, ScoreNorm norm);

/// Max cosine between `doc` and every observed document; -1 for an empty log.
double max_cosine(const Environment& env, std::size_t doc, const ObservationLog& log);
/// 1 - (max_cosine + 1) / 2.
double novelty(const Environment& env, std::size_t doc, const ObservationLog& log);
double concave_factor(double max_cos, double a, double b_shape) noexcept;

double reward_diversity(const Environment& env, std::size_t arm, std::size_t rank, const ObservationLog& log);
double reward_diversity_concave(const Environment& env, std::size_t arm, std::size_t rank, const ObservationLog& log,
                                double a, double b_shape);
double reward_topk_ucb_diversity(const Environment& env, std::size_t arm, std::size_t rank, const ObservationLog& log,
                                 const RewardParams& params);

/// Number of observations of `arm` in the log.
std::size_t pull_count(const ObservationLog& log, std::size_t arm) noexcept;

/// Dispatch on kind; the UCB pull count is taken from the log.
double compute_reward(RewardKind kind, const Environment& env, std::size_t arm, std::size_t rank,
                      const ObservationLog& log, const RewardParams& params);

}  // namespace qdb
