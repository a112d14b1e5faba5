#include "qdb/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qdb/error.hpp"

namespace qdb {

std::string_view to_string(RewardKind kind) noexcept {
    switch (kind) {
        case RewardKind::bernoulli: return "bernoulli";
        case RewardKind::bernoulli_ucb: return "bernoulli_ucb";
        case RewardKind::bernoulli_topk: return "bernoulli_topk";
        case RewardKind::bernoulli_rank_aware: return "bernoulli_rank_aware";
        case RewardKind::gaussian_score: return "gaussian_score";
        case RewardKind::diversity: return "diversity";
        case RewardKind::diversity_concave: return "diversity_concave";
        case RewardKind::topk_ucb_diversity: return "topk_ucb_diversity";
    }
    return "unknown";
}

std::string_view to_string(ScoreNorm norm) noexcept {
    switch (norm) {
        case ScoreNorm::minmax_per_arm: return "minmax_per_arm";
        case ScoreNorm::zscore_per_arm: return "zscore_per_arm";
        case ScoreNorm::none: return "none";
    }
    return "unknown";
}

std::optional<RewardKind> parse_reward_kind(std::string_view name) noexcept {
    for (RewardKind k : kAllRewardKinds) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

std::optional<ScoreNorm> parse_score_norm(std::string_view name) noexcept {
    for (ScoreNorm n : {ScoreNorm::minmax_per_arm, ScoreNorm::zscore_per_arm, ScoreNorm::none}) {
        if (to_string(n) == name) return n;
    }
    return std::nullopt;
}

void check_params(const RewardParams& p) {
    if (p.k < 1) throw Error(ErrorCode::invalid_argument, "k must be >= 1");
    if (!(p.c >= 0.0)) throw Error(ErrorCode::invalid_argument, "c must be >= 0");
    if (!std::isfinite(p.a) || !std::isfinite(p.b_shape)) throw Error(ErrorCode::invalid_argument, "concave shape must be finite");
}

bool has_ucb_term(RewardKind kind) noexcept {
    return kind == RewardKind::bernoulli_ucb || kind == RewardKind::topk_ucb_diversity;
}

bool needs_embeddings(RewardKind kind) noexcept {
    return kind == RewardKind::diversity || kind == RewardKind::diversity_concave ||
           kind == RewardKind::topk_ucb_diversity;
}

bool is_unit_interval(RewardKind kind, const RewardParams& params) noexcept {
    if (kind == RewardKind::gaussian_score) return params.score_norm == ScoreNorm::minmax_per_arm;
    return true;
}

UcbBonus ucb_bonus(std::size_t pulls, double c) noexcept {
    if (pulls == 0) return {true, 0.0};
    const double n = static_cast<double>(pulls);
    return {false, c * std::sqrt(std::log2(n + 1.0) / n)};
}

int relevance(const Environment& env, std::string_view doc_id) { return env.relevance(doc_id); }

namespace {

std::size_t doc_or_throw(const Environment& env, std::size_t arm, std::size_t rank) {
    if (rank >= env.arm_size(arm)) {
        throw Error(ErrorCode::no_document, "sub-query '" + env.arm_id(arm) + "' has no document at rank " +
                                                std::to_string(rank));
    }
    return env.doc_at(arm, rank);
}

}  // namespace

double reward_bernoulli(const Environment& env, std::size_t arm, std::size_t rank) {
    return env.relevance(doc_or_throw(env, arm, rank));
}

double reward_bernoulli_ucb(const Environment& env, std::size_t arm, std::size_t rank, std::size_t pulls,
                            const RewardParams& params) {
    return reward_bernoulli(env, arm, rank) + ucb_bonus(pulls, params.c).value;
}

double reward_topk(const Environment& env, std::size_t arm, std::size_t rank, int k) {
    doc_or_throw(env, arm, rank);
    const std::size_t end = std::min(env.arm_size(arm), rank + static_cast<std::size_t>(std::max(k, 1)));
    double sum = 0.0;
    for (std::size_t r = rank; r < end; ++r) sum += env.relevance(env.doc_at(arm, r));
    return sum / static_cast<double>(end - rank);
}

double reward_rank_aware(const Environment& env, std::size_t arm, std::size_t rank) {
    return reward_bernoulli(env, arm, rank) / std::log2(static_cast<double>(rank) + 2.0);
}

double reward_gaussian_score(const Environment& env, std::size_t arm, std::size_t rank, ScoreNorm norm) {
    doc_or_throw(env, arm, rank);
    const Vector& scores = env.arm_scores(arm);
    const double s = scores[static_cast<Eigen::Index>(rank)];
    if (!std::isfinite(s)) throw Error(ErrorCode::invalid_score, "non-finite score in '" + env.arm_id(arm) + "'");
    switch (norm) {
        case ScoreNorm::none: return s;
        case ScoreNorm::minmax_per_arm: {
            const double lo = scores.minCoeff();
            const double hi = scores.maxCoeff();
            return hi > lo ? (s - lo) / (hi - lo) : 0.5;
        }
        case ScoreNorm::zscore_per_arm: {
            const double mean = scores.mean();
            const double sd = std::sqrt((scores.array() - mean).square().mean());
            return sd > 0.0 ? (s - mean) / sd : 0.0;
        }
    }
    return s;
}

double max_cosine(const Environment& env, std::size_t doc, const ObservationLog& log) {
    if (log.empty()) return -1.0;
    const Matrix& e = env.embeddings();
    const auto row = e.row(static_cast<Eigen::Index>(doc));
    double best = -1.0;
    for (const auto& o : log.observations) {
        best = std::max(best, row.dot(e.row(static_cast<Eigen::Index>(o.doc_index))));
    }
    return std::clamp(best, -1.0, 1.0);
}

double novelty(const Environment& env, std::size_t doc, const ObservationLog& log) {
    return 1.0 - (max_cosine(env, doc, log) + 1.0) / 2.0;
}

double concave_factor(double max_cos, double a, double b_shape) noexcept {
    if (max_cos < 0.0) return 1.0;
    return std::exp(-a * std::pow(max_cos, b_shape));
}

double reward_diversity(const Environment& env, std::size_t arm, std::size_t rank, const ObservationLog& log) {
    const std::size_t doc = doc_or_throw(env, arm, rank);
    return env.relevance(doc) * novelty(env, doc, log);
}

double reward_diversity_concave(const Environment& env, std::size_t arm, std::size_t rank, const ObservationLog& log,
                                double a, double b_shape) {
    const std::size_t doc = doc_or_throw(env, arm, rank);
    return env.relevance(doc) * concave_factor(max_cosine(env, doc, log), a, b_shape);
}

double reward_topk_ucb_diversity(const Environment& env, std::size_t arm, std::size_t rank, const ObservationLog& log,
                                 const RewardParams& params) {
    const std::size_t doc = doc_or_throw(env, arm, rank);
    const double window = reward_topk(env, arm, rank, params.k);
    return window * novelty(env, doc, log) + ucb_bonus(pull_count(log, arm), params.c).value;
}

std::size_t pull_count(const ObservationLog& log, std::size_t arm) noexcept {
    return static_cast<std::size_t>(std::count_if(log.observations.begin(), log.observations.end(),
                                                  [arm](const Observation& o) { return o.arm_index == arm; }));
}

double compute_reward(RewardKind kind, const Environment& env, std::size_t arm, std::size_t rank,
                      const ObservationLog& log, const RewardParams& params) {
    switch (kind) {
        case RewardKind::bernoulli: return reward_bernoulli(env, arm, rank);
        case RewardKind::bernoulli_ucb: return reward_bernoulli_ucb(env, arm, rank, pull_count(log, arm), params);
        case RewardKind::bernoulli_topk: return reward_topk(env, arm, rank, params.k);
        case RewardKind::bernoulli_rank_aware: return reward_rank_aware(env, arm, rank);
        case RewardKind::gaussian_score: return reward_gaussian_score(env, arm, rank, params.score_norm);
        case RewardKind::diversity: return reward_diversity(env, arm, rank, log);
        case RewardKind::diversity_concave: return reward_diversity_concave(env, arm, rank, log, params.a, params.b_shape);
        case RewardKind::topk_ucb_diversity: return reward_topk_ucb_diversity(env, arm, rank, log, params);
    }
    throw Error(ErrorCode::invalid_argument, "unknown reward kind");
}

}  // namespace qdb
