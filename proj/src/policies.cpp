#include "qdb/policies.hpp"

#include <cmath>
#include <string>

#include "qdb/error.hpp"
#include "qdb/rng.hpp"

namespace qdb {

std::string_view to_string(PolicyKind kind) noexcept {
    switch (kind) {
        case PolicyKind::thompson_discrete: return "thompson_discrete";
        case PolicyKind::thompson_continuous: return "thompson_continuous";
        case PolicyKind::epsilon_greedy: return "epsilon_greedy";
        case PolicyKind::baseline_random: return "baseline_random";
        case PolicyKind::baseline_rank_aware: return "baseline_rank_aware";
        case PolicyKind::exploit_only: return "exploit_only";
        case PolicyKind::explore_only: return "explore_only";
    }
    return "unknown";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view name) noexcept {
    for (PolicyKind k : kAllPolicyKinds) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

void check_compatibility(const PolicyConfig& config) {
    check_params(config.reward.params);
    check_params(config.hierarchy);
    const auto policy = std::string(to_string(config.policy));
    const auto reward = std::string(to_string(config.reward.kind));
    if (config.policy == PolicyKind::thompson_continuous && config.reward.kind != RewardKind::gaussian_score) {
        throw Error(ErrorCode::incompatible_reward, "--policy " + policy + " requires --reward gaussian_score, got " + reward);
    }
    if (config.policy == PolicyKind::thompson_discrete && !is_unit_interval(config.reward.kind, config.reward.params)) {
        throw Error(ErrorCode::incompatible_reward, "--policy " + policy + " needs a [0,1]-valued reward; " + reward +
                                                        " with --score-norm " +
                                                        std::string(to_string(config.reward.params.score_norm)) +
                                                        " is unbounded");
    }
    if (config.hierarchy.mode == HierarchyMode::hierarchical && config.policy != PolicyKind::thompson_discrete) {
        throw Error(ErrorCode::incompatible_configuration, "--mode hierarchical requires --policy thompson_discrete, got " + policy);
    }
    if (!(config.gaussian.sigma0_sq > 0.0)) throw Error(ErrorCode::invalid_argument, "prior variance must be > 0");
}

std::size_t argmax_first(const std::vector<double>& values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

namespace {

/// Shared sequential-consumption state of one trial: which ranks of each arm
/// are observed, the growing log, and reward evaluation against it.
class Episode {
public:
    Episode(const Environment& env, const RewardSpec& reward, std::size_t budget_steps)
        : env_(env), reward_(reward), seen_(env.arm_count()), cursor_(env.arm_count(), 0),
          remaining_(env.arm_count()) {
        log_.budget_steps = budget_steps;
        for (std::size_t a = 0; a < env.arm_count(); ++a) {
            seen_[a].assign(env.arm_size(a), false);
            remaining_[a] = env.arm_size(a);
        }
    }

    bool budget_left() const { return log_.size() < log_.budget_steps; }
    bool consumable(std::size_t arm) const { return remaining_[arm] > 0; }
    std::size_t next_rank(std::size_t arm) const { return cursor_[arm]; }

    std::vector<std::size_t> unobserved_ranks(std::size_t arm) const {
        std::vector<std::size_t> out;
        for (std::size_t r = 0; r < seen_[arm].size(); ++r) {
            if (!seen_[arm][r]) out.push_back(r);
        }
        return out;
    }

    std::vector<std::size_t> consumable_arms() const {
        std::vector<std::size_t> out;
        for (std::size_t a = 0; a < remaining_.size(); ++a) {
            if (remaining_[a] > 0) out.push_back(a);
        }
        return out;
    }

    const Observation& observe(std::size_t arm, std::size_t rank) {
        return observe_with(arm, rank, compute_reward(reward_.kind, env_, arm, rank, log_, reward_.params));
    }

    const Observation& observe_with(std::size_t arm, std::size_t rank, double raw) {
        Observation o;
        o.step = log_.size() + 1;
        o.arm = env_.arm_id(arm);
        o.rank = rank;
        o.arm_index = arm;
        o.doc_index = env_.doc_at(arm, rank);
        o.doc_id = env_.doc_id(o.doc_index);
        o.relevance = env_.relevance(o.doc_index);
        o.raw_reward = raw;
        o.clamped_reward = clamp_unit(raw);
        seen_[arm][rank] = true;
        --remaining_[arm];
        while (cursor_[arm] < seen_[arm].size() && seen_[arm][cursor_[arm]]) ++cursor_[arm];
        log_.observations.push_back(std::move(o));
        return log_.observations.back();
    }

    const ObservationLog& log() const { return log_; }
    ObservationLog take_log() { return std::move(log_); }

private:
    const Environment& env_;
    const RewardSpec& reward_;
    std::vector<std::vector<bool>> seen_;
    std::vector<std::size_t> cursor_;
    std::vector<std::size_t> remaining_;
    ObservationLog log_;
};

}  // namespace

DiscreteRun run_thompson_discrete(const Environment& env, const RewardSpec& reward, const HierarchyParams& hierarchy,
                                  std::size_t budget_steps, std::uint64_t seed) {
    check_compatibility(PolicyConfig{PolicyKind::thompson_discrete, reward, hierarchy, {}});
    Rng rng(seed);
    Episode ep(env, reward, budget_steps);
    std::vector<BetaArm> arms(env.arm_count());
    for (std::size_t a : initial_active_set(env, hierarchy.mode)) arms[a].active = true;
    const bool hierarchical = hierarchy.mode == HierarchyMode::hierarchical;
    const bool sentinel = has_ucb_term(reward.kind);

    std::vector<std::size_t> candidates;
    std::vector<double> theta;
    while (ep.budget_left()) {
        candidates.clear();
        for (std::size_t a = 0; a < arms.size(); ++a) {
            if (arms[a].active && ep.consumable(a)) candidates.push_back(a);
        }
        if (candidates.empty()) break;

        std::optional<std::size_t> chosen;
        if (sentinel) {
            for (std::size_t a : candidates) {
                if (arms[a].pulls == 0) {
                    chosen = a;
                    break;
                }
            }
        }
        if (!chosen) {
            theta.clear();
            for (std::size_t a : candidates) theta.push_back(rng.beta(arms[a].alpha, arms[a].beta));
            chosen = candidates[argmax_first(theta)];
        }

        const std::size_t arm = *chosen;
        const Observation& obs = ep.observe(arm, ep.next_rank(arm));
        arms[arm].update(obs.clamped_reward);

        if (hierarchical && !arms[arm].expanded && !env.children(arm).empty() && should_expand(arms[arm], hierarchy)) {
            const auto& kids = env.children(arm);
            auto inherited = expand(arms[arm], kids.size(), hierarchy.lambda);
            for (std::size_t i = 0; i < kids.size(); ++i) arms[kids[i]] = inherited[i];
            if (hierarchy.retire_parent) arms[arm].active = false;
        }
    }
    return DiscreteRun{ep.take_log(), std::move(arms)};
}

ContinuousRun run_thompson_continuous(const Environment& env, const RewardParams& params, std::size_t budget_steps,
                                      std::uint64_t seed, GaussianPrior prior) {
    const RewardSpec reward{RewardKind::gaussian_score, params};
    PolicyConfig config{PolicyKind::thompson_continuous, reward, {}, prior};
    check_compatibility(config);
    Rng rng(seed);
    Episode ep(env, reward, budget_steps);
    std::vector<GaussianArm> arms(env.arm_count());
    for (auto& arm : arms) {
        arm.mu0 = prior.mu0;
        arm.sigma0_sq = prior.sigma0_sq;
    }

    std::vector<std::size_t> candidates;
    std::vector<double> theta;
    while (ep.budget_left()) {
        candidates = ep.consumable_arms();
        if (candidates.empty()) break;
        theta.clear();
        for (std::size_t a : candidates) theta.push_back(rng.normal(arms[a].mean(), std::sqrt(arms[a].variance())));
        const std::size_t arm = candidates[argmax_first(theta)];
        const std::size_t rank = ep.next_rank(arm);
        const double r = reward_gaussian_score(env, arm, rank, params.score_norm);
        if (!std::isfinite(r)) throw Error(ErrorCode::invalid_score, "non-finite reward in '" + env.arm_id(arm) + "'");
        ep.observe_with(arm, rank, r);
        arms[arm].update(r);
    }
    return ContinuousRun{ep.take_log(), std::move(arms)};
}

ObservationLog run_epsilon_greedy(const Environment& env, std::size_t budget_steps, std::uint64_t seed,
                                  const RewardSpec& reward) {
    Rng rng(seed);
    Episode ep(env, reward, budget_steps);
    std::optional<std::size_t> stay;
    while (ep.budget_left()) {
        std::size_t arm;
        if (stay && ep.consumable(*stay)) {
            arm = *stay;
        } else {
            const auto candidates = ep.consumable_arms();
            if (candidates.empty()) break;
            arm = candidates[rng.uniform_index(candidates.size())];
        }
        const Observation& obs = ep.observe(arm, ep.next_rank(arm));
        stay = obs.relevance == 1 ? std::optional<std::size_t>(arm) : std::nullopt;
    }
    return ep.take_log();
}

ObservationLog run_baseline_random(const Environment& env, std::size_t budget_steps, std::uint64_t seed,
                                   const RewardSpec& reward) {
    Rng rng(seed);
    Episode ep(env, reward, budget_steps);
    while (ep.budget_left()) {
        const auto candidates = ep.consumable_arms();
        if (candidates.empty()) break;
        const std::size_t arm = candidates[rng.uniform_index(candidates.size())];
        const auto ranks = ep.unobserved_ranks(arm);
        ep.observe(arm, ranks[rng.uniform_index(ranks.size())]);
    }
    return ep.take_log();
}

ObservationLog run_baseline_rank_aware(const Environment& env, std::size_t budget_steps, std::uint64_t seed,
                                       const RewardSpec& reward) {
    Rng rng(seed);
    Episode ep(env, reward, budget_steps);
    while (ep.budget_left()) {
        const auto candidates = ep.consumable_arms();
        if (candidates.empty()) break;
        const std::size_t arm = candidates[rng.uniform_index(candidates.size())];
        ep.observe(arm, ep.next_rank(arm));
    }
    return ep.take_log();
}

ObservationLog run_exploit_only(const Environment& env, std::size_t budget_steps, const RewardSpec& reward) {
    Episode ep(env, reward, budget_steps);
    for (std::size_t a = 0; a < env.arm_count() && ep.budget_left(); ++a) {
        while (ep.budget_left() && ep.consumable(a)) ep.observe(a, ep.next_rank(a));
    }
    return ep.take_log();
}

ObservationLog run_explore_only(const Environment& env, std::size_t budget_steps, const RewardSpec& reward) {
    Episode ep(env, reward, budget_steps);
    bool progressed = true;
    while (ep.budget_left() && progressed) {
        progressed = false;
        for (std::size_t a = 0; a < env.arm_count() && ep.budget_left(); ++a) {
            if (!ep.consumable(a)) continue;
            ep.observe(a, ep.next_rank(a));
            progressed = true;
        }
    }
    return ep.take_log();
}

ObservationLog run_policy(const Environment& env, const PolicyConfig& config, std::size_t budget_steps,
                          std::uint64_t seed) {
    check_compatibility(config);
    switch (config.policy) {
        case PolicyKind::thompson_discrete:
            return run_thompson_discrete(env, config.reward, config.hierarchy, budget_steps, seed).log;
        case PolicyKind::thompson_continuous:
            return run_thompson_continuous(env, config.reward.params, budget_steps, seed, config.gaussian).log;
        case PolicyKind::epsilon_greedy: return run_epsilon_greedy(env, budget_steps, seed, config.reward);
        case PolicyKind::baseline_random: return run_baseline_random(env, budget_steps, seed, config.reward);
        case PolicyKind::baseline_rank_aware: return run_baseline_rank_aware(env, budget_steps, seed, config.reward);
        case PolicyKind::exploit_only: return run_exploit_only(env, budget_steps, config.reward);
        case PolicyKind::explore_only: return run_explore_only(env, budget_steps, config.reward);
    }
    throw Error(ErrorCode::invalid_argument, "unknown policy");
}

}  // namespace qdb
