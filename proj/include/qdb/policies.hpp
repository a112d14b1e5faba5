#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "qdb/environment.hpp"
#include "qdb/hierarchy.hpp"
#include "qdb/posterior.hpp"
#include "qdb/rewards.hpp"

namespace qdb {

enum class PolicyKind {
    thompson_discrete,
    thompson_continuous,
    epsilon_greedy,
    baseline_random,
    baseline_rank_aware,
    exploit_only,
    explore_only,
};

inline constexpr PolicyKind kAllPolicyKinds[] = {
    PolicyKind::thompson_discrete, PolicyKind::thompson_continuous, PolicyKind::epsilon_greedy,
    PolicyKind::baseline_random,   PolicyKind::baseline_rank_aware, PolicyKind::exploit_only,
    PolicyKind::explore_only,
};

std::string_view to_string(PolicyKind kind) noexcept;
std::optional<PolicyKind> parse_policy_kind(std::string_view name) noexcept;

struct RewardSpec {
    RewardKind kind = RewardKind::bernoulli;
    RewardParams params;
};

struct GaussianPrior {
    double mu0 = 0.0;
    double sigma0_sq = 1.0;
};

struct PolicyConfig {
    PolicyKind policy = PolicyKind::thompson_discrete;
    RewardSpec reward;
    HierarchyParams hierarchy;
    GaussianPrior gaussian;
};

/// Throws incompatible-reward for a bad (policy, reward) pairing and
/// incompatible-configuration for hierarchical mode outside thompson_discrete.
void check_compatibility(const PolicyConfig& config);

struct DiscreteRun {
    ObservationLog log;
    std::vector<BetaArm> arms;  // one per sub-query, in declaration order
};

struct ContinuousRun {
    ObservationLog log;
    std::vector<GaussianArm> arms;
};

DiscreteRun run_thompson_discrete(const Environment& env, const RewardSpec& reward, const HierarchyParams& hierarchy,
                                  std::size_t budget_steps, std::uint64_t seed);
ContinuousRun run_thompson_continuous(const Environment& env, const RewardParams& params, std::size_t budget_steps,
                                      std::uint64_t seed, GaussianPrior prior = {});

// The remaining policies choose arms without posteriors; `reward` only fills
// the logged reward columns.
ObservationLog run_epsilon_greedy(const Environment& env, std::size_t budget_steps, std::uint64_t seed,
                                  const RewardSpec& reward = {});
ObservationLog run_baseline_random(const Environment& env, std::size_t budget_steps, std::uint64_t seed,
                                   const RewardSpec& reward = {});
ObservationLog run_baseline_rank_aware(const Environment& env, std::size_t budget_steps, std::uint64_t seed,
                                       const RewardSpec& reward = {});
ObservationLog run_exploit_only(const Environment& env, std::size_t budget_steps, const RewardSpec& reward = {});
ObservationLog run_explore_only(const Environment& env, std::size_t budget_steps, const RewardSpec& reward = {});

ObservationLog run_policy(const Environment& env, const PolicyConfig& config, std::size_t budget_steps,
                          std::uint64_t seed);

/// Index of the largest value, first on ties.
std::size_t argmax_first(const std::vector<double>& values);

}  // namespace qdb
