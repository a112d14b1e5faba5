#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qdb/environment.hpp"
#include "qdb/eval.hpp"
#include "qdb/policies.hpp"

namespace qdb {

struct TrialSpec {
    PolicyConfig policy;
    double budget_fraction = 0.2;
    std::optional<std::size_t> budget_steps;  // overrides the fraction when set
    double ndcg_alpha = 0.5;
};

struct TrialResult {
    ObservationLog log;
    MetricReport metrics;
    OracleResult oracle;
    long long regret = 0;
    std::size_t budget_steps = 0;
};

/// One full episode followed by evaluation. Deterministic in all inputs.
TrialResult run_trial(const Environment& env, const TrialSpec& spec, std::uint64_t seed);

inline const std::vector<double> kDefaultBudgets = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};

struct SweepConfig {
    std::vector<double> budgets = kDefaultBudgets;
    std::size_t trials = 1000;
    std::vector<PolicyKind> policies = {PolicyKind::thompson_discrete};
    std::vector<RewardKind> rewards = {RewardKind::bernoulli};
    std::vector<HierarchyMode> modes = {HierarchyMode::serial};
    RewardParams reward_params;
    HierarchyParams hierarchy;  // mode field is overridden per entry of `modes`
    GaussianPrior gaussian;
    double ndcg_alpha = 0.5;
    std::uint64_t seed = 0;
    std::size_t parallelism = 1;
    bool keep_trials = false;
};

void check_config(const SweepConfig& config);

struct SweepRow {
    std::string request_id;  // "ALL" for the macro average over requests
    PolicyKind policy;
    RewardKind reward;
    double budget;
    HierarchyMode mode;
    std::size_t trials;
    double precision_mean, precision_std, precision_ci95;
    std::optional<double> recall_mean, recall_std;
    std::optional<double> alpha_ndcg_5, alpha_ndcg_10, alpha_ndcg_20;
    double regret_mean;
};

struct TrialRecord {
    std::string request_id;
    std::size_t decomposition;
    PolicyKind policy;
    RewardKind reward;
    double budget;
    HierarchyMode mode;
    std::size_t trial;
    std::uint64_t seed;
    std::size_t budget_steps;
    std::size_t steps;
    MetricReport metrics;
    long long regret;
};

struct CellFailure {
    std::string request_id;
    std::size_t decomposition;
    PolicyKind policy;
    RewardKind reward;
    double budget;
    HierarchyMode mode;
    std::string error;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    std::vector<CellFailure> failures;
    std::vector<TrialRecord> trials;  // filled when keep_trials is set
    std::size_t trials_run = 0;
};

/// Seed of one trial: root seed XOR a stable hash of the cell coordinates.
std::uint64_t derive_seed(std::uint64_t root, std::string_view request_id, std::size_t decomposition,
                          PolicyKind policy, RewardKind reward, double budget, std::size_t trial);

/// Cartesian product instances x policies x rewards x modes x budgets x trials.
/// Instances sharing a request_id are decompositions of one request and are
/// averaged together per trial. A cell (one instance under one configuration)
/// that throws is recorded as a failure and skipped.
SweepTable run_sweep(std::span<const Environment> instances, const SweepConfig& config);

inline constexpr std::string_view kSweepCsvHeader =
    "request_id,policy,reward,budget,mode,trials,precision_mean,precision_std,precision_ci95,recall_mean,recall_std,"
    "alpha_ndcg_5,alpha_ndcg_10,alpha_ndcg_20,regret_mean";

/// `comment`, when non-empty, is written first as a "# ..." line.
void write_sweep_csv(std::ostream& out, const SweepTable& table, std::string_view comment = {});
void write_trials_csv(std::ostream& out, const SweepTable& table);
void write_failures_csv(std::ostream& out, const SweepTable& table);

struct GridPoint {
    double tau;
    std::size_t min_obs;
    double lambda;
};

struct GridResult {
    GridPoint point;
    double mean_precision;
    std::size_t trials;
};

/// Hierarchical thompson_discrete at one budget for every grid point, sorted
/// by mean precision (descending, grid order on ties).
std::vector<GridResult> grid_search_hierarchy(std::span<const Environment> instances, std::span<const GridPoint> grid,
                                              const SweepConfig& config);

std::vector<GridPoint> grid_product(std::span<const double> taus, std::span<const std::size_t> min_obs,
                                    std::span<const double> lambdas);

std::string format_number(double value);
std::string format_budget(double value);

}  // namespace qdb
