#include "qdb/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <thread>

#include "qdb/embedding.hpp"
#include "qdb/error.hpp"
#include "qdb/rng.hpp"

namespace qdb {

TrialResult run_trial(const Environment& env, const TrialSpec& spec, std::uint64_t seed) {
    check_compatibility(spec.policy);
    TrialResult out;
    out.budget_steps = spec.budget_steps ? *spec.budget_steps : budget_to_steps(spec.budget_fraction, env);
    if (out.budget_steps == 0) throw Error(ErrorCode::invalid_argument, "budget steps must be >= 1");
    out.log = run_policy(env, spec.policy, out.budget_steps, seed);
    out.metrics = evaluate(out.log, env, spec.ndcg_alpha);
    out.oracle = oracle_offline(env, out.budget_steps);
    out.regret = regret(out.log, out.oracle);
    return out;
}

void check_config(const SweepConfig& c) {
    auto bad = [](const std::string& m) { throw Error(ErrorCode::invalid_argument, m); };
    if (c.budgets.empty()) bad("at least one budget is required");
    for (std::size_t i = 0; i < c.budgets.size(); ++i) {
        if (!(c.budgets[i] > 0.0 && c.budgets[i] <= 1.0)) bad("budgets must lie in (0, 1]");
        if (i > 0 && !(c.budgets[i] > c.budgets[i - 1])) bad("budgets must be sorted ascending without repeats");
    }
    if (c.trials < 1) bad("trials must be >= 1");
    if (c.policies.empty()) bad("at least one policy is required");
    if (c.rewards.empty()) bad("at least one reward is required");
    if (c.modes.empty()) bad("at least one mode is required");
    if (!(c.ndcg_alpha >= 0.0 && c.ndcg_alpha <= 1.0)) bad("alpha must lie in [0, 1]");
    check_params(c.reward_params);
    check_params(c.hierarchy);
}

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

std::string format_budget(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view request_id, std::size_t decomposition,
                          PolicyKind policy, RewardKind reward, double budget, std::size_t trial) {
    std::string key;
    key.reserve(request_id.size() + 64);
    key.append(request_id).push_back('\x1f');
    key.append(std::to_string(decomposition)).push_back('\x1f');
    key.append(to_string(policy)).push_back('\x1f');
    key.append(to_string(reward)).push_back('\x1f');
    key.append(format_budget(budget)).push_back('\x1f');
    key.append(std::to_string(trial));
    return root ^ mix64(fnv1a64(key));
}

namespace {

struct TrialValues {
    double precision = 0.0;
    std::optional<double> recall;
    std::optional<double> ndcg5, ndcg10, ndcg20;
    double regret = 0.0;
};

struct Cell {
    std::size_t instance;
    std::size_t decomposition;
    PolicyKind policy;
    RewardKind reward;
    HierarchyMode mode;
    double budget;
};

struct CellOutcome {
    std::vector<TrialValues> values;
    std::vector<TrialRecord> records;
    std::optional<std::string> error;
};

std::optional<double> lookup(const std::map<int, double>& m, int k) {
    auto it = m.find(k);
    if (it == m.end()) return std::nullopt;
    return it->second;
}

CellOutcome run_cell(const Environment& env, const Cell& cell, const SweepConfig& config) {
    CellOutcome out;
    TrialSpec spec;
    spec.policy.policy = cell.policy;
    spec.policy.reward = RewardSpec{cell.reward, config.reward_params};
    spec.policy.hierarchy = config.hierarchy;
    spec.policy.hierarchy.mode = cell.mode;
    spec.policy.gaussian = config.gaussian;
    spec.budget_fraction = cell.budget;
    spec.ndcg_alpha = config.ndcg_alpha;
    try {
        out.values.reserve(config.trials);
        for (std::size_t t = 0; t < config.trials; ++t) {
            const std::uint64_t seed =
                derive_seed(config.seed, env.request_id(), cell.decomposition, cell.policy, cell.reward, cell.budget, t);
            TrialResult r = run_trial(env, spec, seed);
            TrialValues v;
            v.precision = r.metrics.precision;
            v.recall = r.metrics.recall;
            v.ndcg5 = lookup(r.metrics.alpha_ndcg, 5);
            v.ndcg10 = lookup(r.metrics.alpha_ndcg, 10);
            v.ndcg20 = lookup(r.metrics.alpha_ndcg, 20);
            v.regret = static_cast<double>(r.regret);
            out.values.push_back(v);
            if (config.keep_trials) {
                out.records.push_back(TrialRecord{env.request_id(), cell.decomposition, cell.policy, cell.reward,
                                                  cell.budget, cell.mode, t, seed, r.budget_steps, r.log.size(),
                                                  std::move(r.metrics), r.regret});
            }
        }
    } catch (const std::exception& e) {
        out.values.clear();
        out.records.clear();
        out.error = e.what();
    }
    return out;
}

struct Stats {
    std::size_t n = 0;
    double mean = 0.0;
    double std = 0.0;
};

Stats stats_of(const std::vector<double>& xs) {
    Stats s;
    s.n = xs.size();
    if (xs.empty()) return s;
    if (std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); })) {
        s.mean = xs.front();  // exact, so constant columns report zero spread
        return s;
    }
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

// Per-trial values averaged over a group (decompositions or requests).
std::vector<TrialValues> average_per_trial(const std::vector<const std::vector<TrialValues>*>& members,
                                           std::size_t trials) {
    std::vector<TrialValues> out(trials);
    auto avg_opt = [&](std::size_t t, auto field) -> std::optional<double> {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto* m : members) {
            if (const auto& v = (*m)[t].*field; v) {
                sum += *v;
                ++n;
            }
        }
        if (n == 0) return std::nullopt;
        return sum / static_cast<double>(n);
    };
    for (std::size_t t = 0; t < trials; ++t) {
        double p = 0.0, r = 0.0;
        for (const auto* m : members) {
            p += (*m)[t].precision;
            r += (*m)[t].regret;
        }
        const auto n = static_cast<double>(members.size());
        out[t].precision = p / n;
        out[t].regret = r / n;
        out[t].recall = avg_opt(t, &TrialValues::recall);
        out[t].ndcg5 = avg_opt(t, &TrialValues::ndcg5);
        out[t].ndcg10 = avg_opt(t, &TrialValues::ndcg10);
        out[t].ndcg20 = avg_opt(t, &TrialValues::ndcg20);
    }
    return out;
}

SweepRow summarize(std::string request_id, PolicyKind policy, RewardKind reward, HierarchyMode mode, double budget,
                   const std::vector<TrialValues>& values) {
    std::vector<double> prec, rec, n5, n10, n20, reg;
    for (const auto& v : values) {
        prec.push_back(v.precision);
        reg.push_back(v.regret);
        if (v.recall) rec.push_back(*v.recall);
        if (v.ndcg5) n5.push_back(*v.ndcg5);
        if (v.ndcg10) n10.push_back(*v.ndcg10);
        if (v.ndcg20) n20.push_back(*v.ndcg20);
    }
    auto mean_opt = [](const std::vector<double>& xs) -> std::optional<double> {
        if (xs.empty()) return std::nullopt;
        return stats_of(xs).mean;
    };
    const Stats p = stats_of(prec);
    SweepRow row{std::move(request_id), policy, reward, budget, mode, values.size(), p.mean, p.std,
                 1.96 * p.std / std::sqrt(static_cast<double>(values.size())),
                 std::nullopt, std::nullopt, mean_opt(n5), mean_opt(n10), mean_opt(n20), stats_of(reg).mean};
    if (!rec.empty()) {
        const Stats r = stats_of(rec);
        row.recall_mean = r.mean;
        row.recall_std = r.std;
    }
    return row;
}

}  // namespace

SweepTable run_sweep(std::span<const Environment> instances, const SweepConfig& config) {
    check_config(config);

    std::vector<std::string> requests;  // first-appearance order
    std::map<std::string, std::size_t> decompositions;
    std::vector<std::size_t> ordinal(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& id = instances[i].request_id();
        auto [it, inserted] = decompositions.emplace(id, 0);
        if (inserted) requests.push_back(id);
        ordinal[i] = it->second++;
    }

    std::vector<Cell> cells;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        for (PolicyKind p : config.policies) {
            for (RewardKind r : config.rewards) {
                for (HierarchyMode m : config.modes) {
                    for (double b : config.budgets) cells.push_back(Cell{i, ordinal[i], p, r, m, b});
                }
            }
        }
    }

    std::vector<CellOutcome> outcomes(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t c = next++; c < cells.size(); c = next++) {
            outcomes[c] = run_cell(instances[cells[c].instance], cells[c], config);
        }
    };
    std::size_t threads = config.parallelism == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.parallelism;
    threads = std::min(threads, std::max<std::size_t>(cells.size(), 1));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    SweepTable table;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto& cell = cells[c];
        auto& outcome = outcomes[c];
        if (outcome.error) {
            table.failures.push_back(CellFailure{instances[cell.instance].request_id(), cell.decomposition, cell.policy,
                                                 cell.reward, cell.budget, cell.mode, *outcome.error});
            continue;
        }
        table.trials_run += outcome.values.size();
        for (auto& rec : outcome.records) table.trials.push_back(std::move(rec));
    }

    // Cells of one configuration are contiguous per instance; index them by key.
    using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>;  // policy, reward, mode, budget
    std::map<std::pair<std::string, Key>, std::vector<const std::vector<TrialValues>*>> groups;
    std::size_t c = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        for (std::size_t p = 0; p < config.policies.size(); ++p) {
            for (std::size_t r = 0; r < config.rewards.size(); ++r) {
                for (std::size_t m = 0; m < config.modes.size(); ++m) {
                    for (std::size_t b = 0; b < config.budgets.size(); ++b, ++c) {
                        if (outcomes[c].error) continue;
                        groups[{instances[i].request_id(), Key{p, r, m, b}}].push_back(&outcomes[c].values);
                    }
                }
            }
        }
    }

    std::map<Key, std::vector<std::vector<TrialValues>>> per_request;
    for (const auto& req : requests) {
        for (std::size_t p = 0; p < config.policies.size(); ++p) {
            for (std::size_t r = 0; r < config.rewards.size(); ++r) {
                for (std::size_t m = 0; m < config.modes.size(); ++m) {
                    for (std::size_t b = 0; b < config.budgets.size(); ++b) {
                        const Key key{p, r, m, b};
                        auto it = groups.find({req, key});
                        if (it == groups.end()) continue;
                        auto values = average_per_trial(it->second, config.trials);
                        table.rows.push_back(summarize(req, config.policies[p], config.rewards[r], config.modes[m],
                                                       config.budgets[b], values));
                        per_request[key].push_back(std::move(values));
                    }
                }
            }
        }
    }

    if (requests.size() > 1) {
        for (const auto& [key, lists] : per_request) {
            std::vector<const std::vector<TrialValues>*> members;
            for (const auto& l : lists) members.push_back(&l);
            const auto [p, r, m, b] = key;
            table.rows.push_back(summarize("ALL", config.policies[p], config.rewards[r], config.modes[m],
                                           config.budgets[b], average_per_trial(members, config.trials)));
        }
    }
    return table;
}

namespace {

std::string opt_cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string("NA"); }

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepTable& table, std::string_view comment) {
    if (!comment.empty()) out << "# " << comment << '\n';
    out << kSweepCsvHeader << '\n';
    for (const auto& r : table.rows) {
        out << csv_escape(r.request_id) << ',' << to_string(r.policy) << ',' << to_string(r.reward) << ','
            << format_budget(r.budget) << ',' << to_string(r.mode) << ',' << r.trials << ','
            << format_number(r.precision_mean) << ',' << format_number(r.precision_std) << ','
            << format_number(r.precision_ci95) << ',' << opt_cell(r.recall_mean) << ',' << opt_cell(r.recall_std) << ','
            << opt_cell(r.alpha_ndcg_5) << ',' << opt_cell(r.alpha_ndcg_10) << ',' << opt_cell(r.alpha_ndcg_20) << ','
            << format_number(r.regret_mean) << '\n';
    }
}

void write_trials_csv(std::ostream& out, const SweepTable& table) {
    out << "request_id,decomposition,policy,reward,budget,mode,trial,seed,budget_steps,steps,precision,recall,"
           "alpha_ndcg_5,alpha_ndcg_10,alpha_ndcg_20,regret\n";
    for (const auto& t : table.trials) {
        out << csv_escape(t.request_id) << ',' << t.decomposition << ',' << to_string(t.policy) << ','
            << to_string(t.reward) << ',' << format_budget(t.budget) << ',' << to_string(t.mode) << ',' << t.trial << ','
            << t.seed << ',' << t.budget_steps << ',' << t.steps << ',' << format_number(t.metrics.precision) << ','
            << opt_cell(t.metrics.recall) << ',' << opt_cell(lookup(t.metrics.alpha_ndcg, 5)) << ','
            << opt_cell(lookup(t.metrics.alpha_ndcg, 10)) << ',' << opt_cell(lookup(t.metrics.alpha_ndcg, 20)) << ','
            << t.regret << '\n';
    }
}

void write_failures_csv(std::ostream& out, const SweepTable& table) {
    out << "request_id,decomposition,policy,reward,budget,mode,error\n";
    for (const auto& f : table.failures) {
        out << csv_escape(f.request_id) << ',' << f.decomposition << ',' << to_string(f.policy) << ','
            << to_string(f.reward) << ',' << format_budget(f.budget) << ',' << to_string(f.mode) << ','
            << csv_escape(f.error) << '\n';
    }
}

std::vector<GridPoint> grid_product(std::span<const double> taus, std::span<const std::size_t> min_obs,
                                    std::span<const double> lambdas) {
    std::vector<GridPoint> out;
    for (double t : taus) {
        for (std::size_t n : min_obs) {
            for (double l : lambdas) out.push_back(GridPoint{t, n, l});
        }
    }
    return out;
}

std::vector<GridResult> grid_search_hierarchy(std::span<const Environment> instances, std::span<const GridPoint> grid,
                                              const SweepConfig& config) {
    if (grid.empty()) throw Error(ErrorCode::invalid_argument, "grid search needs at least one point");
    SweepConfig base = config;
    base.policies = {PolicyKind::thompson_discrete};
    base.rewards = {config.rewards.empty() ? RewardKind::bernoulli : config.rewards.front()};
    base.modes = {HierarchyMode::hierarchical};
    base.budgets = {config.budgets.empty() ? 0.1 : config.budgets.front()};
    base.keep_trials = false;

    std::vector<GridResult> out;
    for (const GridPoint& point : grid) {
        SweepConfig cfg = base;
        cfg.hierarchy.tau = point.tau;
        cfg.hierarchy.min_obs = point.min_obs;
        cfg.hierarchy.lambda = point.lambda;
        const SweepTable table = run_sweep(instances, cfg);
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& row : table.rows) {
            if (row.request_id == "ALL") continue;
            sum += row.precision_mean;
            ++n;
        }
        out.push_back(GridResult{point, n ? sum / static_cast<double>(n) : 0.0, table.trials_run});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const GridResult& a, const GridResult& b) { return a.mean_precision > b.mean_precision; });
    return out;
}

}  // namespace qdb
