#include "qdb/cli.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdb/environment.hpp"
#include "qdb/error.hpp"
#include "qdb/eval.hpp"
#include "qdb/harness.hpp"
#include "qdb/instance_io.hpp"
#include "qdb/policies.hpp"
#include "qdb/synthetic.hpp"

namespace qdb::cli {

namespace {

struct DataOptions {
    std::string data;
    bool permissive = false;
    bool embed_fallback = false;
    int embed_dim = 64;
};

struct ParamOptions {
    int k = 5;
    double c = 0.001;
    double a = 5.0;
    double b_shape = 15.0;
    std::string score_norm = "minmax_per_arm";
    double tau = 0.77;
    std::size_t min_obs = 4;
    double lambda = 0.91;
    bool retire_parent = false;
    double alpha = 0.5;
    double mu0 = 0.0;
    double sigma0_sq = 1.0;
};

void add_data_options(CLI::App& cmd, DataOptions& o) {
    cmd.add_option("--data", o.data, "Instance file (JSON lines)")->required();
    cmd.add_flag("--permissive", o.permissive, "Default unjudged documents to relevance 0 instead of rejecting");
    cmd.add_flag("--embed-fallback", o.embed_fallback, "Hash document text when embeddings are missing");
    cmd.add_option("--embed-dim", o.embed_dim, "Fallback embedding dimension")->capture_default_str();
}

void add_param_options(CLI::App& cmd, ParamOptions& o) {
    cmd.add_option("--k", o.k, "Top-k window width")->capture_default_str();
    cmd.add_option("--c", o.c, "UCB scale")->capture_default_str();
    cmd.add_option("--a", o.a, "Concave diversity shape a")->capture_default_str();
    cmd.add_option("--b-shape", o.b_shape, "Concave diversity shape b")->capture_default_str();
    cmd.add_option("--score-norm", o.score_norm, "minmax_per_arm | zscore_per_arm | none")->capture_default_str();
    cmd.add_option("--tau", o.tau, "Informativeness threshold")->capture_default_str();
    cmd.add_option("--min-obs", o.min_obs, "Pulls before a parent may expand")->capture_default_str();
    cmd.add_option("--lambda", o.lambda, "Inheritance factor")->capture_default_str();
    cmd.add_flag("--retire-parent", o.retire_parent, "Deactivate a parent once expanded");
    cmd.add_option("--alpha", o.alpha, "alpha-nDCG redundancy penalty")->capture_default_str();
    cmd.add_option("--mu0", o.mu0, "Gaussian prior mean")->capture_default_str();
    cmd.add_option("--sigma0-sq", o.sigma0_sq, "Gaussian prior variance")->capture_default_str();
}

[[noreturn]] void bad_flag(const std::string& flag, const std::string& value) {
    throw Error(ErrorCode::invalid_argument, flag + ": unknown value '" + value + "'");
}

PolicyKind policy_from(const std::string& s, const char* flag = "--policy") {
    auto p = parse_policy_kind(s);
    if (!p) bad_flag(flag, s);
    return *p;
}

RewardKind reward_from(const std::string& s, const char* flag = "--reward") {
    auto r = parse_reward_kind(s);
    if (!r) bad_flag(flag, s);
    return *r;
}

HierarchyMode mode_from(const std::string& s, const char* flag = "--mode") {
    auto m = parse_hierarchy_mode(s);
    if (!m) bad_flag(flag, s);
    return *m;
}

RewardParams reward_params(const ParamOptions& o) {
    RewardParams p;
    p.k = o.k;
    p.c = o.c;
    p.a = o.a;
    p.b_shape = o.b_shape;
    auto norm = parse_score_norm(o.score_norm);
    if (!norm) bad_flag("--score-norm", o.score_norm);
    p.score_norm = *norm;
    return p;
}

HierarchyParams hierarchy_params(const ParamOptions& o, HierarchyMode mode) {
    HierarchyParams h;
    h.tau = o.tau;
    h.min_obs = o.min_obs;
    h.lambda = o.lambda;
    h.mode = mode;
    h.retire_parent = o.retire_parent;
    return h;
}

std::vector<Environment> load_environments(const DataOptions& o) {
    std::vector<std::size_t> lines;
    auto instances = load_instances(o.data, &lines);
    if (instances.empty()) throw Error(ErrorCode::malformed_input, "'" + o.data + "' holds no instances");
    EnvironmentOptions env_opts{o.permissive, o.embed_fallback, o.embed_dim};
    std::vector<Environment> envs;
    envs.reserve(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i) {
        try {
            envs.emplace_back(std::move(instances[i]), env_opts);
        } catch (const Error& e) {
            throw Error(e.code(), "line " + std::to_string(lines[i]) + ": " + e.what());
        }
    }
    return envs;
}

/// Output sink: the --out file when given, otherwise the command's stdout.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw Error(ErrorCode::invalid_argument, "--out: cannot open '" + path + "'");
            out_ = file_.get();
        }
    }
    std::ostream& operator*() { return *out_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* out_;
};

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

std::optional<double> at_cutoff(const MetricReport& m, int k) {
    auto it = m.alpha_ndcg.find(k);
    if (it == m.alpha_ndcg.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------- run

struct RunOptions {
    DataOptions data;
    ParamOptions params;
    std::string policy = "thompson_discrete";
    std::string reward = "bernoulli";
    std::string mode = "serial";
    double budget = 0.2;
    std::size_t budget_steps = 0;
    std::uint64_t seed = 0;
    std::string format = "csv";
    std::string trace;
    std::string out;
};

int cmd_run(const RunOptions& o, std::ostream& stdout_stream) {
    TrialSpec spec;
    spec.policy.policy = policy_from(o.policy);
    spec.policy.reward = RewardSpec{reward_from(o.reward), reward_params(o.params)};
    spec.policy.hierarchy = hierarchy_params(o.params, mode_from(o.mode));
    spec.policy.gaussian = GaussianPrior{o.params.mu0, o.params.sigma0_sq};
    spec.budget_fraction = o.budget;
    if (o.budget_steps > 0) spec.budget_steps = o.budget_steps;
    spec.ndcg_alpha = o.params.alpha;
    if (!(o.budget > 0.0 && o.budget <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, "--budget must lie in (0, 1], got " + format_budget(o.budget));
    }
    if (o.format != "csv" && o.format != "json") bad_flag("--format", o.format);
    check_compatibility(spec.policy);

    const auto envs = load_environments(o.data);
    Sink sink(o.out, stdout_stream);
    std::unique_ptr<std::ofstream> trace;
    if (!o.trace.empty()) {
        trace = std::make_unique<std::ofstream>(o.trace, std::ios::binary);
        if (!*trace) throw Error(ErrorCode::invalid_argument, "--trace: cannot open '" + o.trace + "'");
        *trace << "request_id,step,arm,rank,doc_id,relevance,raw_reward,clamped_reward\n";
    }

    nlohmann::json reports = nlohmann::json::array();
    if (o.format == "csv") {
        *sink << "request_id,policy,reward,budget,mode,seed,budget_steps,steps,precision,recall,alpha_ndcg_5,"
                 "alpha_ndcg_10,alpha_ndcg_20,relevant_found,unique_observed,regret\n";
    }
    for (const auto& env : envs) {
        const TrialResult r = run_trial(env, spec, o.seed);
        if (trace) {
            for (const auto& ob : r.log.observations) {
                *trace << env.request_id() << ',' << ob.step << ',' << ob.arm << ',' << ob.rank << ',' << ob.doc_id << ','
                       << ob.relevance << ',' << format_number(ob.raw_reward) << ','
                       << format_number(ob.clamped_reward) << '\n';
            }
        }
        if (o.format == "csv") {
            *sink << env.request_id() << ',' << o.policy << ',' << o.reward << ',' << format_budget(o.budget) << ','
                  << o.mode << ',' << o.seed << ',' << r.budget_steps << ',' << r.log.size() << ','
                  << format_number(r.metrics.precision) << ',' << opt_number(r.metrics.recall) << ','
                  << opt_number(at_cutoff(r.metrics, 5)) << ',' << opt_number(at_cutoff(r.metrics, 10)) << ','
                  << opt_number(at_cutoff(r.metrics, 20)) << ',' << r.metrics.relevant_found << ','
                  << r.metrics.unique_observed << ',' << r.regret << '\n';
        } else {
            nlohmann::json j;
            j["request_id"] = env.request_id();
            j["policy"] = o.policy;
            j["reward"] = o.reward;
            j["budget"] = o.budget;
            j["mode"] = o.mode;
            j["seed"] = o.seed;
            j["budget_steps"] = r.budget_steps;
            j["steps"] = r.log.size();
            j["precision"] = r.metrics.precision;
            j["recall"] = r.metrics.recall ? nlohmann::json(*r.metrics.recall) : nlohmann::json(nullptr);
            nlohmann::json ndcg = nlohmann::json::object();
            for (const auto& [k, v] : r.metrics.alpha_ndcg) ndcg[std::to_string(k)] = v;
            j["alpha_ndcg"] = std::move(ndcg);
            j["relevant_found"] = r.metrics.relevant_found;
            j["unique_observed"] = r.metrics.unique_observed;
            j["regret"] = r.regret;
            reports.push_back(std::move(j));
        }
    }
    if (o.format == "json") *sink << reports.dump(2) << '\n';
    return ok;
}

// ---------------------------------------------------------------- sweep

struct SweepOptions {
    DataOptions data;
    ParamOptions params;
    std::vector<std::string> policies{"thompson_discrete"};
    std::vector<std::string> rewards{"bernoulli"};
    std::vector<std::string> modes{"serial"};
    std::vector<double> budgets = kDefaultBudgets;
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
    std::size_t parallel = 1;
    std::vector<double> grid_tau;
    std::vector<std::size_t> grid_min_obs;
    std::vector<double> grid_lambda;
    std::string out;
    std::string trials_out;
    std::string failures_out;
};

template <class T>
std::string join(const std::vector<T>& xs, std::string (*fmt)(T)) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fmt(xs[i]);
    return s;
}

std::string identity(std::string s) { return s; }
std::string size_str(std::size_t n) { return std::to_string(n); }

// Provenance line: the full effective configuration minus parallelism and output paths.
std::string provenance(const SweepOptions& o) {
    const auto& p = o.params;
    std::ostringstream s;
    s << "qdb sweep --data " << o.data.data << " --policies " << join(o.policies, identity) << " --rewards "
      << join(o.rewards, identity) << " --modes " << join(o.modes, identity) << " --budgets "
      << join(o.budgets, format_budget) << " --trials " << o.trials << " --seed " << o.seed << " --k " << p.k
      << " --c " << format_budget(p.c) << " --a " << format_budget(p.a) << " --b-shape " << format_budget(p.b_shape)
      << " --score-norm " << p.score_norm << " --tau " << format_budget(p.tau) << " --min-obs " << p.min_obs
      << " --lambda " << format_budget(p.lambda) << " --alpha " << format_budget(p.alpha) << " --mu0 "
      << format_budget(p.mu0) << " --sigma0-sq " << format_budget(p.sigma0_sq);
    if (p.retire_parent) s << " --retire-parent";
    if (o.data.permissive) s << " --permissive";
    if (o.data.embed_fallback) s << " --embed-fallback --embed-dim " << o.data.embed_dim;
    if (!o.grid_tau.empty() || !o.grid_min_obs.empty() || !o.grid_lambda.empty()) {
        // an empty axis falls back to the single --tau/--min-obs/--lambda value
        auto or_default = [](const auto& axis, auto fallback) {
            return axis.empty() ? std::vector<decltype(fallback)>{fallback} : axis;
        };
        s << " --grid-tau " << join(or_default(o.grid_tau, p.tau), format_budget) << " --grid-min-obs "
          << join(or_default(o.grid_min_obs, p.min_obs), size_str) << " --grid-lambda "
          << join(or_default(o.grid_lambda, p.lambda), format_budget);
    }
    return s.str();
}

int cmd_sweep(const SweepOptions& o, std::ostream& stdout_stream, std::ostream& err) {
    SweepConfig cfg;
    cfg.budgets = o.budgets;
    std::sort(cfg.budgets.begin(), cfg.budgets.end());
    cfg.trials = o.trials;
    cfg.policies.clear();
    for (const auto& p : o.policies) cfg.policies.push_back(policy_from(p, "--policies"));
    cfg.rewards.clear();
    for (const auto& r : o.rewards) cfg.rewards.push_back(reward_from(r, "--rewards"));
    cfg.modes.clear();
    for (const auto& m : o.modes) cfg.modes.push_back(mode_from(m, "--modes"));
    cfg.reward_params = reward_params(o.params);
    cfg.hierarchy = hierarchy_params(o.params, HierarchyMode::serial);
    cfg.gaussian = GaussianPrior{o.params.mu0, o.params.sigma0_sq};
    cfg.ndcg_alpha = o.params.alpha;
    cfg.seed = o.seed;
    cfg.parallelism = o.parallel;
    cfg.keep_trials = !o.trials_out.empty();
    check_config(cfg);

    const auto envs = load_environments(o.data);
    Sink sink(o.out, stdout_stream);

    const bool grid = !o.grid_tau.empty() || !o.grid_min_obs.empty() || !o.grid_lambda.empty();
    if (grid) {
        const std::vector<double> taus = o.grid_tau.empty() ? std::vector<double>{o.params.tau} : o.grid_tau;
        const std::vector<std::size_t> obs =
            o.grid_min_obs.empty() ? std::vector<std::size_t>{o.params.min_obs} : o.grid_min_obs;
        const std::vector<double> lambdas = o.grid_lambda.empty() ? std::vector<double>{o.params.lambda} : o.grid_lambda;
        const auto points = grid_product(taus, obs, lambdas);
        for (const auto& pt : points) check_params(HierarchyParams{pt.tau, pt.min_obs, pt.lambda});
        const auto ranked = grid_search_hierarchy(envs, points, cfg);
        *sink << "# " << provenance(o) << '\n';
        *sink << "rank,tau,min_obs,lambda,budget,mean_precision,trials\n";
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            const auto& g = ranked[i];
            *sink << i + 1 << ',' << format_budget(g.point.tau) << ',' << g.point.min_obs << ','
                  << format_budget(g.point.lambda) << ',' << format_budget(cfg.budgets.front()) << ','
                  << format_number(g.mean_precision) << ',' << g.trials << '\n';
        }
        return ok;
    }

    const SweepTable table = run_sweep(envs, cfg);
    write_sweep_csv(*sink, table, provenance(o));
    if (!o.trials_out.empty()) {
        std::ofstream t(o.trials_out, std::ios::binary);
        if (!t) throw Error(ErrorCode::invalid_argument, "--trials-out: cannot open '" + o.trials_out + "'");
        write_trials_csv(t, table);
    }
    if (!table.failures.empty()) {
        for (const auto& f : table.failures) {
            err << "failed cell: request " << f.request_id << " decomposition " << f.decomposition << " policy "
                << to_string(f.policy) << " reward " << to_string(f.reward) << " mode " << to_string(f.mode)
                << " budget " << format_budget(f.budget) << ": " << f.error << '\n';
        }
        if (!o.failures_out.empty()) {
            std::ofstream fo(o.failures_out, std::ios::binary);
            if (!fo) throw Error(ErrorCode::invalid_argument, "--failures-out: cannot open '" + o.failures_out + "'");
            write_failures_csv(fo, table);
        }
    } else if (!o.failures_out.empty()) {
        std::ofstream fo(o.failures_out, std::ios::binary);
        write_failures_csv(fo, table);
    }
    return ok;
}

// ---------------------------------------------------------------- gen

struct GenOptions {
    std::size_t arms = 8;
    std::size_t docs = 10;
    double hot = 0.9;
    double cold = 0.1;
    std::vector<double> rel_probs;
    double rank_decay = 1.0;
    int embed_dim = 16;
    double redundancy = 0.0;
    double score_noise = 0.1;
    std::size_t headers = 0;
    std::size_t children = 0;
    std::vector<double> branch_probs;
    std::size_t count = 1;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_gen(const GenOptions& o, std::ostream& stdout_stream) {
    SyntheticSpec spec = hot_cold_spec(o.hot, o.cold, o.arms, o.docs);
    if (!o.rel_probs.empty()) spec.rel_probs = o.rel_probs;
    spec.rank_decay = o.rank_decay;
    spec.embed_dim = o.embed_dim;
    spec.redundancy_rate = o.redundancy;
    spec.score_noise = o.score_noise;
    if (o.headers > 0) {
        HierarchySpec h;
        h.headers = o.headers;
        h.children = o.children;
        if (o.branch_probs.empty()) {
            h.branch_probs.assign(o.headers, o.cold);
            h.branch_probs[0] = o.hot;
        } else {
            h.branch_probs = o.branch_probs;
        }
        spec.hierarchy = h;
    }
    if (o.count < 1) throw Error(ErrorCode::invalid_argument, "--count must be >= 1");
    check_spec(spec);
    std::vector<RequestInstance> instances;
    for (std::size_t i = 0; i < o.count; ++i) instances.push_back(generate_synthetic(spec, o.seed + i));
    Sink sink(o.out, stdout_stream);
    write_instances(*sink, instances);
    return ok;
}

// ---------------------------------------------------------------- oracle / validate / regress

struct OracleOptions {
    DataOptions data;
    std::vector<double> budgets{0.2};
    std::size_t budget_steps = 0;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_oracle(const OracleOptions& o, std::ostream& stdout_stream) {
    for (double b : o.budgets) {
        if (!(b > 0.0 && b <= 1.0)) throw Error(ErrorCode::invalid_argument, "--budget must lie in (0, 1]");
    }
    const auto envs = load_environments(o.data);
    Sink sink(o.out, stdout_stream);
    *sink << "request_id,budget,budget_steps,best_relevant_count,total_relevant_pulls,prefix_lengths\n";
    for (const auto& env : envs) {
        std::size_t total_relevant = 0;
        for (std::size_t a = 0; a < env.arm_count(); ++a) {
            for (std::size_t r = 0; r < env.arm_size(a); ++r) total_relevant += env.relevance(env.doc_at(a, r));
        }
        auto emit = [&](const std::string& budget_label, std::size_t steps) {
            const OracleResult res = oracle_offline(env, steps);
            std::string prefixes;
            for (const auto& [sq, len] : res.prefix_lengths) prefixes += (prefixes.empty() ? "" : ";") + sq + ":" + std::to_string(len);
            *sink << env.request_id() << ',' << budget_label << ',' << steps << ',' << res.best_relevant_count << ','
                  << total_relevant << ',' << prefixes << '\n';
        };
        if (o.budget_steps > 0) {
            emit("NA", o.budget_steps);
        } else {
            for (double b : o.budgets) emit(format_budget(b), budget_to_steps(b, env));
        }
    }
    return ok;
}

struct ValidateOptions {
    std::string data;
    bool permissive = false;
    std::uint64_t seed = 0;
};

int cmd_validate(const ValidateOptions& o, std::ostream& out, std::ostream& err) {
    std::vector<std::size_t> lines;
    const auto instances = load_instances(o.data, &lines);
    std::size_t total = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        for (const auto& v : validate_instance(instances[i], o.permissive)) {
            out << "line " << lines[i] << ": request '" << instances[i].request_id << "': " << to_string(v.kind) << ": "
                << v.message << '\n';
            ++total;
        }
    }
    err << instances.size() << " instance(s), " << total << " violation(s)\n";
    return total == 0 ? ok : failure;
}

struct RegressOptions {
    DataOptions data;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_regress(const RegressOptions& o, std::ostream& stdout_stream, std::ostream& err) {
    const auto envs = load_environments(o.data);
    Sink sink(o.out, stdout_stream);
    *sink << "request_id,slope,intercept\n";
    for (const auto& env : envs) {
        try {
            const Regression fit = rank_relevance_regression(env);
            *sink << env.request_id() << ',' << format_number(fit.slope) << ',' << format_number(fit.intercept) << '\n';
        } catch (const Error& e) {
            if (e.code() != ErrorCode::undefined_regression) throw;
            err << "request '" << env.request_id() << "': " << e.what() << '\n';
            *sink << env.request_id() << ",NA,NA\n";
        }
    }
    return ok;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::incompatible_reward:
        case ErrorCode::incompatible_configuration: return incompatible;
        default: return failure;
    }
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Budgeted sub-query document selection with bandits", "qdb"};
    app.require_subcommand(1, 1);

    RunOptions run_o;
    auto* run_cmd = app.add_subcommand("run", "Run one policy on every instance and report metrics");
    add_data_options(*run_cmd, run_o.data);
    add_param_options(*run_cmd, run_o.params);
    run_cmd->add_option("--policy", run_o.policy, "Policy name")->capture_default_str();
    run_cmd->add_option("--reward", run_o.reward, "Reward name")->capture_default_str();
    run_cmd->add_option("--mode", run_o.mode, "serial | hierarchical")->capture_default_str();
    run_cmd->add_option("--budget", run_o.budget, "Budget as a fraction of all retrieved documents")->capture_default_str();
    run_cmd->add_option("--budget-steps", run_o.budget_steps, "Absolute budget in pulls (overrides --budget)");
    run_cmd->add_option("--seed", run_o.seed, "Trial seed")->capture_default_str();
    run_cmd->add_option("--format", run_o.format, "csv | json")->capture_default_str();
    run_cmd->add_option("--trace", run_o.trace, "Write the observation log as CSV to this file");
    run_cmd->add_option("--out", run_o.out, "Output file (default: standard output)");

    SweepOptions sweep_o;
    auto* sweep_cmd = app.add_subcommand("sweep", "Replicated trials over policies, rewards, modes and budgets");
    add_data_options(*sweep_cmd, sweep_o.data);
    add_param_options(*sweep_cmd, sweep_o.params);
    sweep_cmd->add_option("--policies", sweep_o.policies, "Comma-separated policies")->delimiter(',')->capture_default_str();
    sweep_cmd->add_option("--rewards", sweep_o.rewards, "Comma-separated rewards")->delimiter(',')->capture_default_str();
    sweep_cmd->add_option("--modes", sweep_o.modes, "Comma-separated hierarchy modes")->delimiter(',')->capture_default_str();
    sweep_cmd->add_option("--budgets", sweep_o.budgets, "Comma-separated budget fractions")->delimiter(',');
    sweep_cmd->add_option("--trials", sweep_o.trials, "Trials per cell")->capture_default_str();
    sweep_cmd->add_option("--seed", sweep_o.seed, "Root seed")->capture_default_str();
    sweep_cmd->add_option("--parallel", sweep_o.parallel, "Worker threads (0 = all cores)")->capture_default_str();
    sweep_cmd->add_option("--grid-tau", sweep_o.grid_tau, "Grid search: tau values")->delimiter(',');
    sweep_cmd->add_option("--grid-min-obs", sweep_o.grid_min_obs, "Grid search: min-obs values")->delimiter(',');
    sweep_cmd->add_option("--grid-lambda", sweep_o.grid_lambda, "Grid search: lambda values")->delimiter(',');
    sweep_cmd->add_option("--out", sweep_o.out, "Aggregate CSV (default: standard output)");
    sweep_cmd->add_option("--trials-out", sweep_o.trials_out, "Per-trial long-format CSV");
    sweep_cmd->add_option("--failures-out", sweep_o.failures_out, "CSV of failed cells");

    GenOptions gen_o;
    auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic JSON-lines dataset");
    gen_cmd->add_option("--arms", gen_o.arms, "Sub-queries per request")->capture_default_str();
    gen_cmd->add_option("--docs", gen_o.docs, "Documents per sub-query")->capture_default_str();
    gen_cmd->add_option("--hot-arm", gen_o.hot, "Relevance probability of the first arm")->capture_default_str();
    gen_cmd->add_option("--cold", gen_o.cold, "Relevance probability of the other arms")->capture_default_str();
    gen_cmd->add_option("--rel-probs", gen_o.rel_probs, "Per-arm relevance probabilities")->delimiter(',');
    gen_cmd->add_option("--rank-decay", gen_o.rank_decay, "Relevance multiplier per rank step")->capture_default_str();
    gen_cmd->add_option("--embed-dim", gen_o.embed_dim, "Embedding dimension (0 = none)")->capture_default_str();
    gen_cmd->add_option("--redundancy", gen_o.redundancy, "Probability of duplicating an earlier embedding")->capture_default_str();
    gen_cmd->add_option("--score-noise", gen_o.score_noise, "Score noise standard deviation")->capture_default_str();
    gen_cmd->add_option("--headers", gen_o.headers, "Hierarchy: root sub-queries (0 = flat)")->capture_default_str();
    gen_cmd->add_option("--children", gen_o.children, "Hierarchy: children per header")->capture_default_str();
    gen_cmd->add_option("--branch-probs", gen_o.branch_probs, "Hierarchy: per-header relevance probabilities")->delimiter(',');
    gen_cmd->add_option("--count", gen_o.count, "Instances to generate")->capture_default_str();
    gen_cmd->add_option("--seed", gen_o.seed, "Generator seed")->capture_default_str();
    gen_cmd->add_option("--out", gen_o.out, "Output file (default: standard output)");

    OracleOptions oracle_o;
    auto* oracle_cmd = app.add_subcommand("oracle", "Exact prefix-allocation optimum per instance and budget");
    add_data_options(*oracle_cmd, oracle_o.data);
    oracle_cmd->add_option("--budget", oracle_o.budgets, "Budget fraction(s)")->delimiter(',');
    oracle_cmd->add_option("--budget-steps", oracle_o.budget_steps, "Absolute budget in pulls");
    oracle_cmd->add_option("--seed", oracle_o.seed, "Accepted for uniformity; the oracle is deterministic");
    oracle_cmd->add_option("--out", oracle_o.out, "Output file (default: standard output)");

    ValidateOptions validate_o;
    auto* validate_cmd = app.add_subcommand("validate", "Report every invariant violation in an instance file");
    validate_cmd->add_option("--data", validate_o.data, "Instance file (JSON lines)")->required();
    validate_cmd->add_flag("--permissive", validate_o.permissive, "Do not report unjudged documents");
    validate_cmd->add_option("--seed", validate_o.seed, "Accepted for uniformity");

    RegressOptions regress_o;
    auto* regress_cmd = app.add_subcommand("regress", "OLS of relevance on rank per request");
    add_data_options(*regress_cmd, regress_o.data);
    regress_cmd->add_option("--seed", regress_o.seed, "Accepted for uniformity");
    regress_cmd->add_option("--out", regress_o.out, "Output file (default: standard output)");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return ok;
        }
        err << "qdb: " << e.what() << '\n';
        return failure;
    }

    try {
        if (*run_cmd) return cmd_run(run_o, out);
        if (*sweep_cmd) return cmd_sweep(sweep_o, out, err);
        if (*gen_cmd) return cmd_gen(gen_o, out);
        if (*oracle_cmd) return cmd_oracle(oracle_o, out);
        if (*validate_cmd) return cmd_validate(validate_o, out, err);
        if (*regress_cmd) return cmd_regress(regress_o, out, err);
    } catch (const Error& e) {
        err << "qdb: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "qdb: " << e.what() << '\n';
        return failure;
    }
    return failure;
}

}  // namespace qdb::cli
