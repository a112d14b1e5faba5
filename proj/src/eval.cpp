#include "qdb/eval.hpp"

#include <cmath>
#include <limits>

#include "qdb/error.hpp"

namespace qdb {

namespace {

std::vector<std::size_t> unique_docs_in_order(const ObservationLog& log, const Environment& env) {
    std::vector<bool> seen(env.doc_count(), false);
    std::vector<std::size_t> out;
    for (const auto& o : log.observations) {
        if (!seen[o.doc_index]) {
            seen[o.doc_index] = true;
            out.push_back(o.doc_index);
        }
    }
    return out;
}

std::size_t count_relevant(const std::vector<std::size_t>& docs, const Environment& env) {
    std::size_t n = 0;
    for (std::size_t d : docs) n += env.relevance(d) == 1 ? 1 : 0;
    return n;
}

double doc_gain(const Environment& env, std::size_t doc, const std::vector<std::size_t>& nugget_seen, double alpha) {
    double g = 0.0;
    for (std::size_t nug : env.doc_nuggets(doc)) g += std::pow(1.0 - alpha, static_cast<double>(nugget_seen[nug]));
    return g;
}

}  // namespace

double precision(const ObservationLog& log, const Environment& env) {
    if (log.empty()) throw Error(ErrorCode::undefined_metric, "precision of an empty log");
    const auto docs = unique_docs_in_order(log, env);
    return static_cast<double>(count_relevant(docs, env)) / static_cast<double>(docs.size());
}

double recall(const ObservationLog& log, const Environment& env) {
    if (env.relevant_doc_count() == 0) {
        throw Error(ErrorCode::undefined_metric, "request '" + env.request_id() + "' has no relevant document");
    }
    const auto docs = unique_docs_in_order(log, env);
    return static_cast<double>(count_relevant(docs, env)) / static_cast<double>(env.relevant_doc_count());
}

double alpha_ndcg(const ObservationLog& log, const Environment& env, double alpha, int cutoff) {
    if (!env.has_nuggets()) {
        throw Error(ErrorCode::metric_unavailable, "request '" + env.request_id() + "' has no nugget assignments");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::invalid_argument, "alpha must lie in [0, 1]");
    if (cutoff < 1) throw Error(ErrorCode::invalid_argument, "cutoff must be >= 1");
    const auto depth = static_cast<std::size_t>(cutoff);

    const auto observed = unique_docs_in_order(log, env);
    std::vector<std::size_t> counts(env.nugget_count(), 0);
    double dcg = 0.0;
    for (std::size_t i = 0; i < observed.size() && i < depth; ++i) {
        dcg += doc_gain(env, observed[i], counts, alpha) / std::log2(static_cast<double>(i) + 2.0);
        for (std::size_t nug : env.doc_nuggets(observed[i])) ++counts[nug];
    }

    std::fill(counts.begin(), counts.end(), 0);
    std::vector<bool> used(env.doc_count(), false);
    double ideal = 0.0;
    for (std::size_t i = 0; i < depth && i < env.doc_count(); ++i) {
        std::size_t best = env.doc_count();
        double best_gain = -1.0;
        for (std::size_t d = 0; d < env.doc_count(); ++d) {
            if (used[d]) continue;
            const double g = doc_gain(env, d, counts, alpha);
            if (g > best_gain) {
                best_gain = g;
                best = d;
            }
        }
        if (best_gain <= 0.0) break;
        used[best] = true;
        ideal += best_gain / std::log2(static_cast<double>(i) + 2.0);
        for (std::size_t nug : env.doc_nuggets(best)) ++counts[nug];
    }
    if (!(ideal > 0.0)) {
        throw Error(ErrorCode::undefined_metric, "request '" + env.request_id() + "' has no nugget-bearing document");
    }
    return std::min(1.0, dcg / ideal);
}

MetricReport evaluate(const ObservationLog& log, const Environment& env, double alpha, std::span<const int> cutoffs) {
    MetricReport m;
    const auto docs = unique_docs_in_order(log, env);
    m.unique_observed = docs.size();
    m.relevant_found = count_relevant(docs, env);
    m.precision = precision(log, env);
    if (env.relevant_doc_count() > 0) m.recall = recall(log, env);
    if (env.has_nuggets()) {
        for (int k : cutoffs) {
            try {
                m.alpha_ndcg[k] = alpha_ndcg(log, env, alpha, k);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::undefined_metric) throw;
            }
        }
    }
    return m;
}

Regression rank_relevance_regression(const Environment& env) {
    std::size_t n = 0;
    for (std::size_t a = 0; a < env.arm_count(); ++a) n += env.arm_size(a);
    Vector x(static_cast<Eigen::Index>(n));
    Vector y(static_cast<Eigen::Index>(n));
    Eigen::Index i = 0;
    for (std::size_t a = 0; a < env.arm_count(); ++a) {
        for (std::size_t r = 0; r < env.arm_size(a); ++r, ++i) {
            x[i] = static_cast<double>(r);
            y[i] = env.relevance(env.doc_at(a, r));
        }
    }
    if (n < 2) throw Error(ErrorCode::undefined_regression, "fewer than two ranked documents");
    const double mx = x.mean();
    const double my = y.mean();
    const Vector dx = x.array() - mx;
    const double sxx = dx.squaredNorm();
    if (!(sxx > 0.0)) throw Error(ErrorCode::undefined_regression, "all documents share one rank");
    const double sxy = dx.dot((y.array() - my).matrix());
    Regression fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

OracleResult oracle_offline(const Environment& env, std::size_t budget_steps) {
    const std::size_t k = env.arm_count();
    const std::size_t budget = std::min(budget_steps, env.total_documents());
    constexpr long long kInfeasible = std::numeric_limits<long long>::min() / 4;

    // best[i][b]: most relevant pulls using exactly b pulls from arms [0, i).
    std::vector<std::vector<long long>> best(k + 1, std::vector<long long>(budget + 1, kInfeasible));
    std::vector<std::vector<std::size_t>> take(k + 1, std::vector<std::size_t>(budget + 1, 0));
    best[0][0] = 0;
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<long long> prefix(env.arm_size(i) + 1, 0);
        for (std::size_t r = 0; r < env.arm_size(i); ++r) prefix[r + 1] = prefix[r] + env.relevance(env.doc_at(i, r));
        for (std::size_t b = 0; b <= budget; ++b) {
            const std::size_t max_len = std::min(env.arm_size(i), b);
            for (std::size_t len = 0; len <= max_len; ++len) {
                const long long prev = best[i][b - len];
                if (prev == kInfeasible) continue;
                const long long value = prev + prefix[len];
                if (value > best[i + 1][b]) {
                    best[i + 1][b] = value;
                    take[i + 1][b] = len;
                }
            }
        }
    }

    OracleResult out;
    out.best_relevant_count = k == 0 ? 0 : static_cast<std::size_t>(std::max(best[k][budget], 0LL));
    out.prefix_lengths.resize(k);
    std::size_t b = budget;
    for (std::size_t i = k; i > 0; --i) {
        const std::size_t len = take[i][b];
        out.prefix_lengths[i - 1] = {env.arm_id(i - 1), len};
        b -= len;
    }
    return out;
}

std::size_t relevant_pulls(const ObservationLog& log) noexcept {
    std::size_t n = 0;
    for (const auto& o : log.observations) n += o.relevance == 1 ? 1 : 0;
    return n;
}

long long regret(const ObservationLog& log, const OracleResult& oracle) noexcept {
    return static_cast<long long>(oracle.best_relevant_count) - static_cast<long long>(relevant_pulls(log));
}

}  // namespace qdb
