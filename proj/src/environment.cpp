#include "qdb/environment.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <unordered_set>

#include "qdb/embedding.hpp"
#include "qdb/error.hpp"

namespace qdb {

std::string_view to_string(Violation::Kind kind) noexcept {
    using K = Violation::Kind;
    switch (kind) {
        case K::empty_doc_id: return "empty-doc-id";
        case K::non_finite_score: return "non-finite-score";
        case K::duplicate_subquery: return "duplicate-subquery";
        case K::duplicate_doc: return "duplicate-doc";
        case K::unknown_parent: return "unknown-parent";
        case K::parent_cycle: return "parent-cycle";
        case K::missing_judgment: return "missing-judgment";
        case K::invalid_judgment: return "invalid-judgment";
        case K::empty_embedding: return "empty-embedding";
        case K::embedding_dimension: return "embedding-dimension";
    }
    return "unknown";
}

namespace {

void push(std::vector<Violation>& out, Violation::Kind kind, std::string msg) {
    out.push_back(Violation{kind, std::move(msg)});
}

// Reports each parent cycle once, naming its members in walk order.
void check_cycles(const RequestInstance& inst, const std::unordered_map<std::string, std::size_t>& ids,
                  std::vector<Violation>& out) {
    const std::size_t n = inst.subqueries.size();
    enum class Mark { unvisited, on_path, done };
    std::vector<Mark> mark(n, Mark::unvisited);
    for (std::size_t start = 0; start < n; ++start) {
        std::vector<std::size_t> path;
        std::size_t cur = start;
        while (true) {
            if (mark[cur] == Mark::done) break;
            if (mark[cur] == Mark::on_path) {
                std::ostringstream msg;
                msg << "parent cycle:";
                bool in_cycle = false;
                for (std::size_t p : path) {
                    in_cycle = in_cycle || p == cur;
                    if (in_cycle) msg << ' ' << inst.subqueries[p].sq_id;
                }
                push(out, Violation::Kind::parent_cycle, msg.str());
                break;
            }
            mark[cur] = Mark::on_path;
            path.push_back(cur);
            const auto& parent = inst.subqueries[cur].parent_id;
            if (!parent) break;
            auto it = ids.find(*parent);
            if (it == ids.end()) break;
            cur = it->second;
        }
        for (std::size_t p : path) mark[p] = Mark::done;
    }
}

}  // namespace

std::vector<Violation> validate_instance(const RequestInstance& inst, bool permissive) {
    std::vector<Violation> out;
    std::unordered_map<std::string, std::size_t> ids;
    for (std::size_t i = 0; i < inst.subqueries.size(); ++i) {
        const auto& sq = inst.subqueries[i];
        if (!ids.emplace(sq.sq_id, i).second) {
            push(out, Violation::Kind::duplicate_subquery, "duplicate sub-query id '" + sq.sq_id + "'");
        }
    }
    std::set<std::string> reported_missing;
    for (const auto& sq : inst.subqueries) {
        std::unordered_set<std::string> seen;
        for (std::size_t r = 0; r < sq.ranking.size(); ++r) {
            const auto& d = sq.ranking[r];
            if (d.doc_id.empty()) {
                push(out, Violation::Kind::empty_doc_id,
                     "sub-query '" + sq.sq_id + "' rank " + std::to_string(r) + " has an empty doc id");
                continue;
            }
            if (!std::isfinite(d.score)) {
                push(out, Violation::Kind::non_finite_score,
                     "doc '" + d.doc_id + "' in sub-query '" + sq.sq_id + "' has a non-finite score");
            }
            if (!seen.insert(d.doc_id).second) {
                push(out, Violation::Kind::duplicate_doc,
                     "doc '" + d.doc_id + "' repeated in sub-query '" + sq.sq_id + "'");
            }
            if (!permissive && !inst.judgments.count(d.doc_id) && reported_missing.insert(d.doc_id).second) {
                push(out, Violation::Kind::missing_judgment, "doc '" + d.doc_id + "' has no judgment");
            }
        }
        if (sq.parent_id && !ids.count(*sq.parent_id)) {
            push(out, Violation::Kind::unknown_parent,
                 "sub-query '" + sq.sq_id + "' names unknown parent '" + *sq.parent_id + "'");
        }
    }
    check_cycles(inst, ids, out);
    for (const auto& [doc, rel] : inst.judgments) {
        if (rel != 0 && rel != 1) {
            push(out, Violation::Kind::invalid_judgment,
                 "doc '" + doc + "' judged " + std::to_string(rel) + ", expected 0 or 1");
        }
    }
    if (inst.embeddings) {
        std::optional<std::size_t> dim;
        for (const auto& [doc, vec] : *inst.embeddings) {
            if (vec.empty()) {
                push(out, Violation::Kind::empty_embedding, "doc '" + doc + "' has an empty embedding");
                continue;
            }
            if (!dim) dim = vec.size();
            if (vec.size() != *dim) {
                push(out, Violation::Kind::embedding_dimension,
                     "doc '" + doc + "' embedding has dimension " + std::to_string(vec.size()) + ", expected " +
                         std::to_string(*dim));
            }
        }
    }
    return out;
}

Environment::Environment(RequestInstance instance, EnvironmentOptions options)
    : instance_(std::move(instance)), options_(options) {
    const auto violations = validate_instance(instance_, options_.permissive);
    if (!violations.empty()) {
        std::ostringstream msg;
        msg << "request '" << instance_.request_id << "': " << violations.size() << " violation(s); first: "
            << violations.front().message;
        throw Error(ErrorCode::invalid_instance, msg.str());
    }

    const std::size_t k = instance_.subqueries.size();
    arms_.resize(k);
    std::vector<const std::string*> doc_text;
    for (std::size_t a = 0; a < k; ++a) {
        const auto& sq = instance_.subqueries[a];
        arm_lookup_.emplace(sq.sq_id, a);
        auto& arm = arms_[a];
        arm.docs.reserve(sq.ranking.size());
        arm.scores.resize(static_cast<Eigen::Index>(sq.ranking.size()));
        for (std::size_t r = 0; r < sq.ranking.size(); ++r) {
            const auto& d = sq.ranking[r];
            auto [it, inserted] = doc_lookup_.emplace(d.doc_id, doc_ids_.size());
            if (inserted) {
                doc_ids_.push_back(d.doc_id);
                doc_text.push_back(nullptr);
                auto j = instance_.judgments.find(d.doc_id);
                relevance_.push_back(j == instance_.judgments.end() ? 0 : j->second);
            }
            if (d.text && !d.text->empty() && !doc_text[it->second]) doc_text[it->second] = &*d.text;
            arm.docs.push_back(it->second);
            arm.scores[static_cast<Eigen::Index>(r)] = d.score;
        }
        total_documents_ += sq.ranking.size();
    }
    for (std::size_t a = 0; a < k; ++a) {
        const auto& parent = instance_.subqueries[a].parent_id;
        if (!parent) continue;
        const std::size_t p = arm_lookup_.at(*parent);
        arms_[a].parent = p;
        arms_[p].children.push_back(a);
    }
    for (int rel : relevance_) relevant_docs_ += rel == 1 ? 1 : 0;

    // Embeddings: instance-provided rows first, hashed text for the rest when allowed.
    const auto n_docs = static_cast<Eigen::Index>(doc_ids_.size());
    std::optional<int> dim;
    if (instance_.embeddings && !instance_.embeddings->empty()) {
        dim = static_cast<int>(instance_.embeddings->begin()->second.size());
    } else if (options_.embed_fallback) {
        dim = options_.embed_dim;
    }
    if (dim) {
        embeddings_ = Matrix::Zero(n_docs, *dim);
        bool complete = true;
        for (Eigen::Index d = 0; d < n_docs; ++d) {
            const std::string& id = doc_ids_[static_cast<std::size_t>(d)];
            const std::vector<double>* given = nullptr;
            if (instance_.embeddings) {
                auto it = instance_.embeddings->find(id);
                if (it != instance_.embeddings->end()) given = &it->second;
            }
            if (given) {
                embeddings_.row(d) = Eigen::Map<const Vector>(given->data(), *dim).transpose();
            } else if (options_.embed_fallback) {
                const std::string* text = doc_text[static_cast<std::size_t>(d)];
                embeddings_.row(d) = fallback_embed(text ? std::string_view(*text) : std::string_view(), *dim).transpose();
            } else {
                complete = false;
            }
        }
        for (Eigen::Index d = 0; d < n_docs; ++d) {
            const double n = embeddings_.row(d).norm();
            if (n > 0.0) embeddings_.row(d) /= n;  // zero rows stay zero
        }
        embeddings_ready_ = complete;
    }

    nuggets_.assign(doc_ids_.size(), {});
    if (instance_.nuggets) {
        std::map<std::string, std::size_t> nugget_ids;
        for (std::size_t d = 0; d < doc_ids_.size(); ++d) {
            auto it = instance_.nuggets->find(doc_ids_[d]);
            if (it == instance_.nuggets->end()) continue;
            for (const auto& nug : it->second) {
                auto [nit, inserted] = nugget_ids.emplace(nug, nugget_ids.size());
                nuggets_[d].push_back(nit->second);
            }
        }
        nugget_count_ = nugget_ids.size();
    }
}

std::size_t Environment::arm_index(std::string_view sq_id) const {
    auto it = arm_lookup_.find(std::string(sq_id));
    if (it == arm_lookup_.end()) throw Error(ErrorCode::invalid_argument, "unknown sub-query '" + std::string(sq_id) + "'");
    return it->second;
}

std::optional<std::size_t> Environment::find_doc(std::string_view doc_id) const {
    auto it = doc_lookup_.find(std::string(doc_id));
    if (it == doc_lookup_.end()) return std::nullopt;
    return it->second;
}

int Environment::relevance(std::string_view doc_id) const {
    const std::string key(doc_id);
    auto it = instance_.judgments.find(key);
    if (it != instance_.judgments.end()) return it->second;
    if (options_.permissive) return 0;
    throw Error(ErrorCode::missing_judgment, "doc '" + key + "' has no judgment");
}

const Matrix& Environment::embeddings() const {
    if (!embeddings_ready_) {
        throw Error(ErrorCode::missing_embedding,
                    "request '" + instance_.request_id + "' lacks embeddings and fallback embedding is disabled");
    }
    return embeddings_;
}

std::optional<std::size_t> next_unobserved_rank(const Environment& env, std::size_t arm, const ObservationLog& log) {
    const std::size_t n = env.arm_size(arm);
    std::vector<bool> seen(n, false);
    for (const auto& o : log.observations) {
        if (o.arm_index == arm && o.rank < n) seen[o.rank] = true;
    }
    for (std::size_t r = 0; r < n; ++r) {
        if (!seen[r]) return r;
    }
    return std::nullopt;
}

std::size_t budget_to_steps(double fraction, std::size_t total_documents) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, "budget fraction must lie in (0, 1], got " + std::to_string(fraction));
    }
    if (total_documents == 0) throw Error(ErrorCode::invalid_argument, "instance has no documents");
    // Guard against 0.3 * 10 landing at 2.999... before the floor.
    const double raw = fraction * static_cast<double>(total_documents);
    auto steps = static_cast<std::size_t>(std::floor(raw + 1e-9));
    return std::max<std::size_t>(steps, 1);
}

std::size_t budget_to_steps(double fraction, const Environment& env) {
    return budget_to_steps(fraction, env.total_documents());
}

}  // namespace qdb
