#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qdb/types.hpp"

namespace qdb {

struct EnvironmentOptions {
    bool permissive = false;      // unjudged documents default to relevance 0
    bool embed_fallback = false;  // hash missing embeddings from document text
    int embed_dim = 64;           // fallback dimension when the instance has no embeddings
};

struct Violation {
    enum class Kind {
        empty_doc_id,
        non_finite_score,
        duplicate_subquery,
        duplicate_doc,
        unknown_parent,
        parent_cycle,
        missing_judgment,
        invalid_judgment,
        empty_embedding,
        embedding_dimension,
    };
    Kind kind;
    std::string message;
};

std::string_view to_string(Violation::Kind kind) noexcept;

/// Every invariant violation in the instance; an empty result means loadable.
/// Missing judgments are only reported when `permissive` is false.
std::vector<Violation> validate_instance(const RequestInstance& instance, bool permissive = false);

/// Immutable, index-based view of a validated RequestInstance shared by all
/// policies, rewards and metrics. Documents are deduplicated by doc_id; arms
/// keep their declaration order.
class Environment {
public:
    explicit Environment(RequestInstance instance, EnvironmentOptions options = {});

    const RequestInstance& instance() const noexcept { return instance_; }
    const EnvironmentOptions& options() const noexcept { return options_; }
    const std::string& request_id() const noexcept { return instance_.request_id; }

    std::size_t arm_count() const noexcept { return arms_.size(); }
    const SubQuery& arm(std::size_t a) const { return instance_.subqueries.at(a); }
    const std::string& arm_id(std::size_t a) const { return instance_.subqueries.at(a).sq_id; }
    std::size_t arm_index(std::string_view sq_id) const;
    std::size_t arm_size(std::size_t a) const { return arms_.at(a).docs.size(); }
    std::size_t doc_at(std::size_t a, std::size_t rank) const { return arms_.at(a).docs.at(rank); }
    const Vector& arm_scores(std::size_t a) const { return arms_.at(a).scores; }

    std::optional<std::size_t> parent(std::size_t a) const { return arms_.at(a).parent; }
    const std::vector<std::size_t>& children(std::size_t a) const { return arms_.at(a).children; }

    /// Sum of ranking lengths over all arms (the retrieved pool, duplicates included).
    std::size_t total_documents() const noexcept { return total_documents_; }
    std::size_t doc_count() const noexcept { return doc_ids_.size(); }
    const std::string& doc_id(std::size_t doc) const { return doc_ids_.at(doc); }
    std::optional<std::size_t> find_doc(std::string_view doc_id) const;

    int relevance(std::size_t doc) const { return relevance_.at(doc); }
    /// Judgment lookup by id; unknown ids raise missing-judgment unless permissive.
    int relevance(std::string_view doc_id) const;
    std::size_t relevant_doc_count() const noexcept { return relevant_docs_; }

    bool has_embeddings() const noexcept { return embeddings_ready_; }
    /// Unit-normalised rows, one per document; zero rows stand for empty vectors.
    const Matrix& embeddings() const;

    bool has_nuggets() const noexcept { return instance_.nuggets.has_value(); }
    const std::vector<std::size_t>& doc_nuggets(std::size_t doc) const { return nuggets_.at(doc); }
    std::size_t nugget_count() const noexcept { return nugget_count_; }

private:
    struct ArmIndex {
        std::vector<std::size_t> docs;
        Vector scores;
        std::optional<std::size_t> parent;
        std::vector<std::size_t> children;
    };

    RequestInstance instance_;
    EnvironmentOptions options_;
    std::vector<ArmIndex> arms_;
    std::unordered_map<std::string, std::size_t> arm_lookup_;
    std::vector<std::string> doc_ids_;
    std::unordered_map<std::string, std::size_t> doc_lookup_;
    std::vector<int> relevance_;
    std::size_t relevant_docs_ = 0;
    std::size_t total_documents_ = 0;
    Matrix embeddings_;
    bool embeddings_ready_ = false;
    std::vector<std::vector<std::size_t>> nuggets_;
    std::size_t nugget_count_ = 0;
};

/// Smallest 0-based rank of `arm` absent from the log, or nullopt when exhausted.
std::optional<std::size_t> next_unobserved_rank(const Environment& env, std::size_t arm,
                                                const ObservationLog& log);

/// floor(fraction * total documents), at least 1.
std::size_t budget_to_steps(double fraction, std::size_t total_documents);
std::size_t budget_to_steps(double fraction, const Environment& env);

}  // namespace qdb
