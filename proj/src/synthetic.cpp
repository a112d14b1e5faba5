#include "qdb/synthetic.hpp"

#include <cmath>

#include "qdb/error.hpp"
#include "qdb/rng.hpp"

namespace qdb {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

struct Node {
    std::string id;
    std::optional<std::string> parent;
    double prob;
};

std::vector<Node> layout(const SyntheticSpec& spec) {
    std::vector<Node> nodes;
    if (spec.hierarchy) {
        const auto& h = *spec.hierarchy;
        for (std::size_t i = 0; i < h.headers; ++i) nodes.push_back({"h" + std::to_string(i), std::nullopt, h.branch_probs[i]});
        for (std::size_t i = 0; i < h.headers; ++i) {
            for (std::size_t c = 0; c < h.children; ++c) {
                nodes.push_back({"h" + std::to_string(i) + ".c" + std::to_string(c), "h" + std::to_string(i),
                                 h.branch_probs[i]});
            }
        }
        return nodes;
    }
    for (std::size_t i = 0; i < spec.arms; ++i) {
        const double p = spec.rel_probs.size() == 1 ? spec.rel_probs[0] : spec.rel_probs[i];
        nodes.push_back({"q" + std::to_string(i), std::nullopt, p});
    }
    return nodes;
}

}  // namespace

void check_spec(const SyntheticSpec& spec) {
    auto bad = [](const std::string& m) { throw Error(ErrorCode::invalid_argument, m); };
    if (spec.docs < 1) bad("docs per arm must be >= 1");
    if (!(spec.rank_decay > 0.0 && spec.rank_decay <= 1.0)) bad("rank decay must lie in (0, 1]");
    if (!is_probability(spec.redundancy_rate)) bad("redundancy rate must lie in [0, 1]");
    if (spec.embed_dim < 0) bad("embedding dimension must be >= 0");
    if (!(spec.score_noise >= 0.0)) bad("score noise must be >= 0");
    if (spec.hierarchy) {
        const auto& h = *spec.hierarchy;
        if (h.headers < 1) bad("hierarchy needs at least one header");
        if (h.branch_probs.size() != h.headers) bad("hierarchy needs one branch probability per header");
        for (double p : h.branch_probs) {
            if (!is_probability(p)) bad("branch probabilities must lie in [0, 1]");
        }
        return;
    }
    if (spec.arms < 1) bad("arms must be >= 1");
    if (spec.rel_probs.size() != 1 && spec.rel_probs.size() != spec.arms) {
        bad("rel_probs must hold one value or one per arm");
    }
    for (double p : spec.rel_probs) {
        if (!is_probability(p)) bad("relevance probabilities must lie in [0, 1]");
    }
}

RequestInstance generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
    check_spec(spec);
    Rng rng(mix64(seed));
    RequestInstance inst;
    inst.request_id = spec.request_id.empty() ? "syn-" + std::to_string(seed) : spec.request_id;
    inst.request_text = "synthetic request " + inst.request_id;
    if (spec.embed_dim > 0) inst.embeddings.emplace();
    inst.nuggets.emplace();

    std::vector<std::string> generated;       // doc ids in generation order
    std::vector<std::size_t> source_of;       // embedding source (root of the duplicate chain)
    for (const Node& node : layout(spec)) {
        SubQuery sq;
        sq.sq_id = node.id;
        sq.parent_id = node.parent;
        sq.text = "synthetic sub-query " + node.id;
        for (std::size_t j = 0; j < spec.docs; ++j) {
            const double p = node.prob * std::pow(spec.rank_decay, static_cast<double>(j));
            const bool relevant = rng.bernoulli(p);
            const double score = p + spec.score_noise * rng.normal();
            DocumentRef d;
            d.doc_id = inst.request_id + ":" + node.id + ":" + std::to_string(j);
            d.score = score;
            inst.judgments[d.doc_id] = relevant ? 1 : 0;

            std::size_t source = generated.size();
            if (!generated.empty() && rng.bernoulli(spec.redundancy_rate)) {
                source = source_of[rng.uniform_index(generated.size())];
            }
            if (spec.embed_dim > 0) {
                if (source == generated.size()) {
                    std::vector<double> v(static_cast<std::size_t>(spec.embed_dim));
                    double norm = 0.0;
                    for (double& x : v) {
                        x = rng.normal();
                        norm += x * x;
                    }
                    norm = std::sqrt(norm);
                    for (double& x : v) x /= norm;
                    (*inst.embeddings)[d.doc_id] = std::move(v);
                } else {
                    (*inst.embeddings)[d.doc_id] = inst.embeddings->at(generated[source]);
                }
            }
            if (relevant) (*inst.nuggets)[d.doc_id] = {"n:" + (source == generated.size() ? d.doc_id : generated[source])};
            source_of.push_back(source);
            generated.push_back(d.doc_id);
            sq.ranking.push_back(std::move(d));
        }
        inst.subqueries.push_back(std::move(sq));
    }
    return inst;
}

SyntheticSpec hot_cold_spec(double hot, double cold, std::size_t arms, std::size_t docs) {
    SyntheticSpec spec;
    spec.arms = arms;
    spec.docs = docs;
    spec.rel_probs.assign(arms, cold);
    if (arms > 0) spec.rel_probs[0] = hot;
    return spec;
}

}  // namespace qdb
