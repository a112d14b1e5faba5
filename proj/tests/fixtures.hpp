#pragma once

#include <cstdint>
#include <filesystem>
#include <unistd.h>
#include <random>
#include <string>
#include <vector>

#include "qdb/environment.hpp"
#include "qdb/types.hpp"

namespace qdb::test {

/// One arm per pattern; doc "<arm>-<rank>" judged by the pattern entry.
inline RequestInstance from_patterns(const std::vector<std::vector<int>>& patterns, std::string request_id = "req") {
    RequestInstance inst;
    inst.request_id = std::move(request_id);
    for (std::size_t a = 0; a < patterns.size(); ++a) {
        SubQuery sq;
        sq.sq_id = "a" + std::to_string(a + 1);
        for (std::size_t r = 0; r < patterns[a].size(); ++r) {
            DocumentRef d;
            d.doc_id = sq.sq_id + "-" + std::to_string(r);
            d.score = static_cast<double>(patterns[a].size() - r);
            inst.judgments[d.doc_id] = patterns[a][r];
            sq.ranking.push_back(d);
        }
        inst.subqueries.push_back(std::move(sq));
    }
    return inst;
}

inline Environment env_from_patterns(const std::vector<std::vector<int>>& patterns) {
    return Environment(from_patterns(patterns));
}

/// Random 0/1 patterns with K arms of random length in [1, max_n].
inline std::vector<std::vector<int>> random_patterns(std::mt19937_64& gen, std::size_t max_k, std::size_t max_n,
                                                     double p = 0.5) {
    std::uniform_int_distribution<std::size_t> k_dist(1, max_k), n_dist(1, max_n);
    std::bernoulli_distribution rel(p);
    std::vector<std::vector<int>> out(k_dist(gen));
    for (auto& arm : out) {
        arm.resize(n_dist(gen));
        for (int& r : arm) r = rel(gen) ? 1 : 0;
    }
    return out;
}

/// Attach embeddings (one row per doc id, in the order given).
inline void set_embeddings(RequestInstance& inst, const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
    auto& e = inst.embeddings.emplace();
    for (const auto& [doc, v] : rows) e[doc] = v;
}

inline std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("qdb_test_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace qdb::test
