#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "qdb/environment.hpp"
#include "qdb/posterior.hpp"

namespace qdb {

enum class HierarchyMode { serial, hierarchical };

std::string_view to_string(HierarchyMode mode) noexcept;
std::optional<HierarchyMode> parse_hierarchy_mode(std::string_view name) noexcept;

struct HierarchyParams {
    double tau = 0.77;          // informativeness threshold on the posterior mean
    std::size_t min_obs = 4;    // pulls required before a parent may expand
    double lambda = 0.91;       // inheritance factor on the parent's pseudo-counts
    HierarchyMode mode = HierarchyMode::serial;
    bool retire_parent = false;  // deactivate a parent once its children are live
};

void check_params(const HierarchyParams& params);

/// Arms live at the start of a trial: roots only when hierarchical, every
/// sub-query when serial. Throws no-arms for an instance without sub-queries.
std::vector<std::size_t> initial_active_set(const Environment& env, HierarchyMode mode);

bool should_expand(const BetaArm& arm, const HierarchyParams& params) noexcept;

/// Marks `parent` expanded and returns one active child arm per child with
/// prior Beta(lambda * alpha, lambda * beta). Throws already-expanded on reuse.
std::vector<BetaArm> expand(BetaArm& parent, std::size_t child_count, double lambda);

}  // namespace qdb
