#include "qdb/hierarchy.hpp"

#include "qdb/error.hpp"

namespace qdb {

std::string_view to_string(HierarchyMode mode) noexcept {
    return mode == HierarchyMode::serial ? "serial" : "hierarchical";
}

std::optional<HierarchyMode> parse_hierarchy_mode(std::string_view name) noexcept {
    if (name == "serial") return HierarchyMode::serial;
    if (name == "hierarchical") return HierarchyMode::hierarchical;
    return std::nullopt;
}

void check_params(const HierarchyParams& p) {
    if (!(p.tau > 0.0 && p.tau < 1.0)) throw Error(ErrorCode::invalid_argument, "tau must lie in (0, 1)");
    if (p.min_obs < 1) throw Error(ErrorCode::invalid_argument, "min-obs must be >= 1");
    if (!(p.lambda > 0.0 && p.lambda <= 1.0)) throw Error(ErrorCode::invalid_argument, "lambda must lie in (0, 1]");
}

std::vector<std::size_t> initial_active_set(const Environment& env, HierarchyMode mode) {
    if (env.arm_count() == 0) throw Error(ErrorCode::no_arms, "request '" + env.request_id() + "' has no sub-queries");
    std::vector<std::size_t> out;
    for (std::size_t a = 0; a < env.arm_count(); ++a) {
        if (mode == HierarchyMode::serial || !env.parent(a)) out.push_back(a);
    }
    return out;
}

bool should_expand(const BetaArm& arm, const HierarchyParams& params) noexcept {
    return arm.pulls >= params.min_obs && arm.mean() > params.tau;
}

std::vector<BetaArm> expand(BetaArm& parent, std::size_t child_count, double lambda) {
    if (parent.expanded) throw Error(ErrorCode::already_expanded, "arm was already expanded");
    parent.expanded = true;
    return std::vector<BetaArm>(child_count, BetaArm::with_prior(lambda * parent.alpha, lambda * parent.beta));
}

}  // namespace qdb
