#pragma once

#include <cstddef>

namespace qdb {

/// Beta posterior over an arm's expected reward. alpha0/beta0 remember the
/// prior the arm started from (1/1, or the inherited pseudo-counts).
struct BetaArm {
    double alpha = 1.0;
    double beta = 1.0;
    double alpha0 = 1.0;
    double beta0 = 1.0;
    std::size_t pulls = 0;
    bool active = false;
    bool expanded = false;

    static BetaArm with_prior(double a, double b, bool active = true) {
        BetaArm arm;
        arm.alpha = arm.alpha0 = a;
        arm.beta = arm.beta0 = b;
        arm.active = active;
        return arm;
    }

    double mean() const noexcept { return alpha / (alpha + beta); }

    /// `reward` must already be clamped to [0, 1].
    void update(double reward) noexcept {
        alpha += reward;
        beta += 1.0 - reward;
        ++pulls;
    }
};

/// Normal posterior with unit observation noise and a N(mu0, sigma0_sq) prior.
struct GaussianArm {
    double mu0 = 0.0;
    double sigma0_sq = 1.0;
    double reward_sum = 0.0;
    std::size_t pulls = 0;
    bool active = true;

    double variance() const noexcept { return 1.0 / (1.0 / sigma0_sq + static_cast<double>(pulls)); }
    double mean() const noexcept { return variance() * (mu0 / sigma0_sq + reward_sum); }

    void update(double reward) noexcept {
        reward_sum += reward;
        ++pulls;
    }
};

}  // namespace qdb
