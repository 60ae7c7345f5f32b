#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dmc/reconstruction.hpp"

namespace dmc {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct Estimate {
    std::optional<double> q_m_hat;
    double q_c_hat = 0.0;
    double log_likelihood = 0.0;
    std::optional<Interval> ci_m;  // raw Wald bounds, not clamped to [0,1]
    std::optional<Interval> ci_c;
    std::string method_tag;
};

// Candidate histories for one graph, produced by a single algorithm.
struct ThetaEnsemble {
    std::vector<DeconstructionResult> results;
    std::string source;
};

// MLE at the argmax-likelihood history; ties broken by first occurrence.
Estimate max_likelihood_select(const ThetaEnsemble& ens);

// EM restricted to the ensemble. Responsibilities are computed with
// log-sum-exp; the restricted observed objective log sum_z L(z; q) is
// asserted nondecreasing every iteration. init must be interior to (0,1)
// in q_c (and in q_m when defined).
Estimate em_estimate(const ThetaEnsemble& ens, const ScoreParams& init,
                     double tol = 1e-8, int max_iter = 500);

// Likelihood-weighted averaging of the ensemble's counts at fixed
// parameters `at` (the max-likelihood estimates, per construction).
Estimate averaged_estimate(const ThetaEnsemble& ens, const ScoreParams& at);

// Fills in 95% Wald intervals; the q_m interval requires a defined q_m_hat
// and y_total > 0. Bounds are stored unclamped.
void wald_ci(Estimate& est, const SufficientStats& stats);

}  // namespace dmc
