#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "dmc/engine.hpp"

namespace dmc {

// One candidate history together with its recovered counts and the
// log-likelihood at that history's own closed-form maximizer.
struct DeconstructionResult {
    Theta theta;
    SufficientStats stats;
    double log_likelihood_at_mle = 0.0;
};

// Output of algorithms that visit several histories: the best one plus the
// full list, which downstream estimators consume as an ensemble.
struct MultiResult {
    DeconstructionResult best;
    std::vector<DeconstructionResult> all;
};

struct NkConfig {
    std::vector<Params> initial_grid;  // defaults to {1/5,...,4/5}^2
    int refinement_base = 5;
    int extra_rounds = 0;              // 1 for the NK+1 variant
    int max_rounds = 50;
    double tol = 1e-12;
};

// Thrown when exhaustive search is asked to enumerate past its node cap.
struct ExhaustiveCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Deconstructs along the recorded generation history.
DeconstructionResult true_theta(const Graph& g, const Theta& recorded);

// Removal follows the true arrival order reversed; each anchor is drawn
// uniformly from the nodes still present, excluding the removed node.
DeconstructionResult true_new_random_anchor(const Graph& g, const Theta& recorded,
                                            std::uint64_t seed);

// Greedy deconstruction choosing the pair with maximal per-pair
// log-likelihood at fixed parameters; ties broken uniformly at random.
DeconstructionResult nk_greedy(const Graph& g, const ScoreParams& params_init,
                               std::uint64_t seed, bool full_rescan = false);

// Repeated nk_greedy over finer and finer grids of initial values, stopping
// when the best log-likelihood no longer strictly increases.
MultiResult nk_grid_search(const Graph& g, const NkConfig& config, std::uint64_t seed);

// Parameter-free greedy: selects the pair with minimal Y(u,v); ties broken
// uniformly at random.
DeconstructionResult minimize_y(const Graph& g, std::uint64_t seed, bool full_rescan = false);

// minimize_y, then nk_greedy seeded with its estimates, feeding each round's
// estimates back until the best log-likelihood stops strictly increasing.
MultiResult minimize_y_then_nk(const Graph& g, std::uint64_t seed);

// Independent runs that pick a uniformly random pair at every step.
std::vector<DeconstructionResult> random_sequences(const Graph& g, int count,
                                                   std::uint64_t seed);

// Depth-first enumeration of all pair sequences (with undo); throws
// ExhaustiveCapExceeded when node_count > cap.
std::vector<DeconstructionResult> exhaustive(const Graph& g, int cap = 8);
void exhaustive_visit(const Graph& g, int cap,
                      const std::function<void(const DeconstructionResult&)>& visit);

}  // namespace dmc
