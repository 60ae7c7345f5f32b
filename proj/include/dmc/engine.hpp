#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <vector>

#include "dmc/graph.hpp"

namespace dmc {

// Probability parameters of the growth model: q_m is the per-neighbor
// mutation probability, q_c the complementation probability.
struct Params {
    double q_m = 0.0;
    double q_c = 0.0;
};

// Like Params, but q_m may be undefined (it cannot be estimated from a
// history whose Y total is zero). Scoring with an undefined q_m uses the
// q_m-free likelihood factor only.
struct ScoreParams {
    std::optional<double> q_m;
    double q_c = 0.0;

    ScoreParams() = default;
    ScoreParams(std::optional<double> m, double c) : q_m(m), q_c(c) {}
    ScoreParams(const Params& p) : q_m(p.q_m), q_c(p.q_c) {}
};

// Arrival history: the order in which nodes entered the graph, and for each
// arrival after the first, the existing node it duplicated.
struct Theta {
    std::vector<NodeId> arrival_order;  // length n
    std::vector<NodeId> anchors;        // length n-1; anchors[i] anchored arrival_order[i+1]
};

// Counts recovered by one reverse step.
struct StepStats {
    int w = 0;  // 1 iff the new-anchor edge existed
    int x = 0;  // unmodified neighbors (intersection)
    int y = 0;  // original anchor degree (union)
};

// Counts accumulated over a full deconstruction of an n-node graph.
struct SufficientStats {
    long long w_total = 0;
    long long x_total = 0;
    long long y_total = 0;
    int n = 0;
};

// Bernoulli outcome counts recorded during forward generation, used to
// cross-check a true-history deconstruction.
struct ForwardTrace {
    long long complementation_successes = 0;
    long long modified_neighbors = 0;
    long long anchor_degree_total = 0;  // pre-mutation anchor degrees
};

struct Generated {
    Graph graph;
    Theta theta;
    ForwardTrace trace;
};

// Grows a graph from a single seed node to n nodes.
//
// Random draws, in order, for each arrival: (1) anchor index, uniform over
// existing nodes; then for each anchor neighbor in ascending id order
// (2) mutation Bernoulli(q_m) and, if modified, (3) a fair coin choosing
// which of the two edges is lost; finally (4) complementation Bernoulli(q_c).
Generated forward_generate(int n, const Params& params, std::uint64_t seed);

// (w, x, y) the reverse step would record for the unordered pair {u, v} in
// the current graph: neighborhoods exclude the pair nodes themselves and
// are taken after conceptual removal of the u-v edge.
StepStats pair_stats(const Graph& g, NodeId u, NodeId v);

// Inverts one growth step in place: removes the complementation edge if
// present, merges the pair's neighborhoods into the anchor, and deletes the
// new node. Returns the recovered step counts.
StepStats reverse_step(Graph& g, NodeId new_node, NodeId anchor);

// reverse_step with enough bookkeeping to undo it, for backtracking search.
struct ReverseUndo {
    NodeId new_node = 0;
    NodeId anchor = 0;
    StepStats stats;
    std::vector<NodeId> new_neighbors;     // neighbors of new_node after w-edge removal
    std::vector<NodeId> added_to_anchor;   // edges the merge created at the anchor
};
ReverseUndo reverse_step_undoable(Graph& g, NodeId new_node, NodeId anchor);
void undo_reverse_step(Graph& g, const ReverseUndo& undo);

// Throws std::invalid_argument if theta is not a valid history for g.
void validate_theta(const Graph& g, const Theta& theta);

// Applies reverse steps along theta in reverse arrival order, reducing the
// graph to a single node, and returns the summed counts.
SufficientStats deconstruct(Graph g, const Theta& theta);

// Log of L(q_m, q_c, theta) given the summed counts, with the 0*log(0) = 0
// convention; -inf when a positive count multiplies log(0).
double log_likelihood(const SufficientStats& stats, const ScoreParams& params);

// Per-pair log-likelihood used by greedy scoring (one step's counts).
double pair_log_likelihood(const StepStats& s, const ScoreParams& params);

// Closed-form maximizers: q_m undefined when y_total = 0.
struct MleResult {
    std::optional<double> q_m;
    double q_c = 0.0;
};
MleResult mle(const SufficientStats& stats);

// Number of distinguishable pair sequences, prod_{i=2}^{n} C(i,2).
boost::multiprecision::cpp_int theta_space_size(int n);

}  // namespace dmc
