#include "dmc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "dmc/rng.hpp"

namespace dmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// count * log(p) with the 0*log(0) = 0 convention.
double xlogp(double count, double p) {
    if (count == 0.0) return 0.0;
    if (p <= 0.0) return kNegInf;
    return count * std::log(p);
}

}  // namespace

Generated forward_generate(int n, const Params& params, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("forward_generate requires n >= 1");
    Generated out;
    Rng rng(seed);

    NodeId first = out.graph.add_node();
    out.theta.arrival_order.push_back(first);

    for (int i = 2; i <= n; ++i) {
        // Existing ids are dense 0..i-2 during generation.
        NodeId anchor = static_cast<NodeId>(rng.uniform_index(i - 1));
        NodeId fresh = out.graph.add_node();
        out.theta.arrival_order.push_back(fresh);
        out.theta.anchors.push_back(anchor);

        std::vector<NodeId> nbrs = out.graph.sorted_neighbors(anchor);
        out.trace.anchor_degree_total += static_cast<long long>(nbrs.size());
        for (NodeId nb : nbrs) out.graph.add_edge(fresh, nb);

        for (NodeId nb : nbrs) {
            if (rng.bernoulli(params.q_m)) {
                ++out.trace.modified_neighbors;
                if (rng.fair_coin()) {
                    out.graph.remove_edge(nb, anchor);
                } else {
                    out.graph.remove_edge(nb, fresh);
                }
            }
        }

        if (rng.bernoulli(params.q_c)) {
            out.graph.add_edge(fresh, anchor);
            ++out.trace.complementation_successes;
        }
    }
    return out;
}

StepStats pair_stats(const Graph& g, NodeId u, NodeId v) {
    if (u == v) throw std::invalid_argument("pair_stats requires distinct nodes");
    StepStats s;
    s.w = g.has_edge(u, v) ? 1 : 0;
    const auto& nu = g.neighbors(u);
    const auto& nv = g.neighbors(v);
    // Iterate the smaller set for the intersection.
    const auto& small = nu.size() <= nv.size() ? nu : nv;
    const auto& large = nu.size() <= nv.size() ? nv : nu;
    int inter = 0;
    for (NodeId t : small) {
        if (t == u || t == v) continue;
        if (large.count(t)) ++inter;
    }
    int du = static_cast<int>(nu.size()) - s.w;  // |N(u) \ {v}|
    int dv = static_cast<int>(nv.size()) - s.w;
    s.x = inter;
    s.y = du + dv - inter;
    return s;
}

StepStats reverse_step(Graph& g, NodeId new_node, NodeId anchor) {
    if (new_node == anchor) throw std::invalid_argument("new and anchor must differ");
    if (g.node_count() < 2) throw std::invalid_argument("reverse_step needs >= 2 nodes");
    StepStats s = pair_stats(g, new_node, anchor);
    if (s.w) g.remove_edge(new_node, anchor);
    for (NodeId nb : g.neighbors_excluding(new_node, anchor)) g.add_edge(anchor, nb);
    g.remove_node(new_node);
    return s;
}

ReverseUndo reverse_step_undoable(Graph& g, NodeId new_node, NodeId anchor) {
    if (new_node == anchor) throw std::invalid_argument("new and anchor must differ");
    ReverseUndo undo;
    undo.new_node = new_node;
    undo.anchor = anchor;
    undo.stats = pair_stats(g, new_node, anchor);
    if (undo.stats.w) g.remove_edge(new_node, anchor);
    undo.new_neighbors = g.neighbors_excluding(new_node, anchor);
    for (NodeId nb : undo.new_neighbors) {
        if (!g.has_edge(anchor, nb)) {
            g.add_edge(anchor, nb);
            undo.added_to_anchor.push_back(nb);
        }
    }
    g.remove_node(new_node);
    return undo;
}

void undo_reverse_step(Graph& g, const ReverseUndo& undo) {
    for (NodeId nb : undo.added_to_anchor) g.remove_edge(undo.anchor, nb);
    g.add_node_with_id(undo.new_node);
    for (NodeId nb : undo.new_neighbors) g.add_edge(undo.new_node, nb);
    if (undo.stats.w) g.add_edge(undo.new_node, undo.anchor);
}

void validate_theta(const Graph& g, const Theta& theta) {
    const std::size_t n = g.node_count();
    if (theta.arrival_order.size() != n)
        throw std::invalid_argument("arrival order length does not match node count");
    if (theta.anchors.size() + 1 != theta.arrival_order.size())
        throw std::invalid_argument("anchor sequence must have length n-1");

    std::unordered_set<NodeId> seen;
    for (NodeId v : theta.arrival_order) {
        if (!g.has_node(v)) throw std::invalid_argument("arrival order names unknown node");
        if (!seen.insert(v).second)
            throw std::invalid_argument("arrival order repeats a node");
    }
    std::unordered_set<NodeId> present;
    for (std::size_t i = 0; i < theta.anchors.size(); ++i) {
        present.insert(theta.arrival_order[i]);
        if (!present.count(theta.anchors[i]))
            throw std::invalid_argument("anchor not yet present at its step");
        if (theta.anchors[i] == theta.arrival_order[i + 1])
            throw std::invalid_argument("node cannot anchor itself");
    }
}

SufficientStats deconstruct(Graph g, const Theta& theta) {
    validate_theta(g, theta);
    SufficientStats total;
    total.n = static_cast<int>(theta.arrival_order.size());
    for (std::size_t i = theta.arrival_order.size(); i-- > 1;) {
        StepStats s = reverse_step(g, theta.arrival_order[i], theta.anchors[i - 1]);
        total.w_total += s.w;
        total.x_total += s.x;
        total.y_total += s.y;
    }
    return total;
}

double log_likelihood(const SufficientStats& stats, const ScoreParams& params) {
    double ll = xlogp(static_cast<double>(stats.w_total), params.q_c) +
                xlogp(static_cast<double>(stats.n - 1 - stats.w_total), 1.0 - params.q_c);
    if (params.q_m) {
        ll += xlogp(static_cast<double>(stats.y_total - stats.x_total), *params.q_m) +
              xlogp(static_cast<double>(stats.x_total), 1.0 - *params.q_m);
    }
    return ll;
}

double pair_log_likelihood(const StepStats& s, const ScoreParams& params) {
    double ll = xlogp(s.w, params.q_c) + xlogp(1 - s.w, 1.0 - params.q_c);
    if (params.q_m) {
        ll += xlogp(s.y - s.x, *params.q_m) + xlogp(s.x, 1.0 - *params.q_m);
    }
    return ll;
}

MleResult mle(const SufficientStats& stats) {
    if (stats.n < 2) throw std::invalid_argument("mle requires n >= 2");
    MleResult r;
    if (stats.y_total > 0)
        r.q_m = 1.0 - static_cast<double>(stats.x_total) / static_cast<double>(stats.y_total);
    r.q_c = static_cast<double>(stats.w_total) / static_cast<double>(stats.n - 1);
    return r;
}

boost::multiprecision::cpp_int theta_space_size(int n) {
    if (n < 1) throw std::invalid_argument("theta_space_size requires n >= 1");
    boost::multiprecision::cpp_int prod = 1;
    for (int i = 2; i <= n; ++i) prod *= boost::multiprecision::cpp_int(i) * (i - 1) / 2;
    return prod;
}

}  // namespace dmc
