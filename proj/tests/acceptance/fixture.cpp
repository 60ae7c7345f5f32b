#include "fixture.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "dmc/engine.hpp"
#include "dmc/rng.hpp"

namespace acceptance {

namespace {

// Generation parameters tuned so that a 10% induced-node subsample,
// deconstructed with the parameter-free greedy, estimates q_m in [0.6, 0.8]
// and q_c in [0.15, 0.25].
constexpr int kNodes = 20000;
constexpr double kQm = 0.63;
constexpr double kQc = 0.72;
constexpr std::uint64_t kSeed = 20240811;

constexpr std::size_t kTargetEdges = 52068;
constexpr std::size_t kSelfLoopRows = 480;

std::string label(dmc::NodeId v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "P%05d", static_cast<int>(v));
    return buf;
}

}  // namespace

FixtureInfo write_interactome_fixture(const std::string& path) {
    dmc::Generated gen = dmc::forward_generate(kNodes, {kQm, kQc}, kSeed);
    dmc::Graph& g = gen.graph;
    dmc::Rng rng(dmc::Rng::derive(kSeed, 1));

    std::vector<std::pair<dmc::NodeId, dmc::NodeId>> edges;
    for (dmc::NodeId v : g.sorted_nodes())
        for (dmc::NodeId u : g.sorted_neighbors(v))
            if (v < u) edges.emplace_back(v, u);

    // Trim surplus edges at random, or pad with random non-edges, until the
    // count is exact.
    while (edges.size() > kTargetEdges) {
        const std::size_t i = rng.uniform_index(edges.size());
        g.remove_edge(edges[i].first, edges[i].second);
        edges[i] = edges.back();
        edges.pop_back();
    }
    while (edges.size() < kTargetEdges) {
        const auto u = static_cast<dmc::NodeId>(rng.uniform_index(kNodes));
        const auto v = static_cast<dmc::NodeId>(rng.uniform_index(kNodes));
        if (u == v || g.has_edge(u, v)) continue;
        g.add_edge(u, v);
        edges.emplace_back(std::min(u, v), std::max(u, v));
    }

    // Shuffle row order and splice in the self-loop rows.
    for (std::size_t i = edges.size(); i > 1; --i)
        std::swap(edges[i - 1], edges[rng.uniform_index(i)]);

    std::vector<std::string> rows;
    rows.reserve(kTargetEdges + kSelfLoopRows);
    for (const auto& [u, v] : edges) rows.push_back(label(u) + "\t" + label(v));
    for (std::size_t i = 0; i < kSelfLoopRows; ++i) {
        const auto v = static_cast<dmc::NodeId>(rng.uniform_index(kNodes));
        rows.push_back(label(v) + "\t" + label(v));
    }
    for (std::size_t i = rows.size(); i > 1; --i)
        std::swap(rows[i - 1], rows[rng.uniform_index(i)]);

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write fixture file " + path);
    for (const std::string& row : rows) out << row << "\n";

    FixtureInfo info;
    info.rows = rows.size();
    info.self_loop_rows = kSelfLoopRows;
    info.unique_edges = kTargetEdges;
    info.nodes = static_cast<std::size_t>(kNodes);
    return info;
}

}  // namespace acceptance
