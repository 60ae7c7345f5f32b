#pragma once

#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace dmc {

using NodeId = std::int32_t;

// Undirected simple graph with stable integer node identifiers.
// Identifiers are dense at creation time and never reused after removal,
// so an arrival history can refer to them across deconstruction steps.
class Graph {
public:
    Graph() = default;

    // Adds an isolated node with a fresh identifier.
    NodeId add_node();

    // Adds an isolated node with a caller-chosen identifier (ingestion and
    // file parsing). Throws if the identifier is already present.
    void add_node_with_id(NodeId v);

    // Removes v and all incident edges.
    void remove_node(NodeId v);

    void add_edge(NodeId u, NodeId v);
    // Returns true if the edge existed.
    bool remove_edge(NodeId u, NodeId v);
    void toggle_edge(NodeId u, NodeId v);

    bool has_node(NodeId v) const { return adjacency_.count(v) != 0; }
    bool has_edge(NodeId u, NodeId v) const;
    std::size_t degree(NodeId v) const { return neighbors(v).size(); }
    std::size_t node_count() const { return adjacency_.size(); }
    std::size_t edge_count() const { return edges_; }

    const std::unordered_set<NodeId>& neighbors(NodeId v) const;

    // adjacency[u] \ {v}.
    std::vector<NodeId> neighbors_excluding(NodeId u, NodeId v) const;

    // Neighbor list in ascending id order, for deterministic iteration.
    std::vector<NodeId> sorted_neighbors(NodeId v) const;

    std::vector<NodeId> sorted_nodes() const;

private:
    const std::unordered_set<NodeId>& checked(NodeId v) const;

    std::unordered_map<NodeId, std::unordered_set<NodeId>> adjacency_;
    NodeId next_id_ = 0;
    std::size_t edges_ = 0;
};

}  // namespace dmc
