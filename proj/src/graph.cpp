#include "dmc/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace dmc {

namespace {
[[noreturn]] void unknown_node(NodeId v) {
    throw std::invalid_argument("unknown node id " + std::to_string(v));
}
}  // namespace

const std::unordered_set<NodeId>& Graph::checked(NodeId v) const {
    auto it = adjacency_.find(v);
    if (it == adjacency_.end()) unknown_node(v);
    return it->second;
}

NodeId Graph::add_node() {
    NodeId v = next_id_++;
    adjacency_.emplace(v, std::unordered_set<NodeId>{});
    return v;
}

void Graph::add_node_with_id(NodeId v) {
    if (v < 0) throw std::invalid_argument("node id must be nonnegative");
    auto [it, inserted] = adjacency_.emplace(v, std::unordered_set<NodeId>{});
    if (!inserted) throw std::invalid_argument("duplicate node id " + std::to_string(v));
    next_id_ = std::max(next_id_, static_cast<NodeId>(v + 1));
}

void Graph::remove_node(NodeId v) {
    const auto& nbrs = checked(v);
    edges_ -= nbrs.size();
    for (NodeId u : nbrs) adjacency_[u].erase(v);
    adjacency_.erase(v);
}

void Graph::add_edge(NodeId u, NodeId v) {
    if (u == v) throw std::invalid_argument("self-loops are not allowed");
    auto& nu = const_cast<std::unordered_set<NodeId>&>(checked(u));
    auto& nv = const_cast<std::unordered_set<NodeId>&>(checked(v));
    if (nu.insert(v).second) {
        nv.insert(u);
        ++edges_;
    }
}

bool Graph::remove_edge(NodeId u, NodeId v) {
    auto& nu = const_cast<std::unordered_set<NodeId>&>(checked(u));
    auto& nv = const_cast<std::unordered_set<NodeId>&>(checked(v));
    if (nu.erase(v) == 0) return false;
    nv.erase(u);
    --edges_;
    return true;
}

void Graph::toggle_edge(NodeId u, NodeId v) {
    if (has_edge(u, v)) {
        remove_edge(u, v);
    } else {
        add_edge(u, v);
    }
}

bool Graph::has_edge(NodeId u, NodeId v) const {
    if (u == v) return false;
    return checked(u).count(v) != 0 && (checked(v), true);
}

const std::unordered_set<NodeId>& Graph::neighbors(NodeId v) const {
    return checked(v);
}

std::vector<NodeId> Graph::neighbors_excluding(NodeId u, NodeId v) const {
    checked(v);
    const auto& nbrs = checked(u);
    std::vector<NodeId> out;
    out.reserve(nbrs.size());
    for (NodeId w : nbrs)
        if (w != v) out.push_back(w);
    return out;
}

std::vector<NodeId> Graph::sorted_neighbors(NodeId v) const {
    const auto& nbrs = checked(v);
    std::vector<NodeId> out(nbrs.begin(), nbrs.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<NodeId> Graph::sorted_nodes() const {
    std::vector<NodeId> out;
    out.reserve(adjacency_.size());
    for (const auto& [v, _] : adjacency_) out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace dmc
