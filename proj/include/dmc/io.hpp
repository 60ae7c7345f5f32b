#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "dmc/engine.hpp"

namespace dmc {

// Data-level failures (missing files, malformed lines); the CLI maps these
// to exit code 3.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EdgeListSpec {
    std::string path;
    char delimiter = '\0';  // '\0' = any whitespace
    bool has_header = false;
    std::optional<int> score_column;       // 0-based
    std::optional<double> score_threshold; // keep rows with score strictly greater
    bool drop_self_loops = true;
};

// A graph together with its external string labels.
struct LabeledGraph {
    Graph graph;
    std::vector<std::string> labels;                 // NodeId -> label
    std::unordered_map<std::string, NodeId> ids;     // label -> NodeId

    NodeId intern(const std::string& label);
    const std::string& label_of(NodeId v) const { return labels.at(static_cast<std::size_t>(v)); }
};

struct IngestReport {
    LabeledGraph graph;
    std::size_t rows = 0;
    std::size_t self_loops = 0;
    std::size_t duplicate_edges = 0;
    std::size_t filtered_by_score = 0;
};

// Parses node-label pairs, deduplicates parallel edges, drops self-loops,
// and applies the strictly-greater score filter.
IngestReport ingest_edge_list(const EdgeListSpec& spec);

// Samples round(p * n) nodes uniformly without replacement and returns the
// induced subgraph (node ids preserved).
Graph sample_induced_subgraph(const Graph& g, double p, std::uint64_t seed);

// Graph file format: '#' comment lines, '!' lines declaring isolated nodes
// ("! label"), and edge lines "label_u label_v".
void write_graph_file(const std::string& path, const LabeledGraph& g);
LabeledGraph read_graph_file(const std::string& path);

// Theta file format: line 1 = arrival order labels, line 2 = anchor labels.
void write_theta_file(const std::string& path, const Theta& theta, const LabeledGraph& g);
Theta read_theta_file(const std::string& path, const LabeledGraph& g);

// Numeric labels "0".."n-1" for generated graphs.
LabeledGraph with_numeric_labels(Graph g);

}  // namespace dmc
