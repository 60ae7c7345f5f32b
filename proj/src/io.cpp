#include "dmc/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dmc/rng.hpp"

namespace dmc {

NodeId LabeledGraph::intern(const std::string& label) {
    auto it = ids.find(label);
    if (it != ids.end()) return it->second;
    NodeId v = graph.add_node();
    if (static_cast<std::size_t>(v) != labels.size())
        throw std::logic_error("label table out of sync with graph ids");
    labels.push_back(label);
    ids.emplace(label, v);
    return v;
}

namespace {

std::vector<std::string> split_fields(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    if (delimiter == '\0') {
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) fields.push_back(tok);
    } else {
        std::string tok;
        std::istringstream ss(line);
        while (std::getline(ss, tok, delimiter)) fields.push_back(tok);
    }
    return fields;
}

[[noreturn]] void malformed(const std::string& path, std::size_t lineno, const std::string& why) {
    throw IoError(path + ":" + std::to_string(lineno) + ": " + why);
}

}  // namespace

IngestReport ingest_edge_list(const EdgeListSpec& spec) {
    if (spec.score_threshold && !spec.score_column)
        throw std::invalid_argument("score threshold requires a score column");

    std::ifstream in(spec.path);
    if (!in) throw IoError("cannot open " + spec.path);

    IngestReport report;
    std::string line;
    std::size_t lineno = 0;
    bool saw_content = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && spec.has_header) continue;
        std::vector<std::string> fields = split_fields(line, spec.delimiter);
        if (fields.empty()) continue;
        saw_content = true;
        if (fields.size() < 2) malformed(spec.path, lineno, "expected two node columns");
        ++report.rows;

        if (spec.score_column) {
            if (static_cast<std::size_t>(*spec.score_column) >= fields.size())
                malformed(spec.path, lineno, "score column out of range");
            double score;
            try {
                score = std::stod(fields[static_cast<std::size_t>(*spec.score_column)]);
            } catch (const std::exception&) {
                malformed(spec.path, lineno, "unparseable score");
            }
            if (spec.score_threshold && !(score > *spec.score_threshold)) {
                ++report.filtered_by_score;
                continue;
            }
        }

        if (fields[0] == fields[1]) {
            if (spec.drop_self_loops) {
                ++report.self_loops;
                continue;
            }
            malformed(spec.path, lineno, "self-loop not allowed");
        }

        NodeId u = report.graph.intern(fields[0]);
        NodeId v = report.graph.intern(fields[1]);
        if (report.graph.graph.has_edge(u, v)) {
            ++report.duplicate_edges;
        } else {
            report.graph.graph.add_edge(u, v);
        }
    }
    if (!saw_content) throw IoError(spec.path + ": empty edge list");
    return report;
}

Graph sample_induced_subgraph(const Graph& g, double p, std::uint64_t seed) {
    if (!(p > 0.0 && p <= 1.0))
        throw std::invalid_argument("sample fraction must be in (0, 1]");
    std::vector<NodeId> nodes = g.sorted_nodes();
    const std::size_t keep =
        static_cast<std::size_t>(std::lround(p * static_cast<double>(nodes.size())));
    Rng rng(seed);
    // Partial Fisher-Yates: the first `keep` entries are a uniform sample.
    for (std::size_t i = 0; i < keep && i + 1 < nodes.size(); ++i) {
        std::size_t j = i + rng.uniform_index(nodes.size() - i);
        std::swap(nodes[i], nodes[j]);
    }
    nodes.resize(keep);
    std::sort(nodes.begin(), nodes.end());

    Graph out;
    for (NodeId v : nodes) out.add_node_with_id(v);
    for (NodeId v : nodes)
        for (NodeId u : g.neighbors(v))
            if (u < v && out.has_node(u)) out.add_edge(u, v);
    return out;
}

void write_graph_file(const std::string& path, const LabeledGraph& g) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    std::vector<NodeId> nodes = g.graph.sorted_nodes();
    for (NodeId v : nodes)
        if (g.graph.degree(v) == 0) out << "! " << g.label_of(v) << "\n";
    for (NodeId v : nodes)
        for (NodeId u : g.graph.sorted_neighbors(v))
            if (v < u) out << g.label_of(v) << " " << g.label_of(u) << "\n";
}

LabeledGraph read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    LabeledGraph g;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (line[0] == '!') {
            std::vector<std::string> fields = split_fields(line.substr(1), '\0');
            if (fields.size() != 1) malformed(path, lineno, "expected one isolated-node label");
            g.intern(fields[0]);
            continue;
        }
        std::vector<std::string> fields = split_fields(line, '\0');
        if (fields.size() != 2) malformed(path, lineno, "expected an edge line 'u v'");
        if (fields[0] == fields[1]) malformed(path, lineno, "self-loop not allowed");
        NodeId u = g.intern(fields[0]);
        NodeId v = g.intern(fields[1]);
        if (!g.graph.has_edge(u, v)) g.graph.add_edge(u, v);
    }
    return g;
}

void write_theta_file(const std::string& path, const Theta& theta, const LabeledGraph& g) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (std::size_t i = 0; i < theta.arrival_order.size(); ++i)
        out << (i ? " " : "") << g.label_of(theta.arrival_order[i]);
    out << "\n";
    for (std::size_t i = 0; i < theta.anchors.size(); ++i)
        out << (i ? " " : "") << g.label_of(theta.anchors[i]);
    out << "\n";
}

Theta read_theta_file(const std::string& path, const LabeledGraph& g) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string arrivals_line, anchors_line;
    if (!std::getline(in, arrivals_line)) throw IoError(path + ": missing arrival-order line");
    std::getline(in, anchors_line);  // may be empty for n = 1

    auto lookup = [&](const std::string& label, std::size_t lineno) {
        auto it = g.ids.find(label);
        if (it == g.ids.end()) malformed(path, lineno, "unknown node label '" + label + "'");
        return it->second;
    };
    Theta theta;
    for (const std::string& tok : split_fields(arrivals_line, '\0'))
        theta.arrival_order.push_back(lookup(tok, 1));
    for (const std::string& tok : split_fields(anchors_line, '\0'))
        theta.anchors.push_back(lookup(tok, 2));
    return theta;
}

LabeledGraph with_numeric_labels(Graph g) {
    LabeledGraph out;
    for (NodeId v : g.sorted_nodes()) {
        if (static_cast<std::size_t>(v) != out.labels.size())
            throw std::logic_error("numeric labels require dense node ids");
        out.labels.push_back(std::to_string(v));
        out.ids.emplace(out.labels.back(), v);
    }
    out.graph = std::move(g);
    return out;
}

}  // namespace dmc
