#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace robnet {

using NodeId = std::uint32_t;

/// Dense 0/1 adjacency snapshot over the live nodes of a graph, indexed
/// by live nodes in ascending original-id order.
struct AdjacencyMatrix {
    std::size_t n = 0;
    std::vector<std::uint8_t> cells; // row-major, n*n

    std::uint8_t at(std::size_t i, std::size_t j) const { return cells[i * n + j]; }
    bool operator==(const AdjacencyMatrix&) const = default;
};

/// Labels of the (weakly) connected components over live nodes.
struct ComponentPartition {
    std::vector<std::int32_t> component_id; // per original id; -1 for dead nodes
    std::vector<std::size_t> sizes;         // one entry per component
};

/// Simple directed or undirected graph with stable node ids and
/// liveness-masked node removal. Original ids survive an attack
/// sequence; queries never see edges incident to removed nodes.
class Graph {
public:
    Graph(std::size_t n, bool directed);

    std::size_t n_initial() const { return out_.size(); }
    std::size_t n_alive() const { return n_alive_; }
    std::size_t edge_count() const { return edges_; }
    bool directed() const { return directed_; }
    bool alive(NodeId v) const;

    /// Insert edge u->v (both directions when undirected). Returns false
    /// if the edge was already present (no-op). Rejects self-loops and
    /// dead endpoints.
    bool add_edge(NodeId u, NodeId v);

    /// Mark v dead and hide all incident edges.
    void remove_node(NodeId v);

    bool has_edge(NodeId u, NodeId v) const;

    /// Undirected: neighbor count. Directed: in-degree + out-degree.
    std::size_t total_degree(NodeId v) const;

    /// Out-neighbors (undirected: all neighbors). Only live nodes appear.
    const std::vector<NodeId>& neighbors_out(NodeId v) const;
    /// In-neighbors (undirected: same list as neighbors_out).
    const std::vector<NodeId>& neighbors_in(NodeId v) const;

    std::vector<NodeId> live_nodes() const;

    /// Size of the largest weakly connected component over live nodes.
    /// Directed edges are treated as undirected for this query.
    std::size_t largest_component_size() const;

    ComponentPartition components() const;

    AdjacencyMatrix adjacency_matrix() const;

private:
    void check_id(NodeId v) const;
    void check_live(NodeId v) const;

    bool directed_;
    std::size_t n_alive_;
    std::size_t edges_;
    std::vector<std::uint8_t> alive_;
    std::vector<std::vector<NodeId>> out_; // sorted adjacency lists
    std::vector<std::vector<NodeId>> in_;  // directed graphs only
};

} // namespace robnet
