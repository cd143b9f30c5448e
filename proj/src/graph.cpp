#include "robnet/graph.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace robnet {

namespace {

bool sorted_contains(const std::vector<NodeId>& v, NodeId x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    return it != v.end() && *it == x;
}

// Returns false if already present.
bool sorted_insert(std::vector<NodeId>& v, NodeId x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it != v.end() && *it == x) return false;
    v.insert(it, x);
    return true;
}

void sorted_erase(std::vector<NodeId>& v, NodeId x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it != v.end() && *it == x) v.erase(it);
}

// Union-find over original ids, restricted to live nodes by the caller.
struct UnionFind {
    std::vector<std::int32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n, -1) {}

    std::int32_t find(std::int32_t x) {
        std::int32_t root = x;
        while (parent[root] >= 0) root = parent[root];
        while (parent[x] >= 0) {
            std::int32_t next = parent[x];
            parent[x] = root;
            x = next;
        }
        return root;
    }

    // parent of a root stores -(component size)
    void unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (parent[a] > parent[b]) std::swap(a, b);
        parent[a] += parent[b];
        parent[b] = a;
    }
};

} // namespace

Graph::Graph(std::size_t n, bool directed)
    : directed_(directed), n_alive_(n), edges_(0), alive_(n, 1), out_(n) {
    if (n == 0) throw std::invalid_argument("graph must have at least one node");
    if (directed_) in_.resize(n);
}

void Graph::check_id(NodeId v) const {
    if (v >= n_initial()) throw std::out_of_range("node id " + std::to_string(v) + " out of range");
}

void Graph::check_live(NodeId v) const {
    check_id(v);
    if (!alive_[v]) throw std::invalid_argument("node " + std::to_string(v) + " has been removed");
}

bool Graph::alive(NodeId v) const {
    check_id(v);
    return alive_[v] != 0;
}

bool Graph::add_edge(NodeId u, NodeId v) {
    check_live(u);
    check_live(v);
    if (u == v) throw std::invalid_argument("self-loops are not allowed");
    if (!sorted_insert(out_[u], v)) return false;
    if (directed_) {
        sorted_insert(in_[v], u);
    } else {
        sorted_insert(out_[v], u);
    }
    ++edges_;
    return true;
}

void Graph::remove_node(NodeId v) {
    check_live(v);
    if (directed_) {
        for (NodeId w : out_[v]) sorted_erase(in_[w], v);
        for (NodeId w : in_[v]) sorted_erase(out_[w], v);
        edges_ -= out_[v].size() + in_[v].size();
        out_[v].clear();
        in_[v].clear();
    } else {
        for (NodeId w : out_[v]) sorted_erase(out_[w], v);
        edges_ -= out_[v].size();
        out_[v].clear();
    }
    alive_[v] = 0;
    --n_alive_;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
    check_live(u);
    check_live(v);
    return sorted_contains(out_[u], v);
}

std::size_t Graph::total_degree(NodeId v) const {
    check_live(v);
    return directed_ ? out_[v].size() + in_[v].size() : out_[v].size();
}

const std::vector<NodeId>& Graph::neighbors_out(NodeId v) const {
    check_live(v);
    return out_[v];
}

const std::vector<NodeId>& Graph::neighbors_in(NodeId v) const {
    check_live(v);
    return directed_ ? in_[v] : out_[v];
}

std::vector<NodeId> Graph::live_nodes() const {
    std::vector<NodeId> ids;
    ids.reserve(n_alive_);
    for (NodeId v = 0; v < n_initial(); ++v)
        if (alive_[v]) ids.push_back(v);
    return ids;
}

std::size_t Graph::largest_component_size() const {
    if (n_alive_ == 0) throw std::invalid_argument("largest_component_size on empty graph");
    UnionFind uf(n_initial());
    for (NodeId v = 0; v < n_initial(); ++v) {
        if (!alive_[v]) continue;
        for (NodeId w : out_[v]) uf.unite(static_cast<std::int32_t>(v), static_cast<std::int32_t>(w));
    }
    std::size_t best = 0;
    for (NodeId v = 0; v < n_initial(); ++v) {
        if (!alive_[v]) continue;
        std::int32_t root = uf.find(static_cast<std::int32_t>(v));
        best = std::max(best, static_cast<std::size_t>(-uf.parent[root]));
    }
    return best;
}

ComponentPartition Graph::components() const {
    UnionFind uf(n_initial());
    for (NodeId v = 0; v < n_initial(); ++v) {
        if (!alive_[v]) continue;
        for (NodeId w : out_[v]) uf.unite(static_cast<std::int32_t>(v), static_cast<std::int32_t>(w));
    }
    ComponentPartition part;
    part.component_id.assign(n_initial(), -1);
    std::vector<std::int32_t> label(n_initial(), -1);
    for (NodeId v = 0; v < n_initial(); ++v) {
        if (!alive_[v]) continue;
        std::int32_t root = uf.find(static_cast<std::int32_t>(v));
        if (label[root] < 0) {
            label[root] = static_cast<std::int32_t>(part.sizes.size());
            part.sizes.push_back(static_cast<std::size_t>(-uf.parent[root]));
        }
        part.component_id[v] = label[root];
    }
    return part;
}

AdjacencyMatrix Graph::adjacency_matrix() const {
    if (n_alive_ == 0) throw std::invalid_argument("adjacency_matrix on empty graph");
    std::vector<std::uint32_t> index(n_initial(), 0);
    std::uint32_t next = 0;
    for (NodeId v = 0; v < n_initial(); ++v)
        if (alive_[v]) index[v] = next++;

    AdjacencyMatrix m;
    m.n = n_alive_;
    m.cells.assign(n_alive_ * n_alive_, 0);
    for (NodeId v = 0; v < n_initial(); ++v) {
        if (!alive_[v]) continue;
        for (NodeId w : out_[v]) {
            m.cells[index[v] * m.n + index[w]] = 1;
            if (!directed_) m.cells[index[w] * m.n + index[v]] = 1;
        }
    }
    return m;
}

} // namespace robnet
