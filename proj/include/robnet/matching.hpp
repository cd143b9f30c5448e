#pragma once

#include <cstddef>
#include <vector>

#include "robnet/graph.hpp"

namespace robnet {

/// Maximum bipartite matching for the driver-node computation on directed
/// graphs: every node contributes an out-copy (left side) and an in-copy
/// (right side), and each arc u->v becomes a left-right edge.
///
/// Built once, then kept maximum across node removals: deleting a node
/// invalidates at most its two matched pairs, after which at most two
/// augmentations restore maximality.
class BipartiteMatcher {
public:
    explicit BipartiteMatcher(const Graph& g);

    std::size_t size() const { return matched_; }

    /// Call after g.remove_node(v); g must be the same graph the matcher
    /// was built on.
    void on_node_removed(const Graph& g, NodeId v);

private:
    static constexpr NodeId kUnmatched = static_cast<NodeId>(-1);

    void next_epoch();
    bool try_augment(const Graph& g, NodeId u);
    void augment_to_maximum(const Graph& g);

    std::vector<NodeId> match_left_;  // out-copy -> in-copy it is matched to
    std::vector<NodeId> match_right_; // in-copy -> out-copy it is matched to
    std::vector<std::uint32_t> visit_mark_;
    std::uint32_t visit_epoch_ = 0;
    std::size_t matched_ = 0;
};

} // namespace robnet
