#include "robnet/matching.hpp"

#include <algorithm>
#include <stdexcept>

namespace robnet {

BipartiteMatcher::BipartiteMatcher(const Graph& g) {
    if (!g.directed()) throw std::invalid_argument("matching-based driver count needs a directed graph");
    match_left_.assign(g.n_initial(), kUnmatched);
    match_right_.assign(g.n_initial(), kUnmatched);
    visit_mark_.assign(g.n_initial(), 0);
    augment_to_maximum(g);
}

void BipartiteMatcher::next_epoch() {
    if (++visit_epoch_ == 0) {
        std::fill(visit_mark_.begin(), visit_mark_.end(), 0u);
        visit_epoch_ = 1;
    }
}

bool BipartiteMatcher::try_augment(const Graph& g, NodeId u) {
    for (NodeId w : g.neighbors_out(u)) {
        if (visit_mark_[w] == visit_epoch_) continue;
        visit_mark_[w] = visit_epoch_;
        if (match_right_[w] == kUnmatched || try_augment(g, match_right_[w])) {
            match_left_[u] = w;
            match_right_[w] = u;
            return true;
        }
    }
    return false;
}

void BipartiteMatcher::augment_to_maximum(const Graph& g) {
    // Phases share one visited epoch; a phase with no successful
    // augmentation certifies maximality (the matching was unchanged, so
    // every failed search tree is a complete Hungarian tree).
    bool progress = true;
    while (progress) {
        progress = false;
        next_epoch();
        for (NodeId u = 0; u < g.n_initial(); ++u) {
            if (!g.alive(u) || match_left_[u] != kUnmatched) continue;
            if (try_augment(g, u)) {
                progress = true;
                ++matched_;
                next_epoch(); // marks made before an augmentation go stale
            }
        }
    }
}

void BipartiteMatcher::on_node_removed(const Graph& g, NodeId v) {
    if (match_left_[v] != kUnmatched) {
        match_right_[match_left_[v]] = kUnmatched;
        match_left_[v] = kUnmatched;
        --matched_;
    }
    if (match_right_[v] != kUnmatched) {
        match_left_[match_right_[v]] = kUnmatched;
        match_right_[v] = kUnmatched;
        --matched_;
    }
    augment_to_maximum(g);
}

} // namespace robnet
