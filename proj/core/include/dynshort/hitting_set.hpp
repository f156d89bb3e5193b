#pragma once

#include <deque>
#include <set>
#include <vector>

#include "dynshort/graph.hpp"

namespace dynshort {

// ---------------------------------------------------------------------------
// Deterministic dynamic hitting set for heavy-node neighborhoods.
//
// A node is heavy when its degree reaches the threshold d; the maintained set
// must contain a neighbor of every heavy node after every update. The static
// construction is a greedy set cover over the first d (smallest-id) neighbors
// of each heavy node. The dynamic maintenance runs in phases of t updates
// (t a multiple of 5 chosen to dominate the greedy output size), split into
// five equal subphases that interleave snapshotting the graph, re-running the
// greedy in budgeted slices, drip-reporting the replacement set, patching
// both generations on recently-touched nodes, and retiring the old
// generation — so membership changes per update stay bounded instead of
// arriving as one rebuild burst.
// ---------------------------------------------------------------------------

/// One reported membership change of the maintained set.
struct SetChange {
    bool add;
    int node;

    friend bool operator==(const SetChange& a, const SetChange& b) {
        return a.add == b.add && a.node == b.node;
    }
};

/// Greedy cover of every heavy node's first-d neighborhood: repeatedly picks
/// the node covering the most still-uncovered heavy nodes (ties: smallest
/// id). Returns the picks sorted ascending.
std::vector<int> static_greedy_hitting_set(const DynGraph& g, int d);

namespace detail {

/// The greedy above as a resumable machine: work is metered in primitive
/// touches (one set-membership scan entry, one coverage decrement, one bucket
/// probe each count as one touch) so a caller can spread the computation over
/// many updates and finish it at a deadline.
class GreedyCover {
public:
    explicit GreedyCover(int n)
        : covers_(static_cast<size_t>(n)), count_(static_cast<size_t>(n), 0) {}

    /// Register one heavy node's first-d neighbor list (snapshot input).
    void add_set(std::vector<int> members);

    void advance(long touches);
    void finish();
    bool done() const { return stage_ == Stage::done; }
    /// Picked cover, ascending; valid once done.
    const std::vector<int>& picks() const { return picks_; }

private:
    enum class Stage { setup, fill, pick, done };

    void one_touch();

    Stage stage_ = Stage::setup;
    std::vector<std::vector<int>> sets_;
    size_t setup_set_ = 0;
    size_t setup_pos_ = 0;
    size_t fill_node_ = 0;
    std::vector<std::vector<int>> covers_;  // node -> indices of sets containing it
    std::vector<int> count_;                // node -> uncovered sets it would hit
    std::vector<bool> covered_;             // per set
    size_t uncovered_ = 0;
    std::vector<std::set<int>> buckets_;    // by count, each id-ordered
    int cur_max_ = 0;
    std::deque<size_t> drain_queue_;        // sets covered by the latest pick
    long drain_set_ = -1;                   // set whose members are being decremented
    size_t drain_pos_ = 0;
    std::vector<int> picks_;
};

}  // namespace detail

/// Owns its graph; update() applies one edge operation and returns the
/// membership changes of the maintained set (additions first, removals last,
/// so coverage never lapses mid-update).
class HittingSet {
public:
    HittingSet(DynGraph g, int d);

    const DynGraph& graph() const { return g_; }
    int degree_threshold() const { return d_; }
    /// Phase length in updates; 0 in the degenerate regime.
    int phase_length() const { return degenerate_ ? 0 : 5 * len_; }
    /// True when d > sqrt(n) or the phase would be shorter than 5 updates;
    /// the set is then recomputed from scratch every update and the recourse
    /// bound is waived.
    bool degenerate() const { return degenerate_; }
    /// Current subphase in 1..5 (0 in the degenerate regime).
    int subphase() const { return degenerate_ ? 0 : tick_ / len_ + 1; }

    const std::set<int>& members() const { return out_; }
    bool contains(int v) const { return out_.count(v) > 0; }
    int size() const { return static_cast<int>(out_.size()); }

    std::vector<SetChange> update(EdgeOp op, int u, int v);

private:
    void start_phase();
    void fix(std::set<int>& gen, int v, std::vector<SetChange>& log);
    void report_add(int v, std::vector<SetChange>& log);
    void snapshot_some();
    std::vector<SetChange> degenerate_update();

    DynGraph g_;
    int d_;
    bool degenerate_ = false;
    int len_ = 0;   // subphase length; the phase has 5*len_ updates
    int tick_ = 0;  // position within the current phase

    std::set<int> out_;    // the reported set
    std::set<int> a_old_;  // current-generation hitting set
    std::set<int> a_new_;  // replacement being built this phase

    // Phase machinery.
    int snap_cursor_ = 0;                        // next node to snapshot
    int snap_per_tick_ = 0;
    detail::GreedyCover greedy_;
    long greedy_per_tick_ = 0;                   // budget in touches
    std::deque<int> touched_;                    // endpoints seen in subphases 1-3
    std::vector<int> report_list_;               // a_new_ drip-report order
    size_t report_cursor_ = 0;
    int report_per_tick_ = 0;
    std::vector<int> retire_list_;               // a_old_ retirement order
    size_t retire_cursor_ = 0;
    int retire_per_tick_ = 0;
};

}  // namespace dynshort
