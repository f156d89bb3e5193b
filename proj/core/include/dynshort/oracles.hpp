#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dynshort/bounded_dist.hpp"
#include "dynshort/emulator.hpp"
#include "dynshort/field.hpp"
#include "dynshort/graph.hpp"

namespace dynshort {

// ---------------------------------------------------------------------------
// Composed (1+eps)-approximate distance oracles over unweighted undirected
// graphs under edge updates. Every oracle runs two channels per query and
// returns the minimum:
//
//   algebraic  exact hop-bounded distances (the direct channel); exact
//              whenever d_G is within the hop bound,
//   emulator   Dijkstra over a dynamically maintained near-additive
//              emulator; covers all longer distances.
//
// Per kind:
//   st    hop ceil(8/eps)+2 channel (S={s}, T={t}) + additive-4 emulator
//         at eps/2 (whose hop bound coincides with the channel's),
//   sssp  hop ceil(4/eps) channel (S={s}, T=V) + additive-2 emulator at
//         eps/2,
//   mssp  hop ceil(6*beta/eps) channel (S given, T=V) + sparse emulator at
//         eps/2 with k = ceil(sqrt(log_{1/eps}(n)/2)) levels; beta is the
//         sparse emulator's additive term,
//   apsp  mssp with S = V.
//
// The guarantee for every finite pair, after every update:
//   d_G <= estimate.value <= (1+eps) * d_G,
// and estimate.value is unreachable iff the pair is disconnected.
//
// eps is clamped to [2/n, 1]. A request below 2/n switches the oracle to
// exact mode (full-depth breadth-first channel only, no emulator), flagged
// via exact_mode().
// ---------------------------------------------------------------------------

enum class OracleKind { st, sssp, mssp, apsp };

/// Levels used by the sparse-emulator recipes: ceil(sqrt(log_{1/eps}(n)/2)),
/// clamped to [2, ceil(log2 n)]; the cap takes over as eps -> 1, where the
/// formula diverges.
int sparse_levels(int n, double eps);

/// Which channel produced an estimate. Ties go to the algebraic channel, so
/// any distance within the hop bound reports algebraic.
enum class Channel { algebraic, emulator };

struct DistanceEstimate {
    Dist value = kNoPath;  // kNoPath encodes "unreachable"
    Channel channel = Channel::algebraic;

    friend bool operator==(const DistanceEstimate& a, const DistanceEstimate& b) {
        return a.value == b.value && a.channel == b.channel;
    }
};

struct OracleOptions {
    /// Field used by algebraic channels (the direct one and the emulators').
    FieldConfig field = FieldConfig::deterministic();
    /// mssp/apsp: cadence of the sparse emulator's static stage. 1 rebuilds
    /// per update (the simple all-pairs variant); larger values trade
    /// freshness for speed and may serve stale estimates between rebuilds.
    int rebuild_every = 1;
    /// Backend of the direct channel. Automatic picks by hop bound; exact
    /// mode (eps below 2/n) always runs breadth-first regardless.
    BoundedDistOptions::Engine engine = BoundedDistOptions::Engine::automatic;
};

class DistanceOracle {
public:
    static DistanceOracle make_st(DynGraph g, int s, int t, double eps,
                                  OracleOptions opts = {});
    static DistanceOracle make_sssp(DynGraph g, int s, double eps, OracleOptions opts = {});
    static DistanceOracle make_mssp(DynGraph g, std::vector<int> sources, double eps,
                                    OracleOptions opts = {});
    static DistanceOracle make_apsp(DynGraph g, double eps, OracleOptions opts = {});

    ~DistanceOracle();
    DistanceOracle(DistanceOracle&&) noexcept;
    DistanceOracle& operator=(DistanceOracle&&) noexcept;

    void update(EdgeOp op, int u, int v);

    OracleKind kind() const { return kind_; }
    /// The clamped eps actually enforced (see exact_mode()).
    double eps() const { return eps_; }
    /// True when the requested eps was below 2/n: estimates are exact and
    /// only the full-depth direct channel runs.
    bool exact_mode() const { return exact_; }
    /// Hop bound of the direct channel.
    int hop_bound() const { return hop_; }
    const std::vector<int>& query_sources() const { return sources_; }
    const DynGraph& graph() const;

    /// kind st only.
    DistanceEstimate st_query() const;
    /// kind sssp only: estimates for every node, indexed by node id.
    std::vector<DistanceEstimate> sssp_query() const;
    /// kind mssp or apsp: row i holds estimates from query_sources()[i].
    std::vector<std::vector<DistanceEstimate>> mssp_query() const;
    /// kind apsp only: alias of mssp_query with S = V.
    std::vector<std::vector<DistanceEstimate>> apsp_query() const;

private:
    DistanceOracle(DynGraph g, OracleKind kind, std::vector<int> sources, int t, double eps,
                   OracleOptions opts);

    std::vector<DistanceEstimate> combine_row(int row, const DistMatrix& channel_dm,
                                              const std::vector<Dist>& emu_dist) const;

    OracleKind kind_;
    double eps_ = 0.5;
    bool exact_ = false;
    int hop_ = 0;
    int t_ = -1;  // st only
    std::vector<int> sources_;
    std::unique_ptr<Emulator> emulator_;        // null in exact mode
    std::unique_ptr<DynGraph> exact_mirror_;    // exact mode only
    std::unique_ptr<BoundedDistance> channel_;  // the direct channel
};

}  // namespace dynshort
