#pragma once

// Replay harness: parse/generate update streams, replay them through the
// maintained distance structures, and verify every answer against textbook
// recomputation (BFS rows, Floyd-Warshall closures) plus the structural
// invariants of the supporting components.
//
// Stream text format (line oriented, '#' starts a comment line):
//
//   n <N> <d|u>            header: node count, directed/undirected
//   + <u> <v>              insert edge
//   - <u> <v>              delete edge
//   ? st <s> <t>           query the (1+eps) source-target oracle
//   ? sssp <s>             query the single-source oracle
//   ? mssp <s1>,<s2>,...   query the multi-source oracle
//   ? apsp                 query the all-pairs oracle
//   ? diam                 query the diameter estimator
//   ? xst <s> <t>          query the exact source-target structure
//
// Streams start from the empty graph on N nodes. Replay aborts with the
// offending event index on the first invalid event (endpoint out of range,
// duplicate insert, delete of an absent edge).
//
// Reports are newline-delimited JSON: one object per event followed by one
// summary object carrying the schema version. With timings stripped the
// report text is a pure function of stream, config, and seed, so identical
// runs produce byte-identical reports.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dynshort/bounded_dist.hpp"
#include "dynshort/graph.hpp"
#include "dynshort/oracles.hpp"

namespace dynshort {

// ---------------------------------------------------------------------------
// Update streams
// ---------------------------------------------------------------------------

/// Query vocabulary. st/sssp/mssp/apsp address the composed (1+eps) oracles,
/// diam the diameter estimator, xst the exact source-target structure.
enum class QueryKind { st, sssp, mssp, apsp, diam, xst };

const char* to_string(QueryKind k);
/// Inverse of to_string; ParseError on unknown names.
QueryKind query_kind_from(const std::string& name);

struct StreamEvent {
    enum class Type { insert, remove, query };

    Type type = Type::insert;
    int u = -1;  ///< edge endpoint; also s of st/sssp/xst queries
    int v = -1;  ///< edge endpoint; also t of st/xst queries
    QueryKind query = QueryKind::st;
    std::vector<int> sources;  ///< mssp queries only

    static StreamEvent edge(EdgeOp op, int u, int v);
    static StreamEvent query_st(int s, int t);
    static StreamEvent query_sssp(int s);
    static StreamEvent query_mssp(std::vector<int> sources);
    static StreamEvent query_apsp();
    static StreamEvent query_diam();
    static StreamEvent query_xst(int s, int t);
};

/// Header plus ordered events, applied to an initially empty graph.
struct UpdateStream {
    int n = 0;
    bool directed = false;
    std::vector<StreamEvent> events;
};

/// Parses the text format above. Throws ParseError naming the first bad line.
UpdateStream parse_stream(std::istream& in);
UpdateStream parse_stream_text(const std::string& text);
/// Reads a stream file; ParseError on I/O failure or malformed content.
UpdateStream load_stream(const std::string& path);

/// Serializes a stream to the text format; parse_stream_text(to_text(s))
/// reproduces s exactly, and to_text is byte-stable across runs.
std::string to_text(const UpdateStream& s);
void save_stream(const UpdateStream& s, const std::string& path);

/// Replays the events against an empty mirror graph and checks each one:
/// endpoints in [0, n), no self loops, no duplicate inserts, no deletes of
/// absent edges, query arguments in range. Throws ParseError naming the
/// first offending event index.
void validate_stream(const UpdateStream& s);

// ---------------------------------------------------------------------------
// Stream generators
// ---------------------------------------------------------------------------

/// Families of generated workloads:
///  - random:             uniform pair toggles (insert if absent, else delete)
///  - path_churn:         a 0-1-...-(n-1) path whose edges and random chords
///                        are repeatedly cut and restored, so long distances
///                        keep appearing and collapsing
///  - star_churn:         spokes of a small set of hub nodes toggle, driving
///                        degree concentration up and down
///  - adversarial_degree: a few victim nodes oscillate around the heavy-node
///                        degree threshold so every maintenance phase of the
///                        hitting set sees at least one heavy transition
enum class StreamKind { random, path_churn, star_churn, adversarial_degree };

const char* to_string(StreamKind k);
/// Accepts the hyphenated spellings used on the command line
/// ("random", "path-churn", "star-churn", "adversarial-degree").
StreamKind stream_kind_from(const std::string& name);

struct GenConfig {
    StreamKind kind = StreamKind::random;
    int n = 50;
    int length = 200;  ///< total events emitted (updates + queries)
    std::uint64_t seed = 1;
    bool directed = false;
    /// 0 = updates only; k > 0 emits one query every k-th event slot.
    int query_every = 0;
    /// Kinds cycled through at query slots. Generated query arguments are
    /// fixed per stream: st/xst use (0, n-1), sssp uses 0, mssp uses the
    /// first min(4, n) nodes.
    std::vector<QueryKind> query_kinds = {QueryKind::sssp};
    /// adversarial_degree only: the degree threshold to oscillate around;
    /// 0 picks ceil(sqrt(n ln n)).
    int degree_target = 0;
};

/// Deterministic in cfg: equal configs produce byte-identical streams.
/// length 0 yields a stream with a header and no events. The result always
/// passes validate_stream.
UpdateStream gen_stream(const GenConfig& cfg);

/// Degree threshold used by adversarial_degree when degree_target is 0.
int default_degree_target(int n);

// ---------------------------------------------------------------------------
// Ground truth
// ---------------------------------------------------------------------------

/// Textbook breadth-first search, one independent run per source: row i
/// holds hop distances from sources[i], kNoPath where unreachable. hop_cap
/// >= 0 truncates the search; nodes beyond the cap report kNoPath. Walks the
/// adjacency lists directly so verified replays compare the maintained
/// structures against an independent recomputation.
DistMatrix oracle_bfs(const DynGraph& g, const std::vector<int>& sources, int hop_cap = -1);

// ---------------------------------------------------------------------------
// Verified replay
// ---------------------------------------------------------------------------

struct RunConfig {
    double eps = 0.5;
    FieldConfig field = FieldConfig::deterministic();
    /// Seeds the randomized estimators (diameter probes) and the structural
    /// monitors' sampling; replays with equal seed draw identically.
    std::uint64_t seed = 1;
    /// Check every query answer against recomputed ground truth and audit
    /// the structural invariants after every update.
    bool verify = true;
    /// Hop budget of the exact source-target structure behind xst queries.
    int xst_hops = 8;
    /// Emulator rebuild cadence handed to the composed oracles.
    int rebuild_every = 1;
};

struct EventRecord {
    int index = 0;
    char op = '?';  ///< '+', '-', or '?'
    int u = -1;     ///< edge endpoints, or scalar query arguments
    int v = -1;
    std::string query;     ///< query kind name; empty for edge events
    Dist answer = kNoPath;  ///< scalar-answer queries (st, diam, xst)
    Dist truth = kNoPath;   ///< matching ground truth
    long compared = 0;      ///< ground-truth comparisons made at this event
    long violations = 0;    ///< failed comparisons plus structural violations
    double ratio = 1.0;     ///< worst finite answer/truth ratio at this event
    bool pass = true;
    double wall_ms = 0.0;
};

struct RunSummary {
    int schema = 1;  ///< report schema version
    long events = 0;
    long updates = 0;
    long queries = 0;
    long comparisons = 0;
    long failures = 0;  ///< events with pass == false
    double max_ratio = 1.0;
    /// Updates where the algebraic spot-check monitor recomposed its
    /// maintained inverse (fold or merge); 0 when verification is off.
    long rebuild_spikes = 0;
    /// recourse_hist[k] counts updates whose hitting-set recourse was k;
    /// the final bucket aggregates everything at or beyond its index.
    std::vector<long> recourse_hist;
    std::uint64_t seed = 1;
    double wall_ms = 0.0;
};

struct VerificationReport {
    RunSummary summary;
    std::vector<EventRecord> events;

    /// Newline-delimited JSON: one object per event, then the summary
    /// object. include_timings=false omits the wall-clock fields, making
    /// the text deterministic for equal (stream, config, seed).
    std::string to_ndjson(bool include_timings = true) const;
};

/// Replays the stream. Query events lazily construct the addressed
/// structure from the graph state at first use (later queries of the same
/// kind must repeat the same arguments) and every structure built so far
/// receives each subsequent update. With cfg.verify set, every query is
/// compared against oracle_bfs / Floyd-Warshall ground truth, and monitor
/// instances audit the hitting-set coverage/size/recourse bounds, the
/// emulator stretch and size bounds, and an algebraic bounded-distance
/// block after every update. Throws ParseError on invalid events.
VerificationReport run_stream(const UpdateStream& s, const RunConfig& cfg);

// ---------------------------------------------------------------------------
// Benchmark driver
// ---------------------------------------------------------------------------

struct BenchConfig {
    OracleKind kind = OracleKind::sssp;
    std::vector<int> sizes = {50, 100, 200};
    int updates = 50;  ///< edge updates timed per size
    double eps = 0.5;
    std::uint64_t seed = 1;
    StreamKind stream = StreamKind::random;
    /// Engine override for the oracle's direct channel (automatic, algebraic,
    /// or bfs). The baseline always recomputes by BFS.
    BoundedDistOptions::Engine engine = BoundedDistOptions::Engine::automatic;
};

struct BenchRow {
    int n = 0;
    double oracle_ms = 0.0;    ///< per update: maintain + read fresh answers
    double baseline_ms = 0.0;  ///< per update: recompute answers by BFS
};

struct BenchReport {
    std::vector<BenchRow> rows;
    /// Smallest benchmarked n where maintenance beat recomputation; -1 when
    /// recomputation won everywhere (informational, not a pass/fail gate).
    int crossover_n = -1;

    std::string to_ndjson() const;
};

BenchReport run_bench(const BenchConfig& cfg);

}  // namespace dynshort
