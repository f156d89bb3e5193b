#include "dynshort/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "dynshort/emulator.hpp"
#include "dynshort/errors.hpp"
#include "dynshort/extras.hpp"
#include "dynshort/hitting_set.hpp"
#include "dynshort/rng.hpp"
#include "json.hpp"

namespace dynshort {

namespace {

using ordered_json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

[[noreturn]] void line_error(int line, const std::string& what) {
    throw ParseError("line " + std::to_string(line) + ": " + what);
}

[[noreturn]] void event_error(int index, const std::string& what) {
    throw ParseError("event " + std::to_string(index) + ": " + what);
}

}  // namespace

// ---------------------------------------------------------------------------
// Names
// ---------------------------------------------------------------------------

const char* to_string(QueryKind k) {
    switch (k) {
        case QueryKind::st: return "st";
        case QueryKind::sssp: return "sssp";
        case QueryKind::mssp: return "mssp";
        case QueryKind::apsp: return "apsp";
        case QueryKind::diam: return "diam";
        case QueryKind::xst: return "xst";
    }
    return "?";
}

const char* to_string(StreamKind k) {
    switch (k) {
        case StreamKind::random: return "random";
        case StreamKind::path_churn: return "path-churn";
        case StreamKind::star_churn: return "star-churn";
        case StreamKind::adversarial_degree: return "adversarial-degree";
    }
    return "?";
}

StreamKind stream_kind_from(const std::string& name) {
    if (name == "random") return StreamKind::random;
    if (name == "path-churn") return StreamKind::path_churn;
    if (name == "star-churn") return StreamKind::star_churn;
    if (name == "adversarial-degree") return StreamKind::adversarial_degree;
    throw ParseError("unknown stream kind: " + name);
}

QueryKind query_kind_from(const std::string& name) {
    if (name == "st") return QueryKind::st;
    if (name == "sssp") return QueryKind::sssp;
    if (name == "mssp") return QueryKind::mssp;
    if (name == "apsp") return QueryKind::apsp;
    if (name == "diam") return QueryKind::diam;
    if (name == "xst") return QueryKind::xst;
    throw ParseError("unknown query kind: " + name);
}

// ---------------------------------------------------------------------------
// Stream events
// ---------------------------------------------------------------------------

StreamEvent StreamEvent::edge(EdgeOp op, int u, int v) {
    StreamEvent e;
    e.type = op == EdgeOp::insert ? Type::insert : Type::remove;
    e.u = u;
    e.v = v;
    return e;
}

StreamEvent StreamEvent::query_st(int s, int t) {
    StreamEvent e;
    e.type = Type::query;
    e.query = QueryKind::st;
    e.u = s;
    e.v = t;
    return e;
}

StreamEvent StreamEvent::query_sssp(int s) {
    StreamEvent e;
    e.type = Type::query;
    e.query = QueryKind::sssp;
    e.u = s;
    return e;
}

StreamEvent StreamEvent::query_mssp(std::vector<int> sources) {
    StreamEvent e;
    e.type = Type::query;
    e.query = QueryKind::mssp;
    e.sources = std::move(sources);
    return e;
}

StreamEvent StreamEvent::query_apsp() {
    StreamEvent e;
    e.type = Type::query;
    e.query = QueryKind::apsp;
    return e;
}

StreamEvent StreamEvent::query_diam() {
    StreamEvent e;
    e.type = Type::query;
    e.query = QueryKind::diam;
    return e;
}

StreamEvent StreamEvent::query_xst(int s, int t) {
    StreamEvent e;
    e.type = Type::query;
    e.query = QueryKind::xst;
    e.u = s;
    e.v = t;
    return e;
}

// ---------------------------------------------------------------------------
// Parsing and serialization
// ---------------------------------------------------------------------------

namespace {

// Splits "1,2,3" into {1,2,3}; empty items and non-digits are rejected.
std::vector<int> parse_id_list(const std::string& text, int line) {
    std::vector<int> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        if (item.empty()) line_error(line, "empty id in source list");
        size_t pos = 0;
        int value = 0;
        try {
            value = std::stoi(item, &pos);
        } catch (const std::exception&) {
            line_error(line, "bad id '" + item + "' in source list");
        }
        if (pos != item.size()) line_error(line, "bad id '" + item + "' in source list");
        out.push_back(value);
    }
    if (out.empty()) line_error(line, "empty source list");
    if (!text.empty() && text.back() == ',') line_error(line, "trailing comma in source list");
    return out;
}

int parse_node(std::istringstream& in, int line, const char* what) {
    int value = 0;
    if (!(in >> value)) line_error(line, std::string("missing ") + what);
    return value;
}

void expect_end(std::istringstream& in, int line) {
    std::string extra;
    if (in >> extra) line_error(line, "trailing token '" + extra + "'");
}

}  // namespace

UpdateStream parse_stream(std::istream& in) {
    UpdateStream s;
    std::string raw;
    int line = 0;
    bool saw_header = false;
    while (std::getline(in, raw)) {
        ++line;
        std::istringstream ls(raw);
        std::string op;
        if (!(ls >> op) || op[0] == '#') continue;  // blank or comment line
        if (!saw_header) {
            if (op != "n") line_error(line, "expected header 'n <N> <d|u>'");
            s.n = parse_node(ls, line, "node count");
            if (s.n < 1) line_error(line, "node count must be positive");
            std::string mode;
            if (!(ls >> mode) || (mode != "d" && mode != "u")) {
                line_error(line, "header mode must be 'd' or 'u'");
            }
            s.directed = mode == "d";
            expect_end(ls, line);
            saw_header = true;
            continue;
        }
        if (op == "+" || op == "-") {
            const int u = parse_node(ls, line, "edge endpoint");
            const int v = parse_node(ls, line, "edge endpoint");
            expect_end(ls, line);
            s.events.push_back(StreamEvent::edge(
                op == "+" ? EdgeOp::insert : EdgeOp::remove, u, v));
            continue;
        }
        if (op != "?") line_error(line, "unknown event '" + op + "'");
        std::string kind;
        if (!(ls >> kind)) line_error(line, "missing query kind");
        if (kind == "st" || kind == "xst") {
            const int a = parse_node(ls, line, "query source");
            const int b = parse_node(ls, line, "query target");
            expect_end(ls, line);
            s.events.push_back(kind == "st" ? StreamEvent::query_st(a, b)
                                            : StreamEvent::query_xst(a, b));
        } else if (kind == "sssp") {
            const int a = parse_node(ls, line, "query source");
            expect_end(ls, line);
            s.events.push_back(StreamEvent::query_sssp(a));
        } else if (kind == "mssp") {
            std::string list;
            if (!(ls >> list)) line_error(line, "missing source list");
            expect_end(ls, line);
            s.events.push_back(StreamEvent::query_mssp(parse_id_list(list, line)));
        } else if (kind == "apsp") {
            expect_end(ls, line);
            s.events.push_back(StreamEvent::query_apsp());
        } else if (kind == "diam") {
            expect_end(ls, line);
            s.events.push_back(StreamEvent::query_diam());
        } else {
            line_error(line, "unknown query kind '" + kind + "'");
        }
    }
    if (!saw_header) throw ParseError("stream has no header line");
    return s;
}

UpdateStream parse_stream_text(const std::string& text) {
    std::istringstream in(text);
    return parse_stream(in);
}

UpdateStream load_stream(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open stream file: " + path);
    return parse_stream(in);
}

std::string to_text(const UpdateStream& s) {
    std::ostringstream out;
    out << "n " << s.n << ' ' << (s.directed ? 'd' : 'u') << '\n';
    for (const StreamEvent& e : s.events) {
        switch (e.type) {
            case StreamEvent::Type::insert:
                out << "+ " << e.u << ' ' << e.v << '\n';
                break;
            case StreamEvent::Type::remove:
                out << "- " << e.u << ' ' << e.v << '\n';
                break;
            case StreamEvent::Type::query:
                out << "? " << to_string(e.query);
                switch (e.query) {
                    case QueryKind::st:
                    case QueryKind::xst:
                        out << ' ' << e.u << ' ' << e.v;
                        break;
                    case QueryKind::sssp:
                        out << ' ' << e.u;
                        break;
                    case QueryKind::mssp:
                        out << ' ';
                        for (size_t i = 0; i < e.sources.size(); ++i) {
                            if (i) out << ',';
                            out << e.sources[i];
                        }
                        break;
                    case QueryKind::apsp:
                    case QueryKind::diam:
                        break;
                }
                out << '\n';
                break;
        }
    }
    return out.str();
}

void save_stream(const UpdateStream& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write stream file: " + path);
    out << to_text(s);
    if (!out) throw ParseError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

void check_node(int v, int n, int index, const char* what) {
    if (v < 0 || v >= n) {
        event_error(index, std::string(what) + " " + std::to_string(v) + " out of range");
    }
}

// Shared by validate_stream and run_stream so both reject the same inputs.
void check_query_args(const StreamEvent& e, int n, int index) {
    switch (e.query) {
        case QueryKind::st:
        case QueryKind::xst:
            check_node(e.u, n, index, "query source");
            check_node(e.v, n, index, "query target");
            break;
        case QueryKind::sssp:
            check_node(e.u, n, index, "query source");
            break;
        case QueryKind::mssp: {
            if (e.sources.empty()) event_error(index, "empty source list");
            std::vector<int> seen = e.sources;
            std::sort(seen.begin(), seen.end());
            if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
                event_error(index, "duplicate source in list");
            }
            for (int s : e.sources) check_node(s, n, index, "query source");
            break;
        }
        case QueryKind::apsp:
        case QueryKind::diam:
            break;
    }
}

}  // namespace

void validate_stream(const UpdateStream& s) {
    if (s.n < 1) throw ParseError("stream header: node count must be positive");
    DynGraph mirror(s.n, s.directed);
    for (size_t i = 0; i < s.events.size(); ++i) {
        const StreamEvent& e = s.events[i];
        const int index = static_cast<int>(i);
        switch (e.type) {
            case StreamEvent::Type::insert:
            case StreamEvent::Type::remove:
                try {
                    if (e.type == StreamEvent::Type::insert) {
                        mirror.insert_edge(e.u, e.v);
                    } else {
                        mirror.delete_edge(e.u, e.v);
                    }
                } catch (const GraphError& err) {
                    event_error(index, err.what());
                }
                break;
            case StreamEvent::Type::query:
                check_query_args(e, s.n, index);
                break;
        }
    }
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

int default_degree_target(int n) {
    const double nn = std::max(n, 2);
    return static_cast<int>(std::ceil(std::sqrt(nn * std::log(nn))));
}

namespace {

// Emits query events (cycling cfg.query_kinds) at every cfg.query_every-th
// slot; edge events come from the per-kind step() closure, which must return
// an operation valid against the mirror.
class StreamBuilder {
public:
    StreamBuilder(const GenConfig& cfg, UpdateStream& out)
        : cfg_(cfg), out_(out), mirror_(cfg.n, cfg.directed) {}

    DynGraph& mirror() { return mirror_; }

    bool done() const { return static_cast<int>(out_.events.size()) >= cfg_.length; }

    // True when the next slot should be a query. Slots are 1-based so
    // query_every == 1 makes every event a query.
    bool query_slot() const {
        return cfg_.query_every > 0 && !cfg_.query_kinds.empty() &&
               static_cast<int>(out_.events.size() + 1) % cfg_.query_every == 0;
    }

    void push_query() {
        const QueryKind k = cfg_.query_kinds[cursor_++ % cfg_.query_kinds.size()];
        const int n = cfg_.n;
        switch (k) {
            case QueryKind::st:
                out_.events.push_back(StreamEvent::query_st(0, n - 1));
                break;
            case QueryKind::sssp:
                out_.events.push_back(StreamEvent::query_sssp(0));
                break;
            case QueryKind::mssp: {
                std::vector<int> src;
                for (int i = 0; i < std::min(4, n); ++i) src.push_back(i);
                out_.events.push_back(StreamEvent::query_mssp(std::move(src)));
                break;
            }
            case QueryKind::apsp:
                out_.events.push_back(StreamEvent::query_apsp());
                break;
            case QueryKind::diam:
                out_.events.push_back(StreamEvent::query_diam());
                break;
            case QueryKind::xst:
                out_.events.push_back(StreamEvent::query_xst(0, n - 1));
                break;
        }
    }

    void push_edge(EdgeOp op, int u, int v) {
        if (op == EdgeOp::insert) {
            mirror_.insert_edge(u, v);
        } else {
            mirror_.delete_edge(u, v);
        }
        out_.events.push_back(StreamEvent::edge(op, u, v));
    }

    void toggle(int u, int v) {
        push_edge(mirror_.has_edge(u, v) ? EdgeOp::remove : EdgeOp::insert, u, v);
    }

private:
    const GenConfig& cfg_;
    UpdateStream& out_;
    DynGraph mirror_;
    size_t cursor_ = 0;
};

// Uniform random pair, distinct endpoints.
std::pair<int, int> random_pair(Rng& rng, int n) {
    int u = rng.below(n);
    int v = rng.below(n - 1);
    if (v >= u) ++v;
    return {u, v};
}

void gen_random(const GenConfig& cfg, StreamBuilder& b, Rng& rng) {
    while (!b.done()) {
        if (b.query_slot()) {
            b.push_query();
            continue;
        }
        auto [u, v] = random_pair(rng, cfg.n);
        b.toggle(u, v);
    }
}

void gen_path_churn(const GenConfig& cfg, StreamBuilder& b, Rng& rng) {
    // Backbone first, then cut-and-restore churn on it plus random chords.
    for (int i = 0; i + 1 < cfg.n && !b.done(); ++i) {
        if (b.query_slot()) {
            b.push_query();
            --i;
            continue;
        }
        b.push_edge(EdgeOp::insert, i, i + 1);
    }
    while (!b.done()) {
        if (b.query_slot()) {
            b.push_query();
            continue;
        }
        if (rng.chance(0.7)) {
            const int i = rng.below(cfg.n - 1);
            b.toggle(i, i + 1);
        } else {
            auto [u, v] = random_pair(rng, cfg.n);
            b.toggle(u, v);
        }
    }
}

void gen_star_churn(const GenConfig& cfg, StreamBuilder& b, Rng& rng) {
    const int hubs = cfg.n >= 12 ? 3 : 1;
    while (!b.done()) {
        if (b.query_slot()) {
            b.push_query();
            continue;
        }
        if (rng.chance(0.9)) {
            const int h = rng.below(hubs);
            int v = rng.below(cfg.n - 1);
            if (v >= h) ++v;
            b.toggle(h, v);
        } else {
            auto [u, v] = random_pair(rng, cfg.n);
            b.toggle(u, v);
        }
    }
}

void gen_adversarial(const GenConfig& cfg, StreamBuilder& b, Rng& rng) {
    const int n = cfg.n;
    const int d = cfg.degree_target > 0 ? cfg.degree_target : default_degree_target(n);
    if (d < 2 || n - d - 1 < 1) {
        throw DimensionError("adversarial-degree stream: need n >= d + 2 and d >= 2");
    }
    // A few victims oscillate across the heavy threshold d. Round-robin over
    // at most 8 victims crosses the threshold at least once every 16 edge
    // events, which is denser than one per maintenance phase (phases are at
    // least 25 updates long whenever the phase machinery is active).
    const int victims = std::max(1, std::min(8, n - d - 1));
    // Victim j's partner pool is the node range [victims, n); entries are
    // taken with stride 1 from a per-victim offset so victims' edge sets
    // overlap but never collide with their own earlier picks.
    const int pool = n - victims;
    auto partner = [&](int j, int i) { return victims + (j * 17 + i) % pool; };

    // Build each victim up to degree d-1 (one below heavy).
    for (int j = 0; j < victims && !b.done(); ++j) {
        for (int i = 0; i < d - 1 && !b.done(); ++i) {
            if (b.query_slot()) {
                b.push_query();
                --i;
                continue;
            }
            b.push_edge(EdgeOp::insert, j, partner(j, i));
        }
    }
    // Oscillate: each victim cycles insert/insert/delete/delete over its two
    // reserved partners, crossing the threshold on the first insert (degree
    // reaches d) and the last delete (degree drops to d-1).
    std::vector<int> step(victims, 0);
    int turn = 0;
    // Occasional background noise edges keep the stream from being a pure
    // victim script without touching victim degrees.
    while (!b.done()) {
        if (b.query_slot()) {
            b.push_query();
            continue;
        }
        const int j = turn++ % victims;
        const int a = partner(j, d - 1);
        const int c = partner(j, d);
        switch (step[j]++ % 4) {
            case 0: b.push_edge(EdgeOp::insert, j, a); break;
            case 1: b.push_edge(EdgeOp::insert, j, c); break;
            case 2: b.push_edge(EdgeOp::remove, j, a); break;
            case 3: b.push_edge(EdgeOp::remove, j, c); break;
        }
        (void)rng;
    }
}

}  // namespace

UpdateStream gen_stream(const GenConfig& cfg) {
    if (cfg.n < 1) throw DimensionError("gen_stream: node count must be positive");
    if (cfg.length < 0) throw DimensionError("gen_stream: negative length");
    UpdateStream s;
    s.n = cfg.n;
    s.directed = cfg.directed;
    if (cfg.length == 0) return s;
    if (cfg.n < 2) throw DimensionError("gen_stream: need at least two nodes for edge events");

    Rng rng(cfg.seed);
    StreamBuilder b(cfg, s);
    switch (cfg.kind) {
        case StreamKind::random: gen_random(cfg, b, rng); break;
        case StreamKind::path_churn: gen_path_churn(cfg, b, rng); break;
        case StreamKind::star_churn: gen_star_churn(cfg, b, rng); break;
        case StreamKind::adversarial_degree: gen_adversarial(cfg, b, rng); break;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Ground truth
// ---------------------------------------------------------------------------

DistMatrix oracle_bfs(const DynGraph& g, const std::vector<int>& sources, int hop_cap) {
    const int n = g.n();
    DistMatrix out(static_cast<int>(sources.size()), n);
    std::vector<Dist> dist(n);
    std::deque<int> queue;
    for (size_t row = 0; row < sources.size(); ++row) {
        const int s = sources[row];
        if (s < 0 || s >= n) throw DimensionError("oracle_bfs: source out of range");
        std::fill(dist.begin(), dist.end(), kNoPath);
        dist[s] = 0;
        queue.clear();
        queue.push_back(s);
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            if (hop_cap >= 0 && dist[u] >= hop_cap) continue;
            for (int w : g.neighbors(u)) {
                if (dist[w] != kNoPath) continue;
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
        for (int v = 0; v < n; ++v) out.at(static_cast<int>(row), v) = dist[v];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Verified replay
// ---------------------------------------------------------------------------

namespace {

constexpr double kRatioTol = 1e-9;

// Accumulates one event's comparison outcome.
struct CheckTally {
    long compared = 0;
    long violations = 0;
    double ratio = 1.0;

    // truth <= est <= (1 + eps) * truth, with unreachable treated as a
    // required exact match. eps 0 demands equality.
    void pair(Dist est, Dist truth, double eps) {
        ++compared;
        if (truth == kNoPath || est == kNoPath) {
            if (est != truth) ++violations;
            return;
        }
        if (est < truth) {
            ++violations;
            return;
        }
        if (truth == 0) {
            if (est != 0) ++violations;
            return;
        }
        const double r = static_cast<double>(est) / static_cast<double>(truth);
        ratio = std::max(ratio, r);
        if (static_cast<double>(est) > (1.0 + eps) * static_cast<double>(truth) + kRatioTol) {
            ++violations;
        }
    }

    // Two-sided diameter corridor: (2/3 - eps) * truth - 1/3 <= est <=
    // (1 + eps) * truth, unreachable again matched exactly.
    void diameter(Dist est, Dist truth, double eps) {
        ++compared;
        if (truth == kNoPath || est == kNoPath) {
            if (est != truth) ++violations;
            return;
        }
        const double lo = (2.0 / 3.0 - eps) * static_cast<double>(truth) - 1.0 / 3.0;
        const double hi = (1.0 + eps) * static_cast<double>(truth);
        if (static_cast<double>(est) < lo - kRatioTol ||
            static_cast<double>(est) > hi + kRatioTol) {
            ++violations;
        }
        if (truth > 0) {
            ratio = std::max(ratio, static_cast<double>(est) / static_cast<double>(truth));
        }
    }
};

// One structure per query kind, built lazily at its first query from the
// graph state of that moment; the arguments seen first become the stream's
// binding for that kind.
struct LiveOracles {
    std::map<QueryKind, std::string> bound;
    std::unique_ptr<DistanceOracle> st, sssp, mssp, apsp;
    std::unique_ptr<ExactStDistance> xst;
    std::unique_ptr<DiameterEstimator> diam;

    void update(EdgeOp op, int u, int v) {
        for (auto* o : {st.get(), sssp.get(), mssp.get(), apsp.get()}) {
            if (o) o->update(op, u, v);
        }
        if (xst) xst->update(op, u, v);
        if (diam) diam->update(op, u, v);
    }
};

std::string args_key(const StreamEvent& e) {
    std::ostringstream out;
    switch (e.query) {
        case QueryKind::st:
        case QueryKind::xst:
            out << e.u << ':' << e.v;
            break;
        case QueryKind::sssp:
            out << e.u;
            break;
        case QueryKind::mssp:
            for (size_t i = 0; i < e.sources.size(); ++i) {
                if (i) out << ',';
                out << e.sources[i];
            }
            break;
        case QueryKind::apsp:
        case QueryKind::diam:
            break;
    }
    return out.str();
}

// Rejects a query whose arguments differ from the kind's first-seen binding:
// each kind addresses one maintained structure per stream.
void bind_args(LiveOracles& live, const StreamEvent& e, int index) {
    const std::string key = args_key(e);
    auto [it, fresh] = live.bound.emplace(e.query, key);
    if (!fresh && it->second != key) {
        event_error(index, std::string(to_string(e.query)) +
                               " query arguments differ from the stream's earlier binding (" +
                               it->second + ")");
    }
}

// Structural invariant monitors fed alongside the structures under test.
// The hitting-set and emulator monitors need undirected semantics; directed
// replays keep only the algebraic spot check.
struct Monitors {
    static constexpr int kHistBuckets = 14;  // 0..12 exact, 13 = beyond bound

    std::optional<HittingSet> hs;
    std::unique_ptr<Emulator> emu;
    double emu_eps = 0.5;
    std::unique_ptr<BoundedDistance> inv;
    std::vector<int> inv_nodes;
    DynInvStats inv_last;
    Rng rng{1};

    std::vector<long> hist = std::vector<long>(kHistBuckets, 0);
    long rebuild_spikes = 0;

    Monitors(const DynGraph& g, const RunConfig& cfg) : rng(cfg.seed ^ 0x9e3779b97f4a7c15ull) {
        const int n = g.n();
        if (!g.directed() && n >= 2) {
            hs.emplace(g, default_degree_target(n));
            EmulatorOptions eopts;
            eopts.eps = cfg.eps;
            eopts.field = cfg.field;
            emu = std::make_unique<Emulator>(g, EmulatorVariant::e2, eopts);
            emu_eps = emu->eps();
        }
        // Small algebraic block, compared entrywise against capped BFS.
        std::vector<int> picks;
        for (int i = 0; i < std::min(n, 6); ++i) picks.push_back((i * std::max(1, n / 6)) % n);
        IndexSet spots(picks);
        inv_nodes = spots.items();
        BoundedDistOptions bopts;
        bopts.field = cfg.field;
        bopts.engine = BoundedDistOptions::Engine::algebraic;
        bopts.caps = InverseCaps::defaults_for(n);
        bopts.caps.outer = n;  // the spot set may exceed the default outer cap
        inv = make_bounded_distance(n, 4, g.directed(), spots, spots, g.edges(), bopts);
        inv_last = inv->stats();
    }

    // Applies the update to every monitor and returns the number of
    // violated invariants.
    long update(const DynGraph& g, EdgeOp op, int u, int v) {
        long violations = 0;
        if (hs) {
            const auto changes = hs->update(op, u, v);
            const int recourse = static_cast<int>(changes.size());
            ++hist[std::min(recourse, kHistBuckets - 1)];
            if (!hs->degenerate() && recourse > 12) ++violations;
            violations += coverage_violations();
            const int n = g.n();
            const double size_bound =
                8.0 * (static_cast<double>(n) / hs->degree_threshold()) * std::log(n + 2.0);
            if (hs->size() > size_bound) ++violations;
        }
        if (emu) {
            emu->update(op, u, v);
            violations += emulator_violations(g);
        }
        if (inv) {
            if (op == EdgeOp::insert) {
                inv->insert_edge(u, v);
            } else {
                inv->delete_edge(u, v);
            }
            violations += inverse_violations(g);
            const DynInvStats now = inv->stats();
            if (now.folds + now.merges > inv_last.folds + inv_last.merges) ++rebuild_spikes;
            inv_last = now;
        }
        return violations;
    }

private:
    long coverage_violations() {
        const DynGraph& g = hs->graph();
        const int d = hs->degree_threshold();
        long bad = 0;
        for (int v = 0; v < g.n(); ++v) {
            if (g.degree(v) < d) continue;
            bool hit = false;
            for (int w : g.neighbors(v)) {
                if (hs->contains(w)) {
                    hit = true;
                    break;
                }
            }
            if (!hit) ++bad;
        }
        return bad;
    }

    long emulator_violations(const DynGraph& g) {
        const int n = g.n();
        long bad = 0;
        const double size_bound =
            6.0 * std::pow(n, 1.5) * std::sqrt(std::max(1.0, std::log(n)));
        if (static_cast<double>(emu->edges().size()) > size_bound) ++bad;
        // One sampled source per update: emulator distances must dominate
        // the true ones and stay within (1+eps)d + 2.
        const int src = rng.below(n);
        const std::vector<Dist> through = dijkstra(emu->weighted_view(), src);
        const DistMatrix truth = oracle_bfs(g, {src});
        for (int v = 0; v < n; ++v) {
            const Dist t = truth.at(0, v);
            const Dist h = through[v];
            if (t == kNoPath || h == kNoPath) {
                if (t != h) ++bad;
                continue;
            }
            if (h < t) ++bad;
            if (static_cast<double>(h) >
                (1.0 + emu_eps) * static_cast<double>(t) + 2.0 + kRatioTol) {
                ++bad;
            }
        }
        return bad;
    }

    long inverse_violations(const DynGraph& g) {
        const DistMatrix got = inv->distances();
        const DistMatrix truth = oracle_bfs(g, inv_nodes, inv->hop_bound());
        long bad = 0;
        for (size_t i = 0; i < inv_nodes.size(); ++i) {
            for (size_t j = 0; j < inv_nodes.size(); ++j) {
                if (got.at(static_cast<int>(i), static_cast<int>(j)) !=
                    truth.at(static_cast<int>(i), inv_nodes[j])) {
                    ++bad;
                }
            }
        }
        return bad;
    }
};

std::vector<int> all_nodes(int n) {
    std::vector<int> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = i;
    return ids;
}

// Closure diameter from all-pairs BFS rows: kNoPath when disconnected.
Dist closure_diameter(const DistMatrix& rows, int n) {
    Dist best = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Dist d = rows.at(i, j);
            if (d == kNoPath) return kNoPath;
            best = std::max(best, d);
        }
    }
    return best;
}

}  // namespace

VerificationReport run_stream(const UpdateStream& s, const RunConfig& cfg) {
    if (s.n < 1) throw ParseError("stream header: node count must be positive");
    if (cfg.eps <= 0.0) throw DimensionError("run_stream: eps must be positive");
    if (cfg.xst_hops < 1) throw DimensionError("run_stream: xst_hops must be positive");

    const auto run_start = Clock::now();
    VerificationReport rep;
    rep.summary.seed = cfg.seed;
    rep.summary.recourse_hist.assign(Monitors::kHistBuckets, 0);

    DynGraph mirror(s.n, s.directed);
    LiveOracles live;
    std::optional<Monitors> monitors;
    if (cfg.verify) monitors.emplace(mirror, cfg);

    OracleOptions oopts;
    oopts.field = cfg.field;
    oopts.rebuild_every = cfg.rebuild_every;

    for (size_t i = 0; i < s.events.size(); ++i) {
        const StreamEvent& e = s.events[i];
        const int index = static_cast<int>(i);
        const auto t0 = Clock::now();
        EventRecord rec;
        rec.index = index;

        if (e.type != StreamEvent::Type::query) {
            const EdgeOp op = e.type == StreamEvent::Type::insert ? EdgeOp::insert
                                                                  : EdgeOp::remove;
            rec.op = op == EdgeOp::insert ? '+' : '-';
            rec.u = e.u;
            rec.v = e.v;
            try {
                if (op == EdgeOp::insert) {
                    mirror.insert_edge(e.u, e.v);
                } else {
                    mirror.delete_edge(e.u, e.v);
                }
            } catch (const GraphError& err) {
                event_error(index, err.what());
            }
            live.update(op, e.u, e.v);
            if (monitors) rec.violations = monitors->update(mirror, op, e.u, e.v);
            ++rep.summary.updates;
        } else {
            rec.op = '?';
            rec.query = to_string(e.query);
            check_query_args(e, s.n, index);
            bind_args(live, e, index);
            CheckTally tally;
            try {
                switch (e.query) {
                    case QueryKind::st: {
                        rec.u = e.u;
                        rec.v = e.v;
                        if (!live.st) {
                            live.st = std::make_unique<DistanceOracle>(DistanceOracle::make_st(
                                mirror, e.u, e.v, cfg.eps, oopts));
                        }
                        const Dist got = live.st->st_query().value;
                        rec.answer = got;
                        if (cfg.verify) {
                            rec.truth = oracle_bfs(mirror, {e.u}).at(0, e.v);
                            tally.pair(got, rec.truth,
                                       live.st->exact_mode() ? 0.0 : live.st->eps());
                        }
                        break;
                    }
                    case QueryKind::sssp: {
                        rec.u = e.u;
                        if (!live.sssp) {
                            live.sssp = std::make_unique<DistanceOracle>(
                                DistanceOracle::make_sssp(mirror, e.u, cfg.eps, oopts));
                        }
                        const auto ests = live.sssp->sssp_query();
                        if (cfg.verify) {
                            const DistMatrix truth = oracle_bfs(mirror, {e.u});
                            const double eps =
                                live.sssp->exact_mode() ? 0.0 : live.sssp->eps();
                            for (int v = 0; v < s.n; ++v) {
                                tally.pair(ests[v].value, truth.at(0, v), eps);
                            }
                        }
                        break;
                    }
                    case QueryKind::mssp: {
                        if (!live.mssp) {
                            live.mssp = std::make_unique<DistanceOracle>(
                                DistanceOracle::make_mssp(mirror, e.sources, cfg.eps, oopts));
                        }
                        const auto rows = live.mssp->mssp_query();
                        if (cfg.verify) {
                            const auto& srcs = live.mssp->query_sources();
                            const DistMatrix truth = oracle_bfs(mirror, srcs);
                            const double eps =
                                live.mssp->exact_mode() ? 0.0 : live.mssp->eps();
                            for (size_t r = 0; r < srcs.size(); ++r) {
                                for (int v = 0; v < s.n; ++v) {
                                    tally.pair(rows[r][v].value,
                                               truth.at(static_cast<int>(r), v), eps);
                                }
                            }
                        }
                        break;
                    }
                    case QueryKind::apsp: {
                        if (!live.apsp) {
                            live.apsp = std::make_unique<DistanceOracle>(
                                DistanceOracle::make_apsp(mirror, cfg.eps, oopts));
                        }
                        const auto rows = live.apsp->apsp_query();
                        if (cfg.verify) {
                            const DistMatrix truth = oracle_bfs(mirror, all_nodes(s.n));
                            const double eps =
                                live.apsp->exact_mode() ? 0.0 : live.apsp->eps();
                            for (int u = 0; u < s.n; ++u) {
                                for (int v = 0; v < s.n; ++v) {
                                    tally.pair(rows[u][v].value, truth.at(u, v), eps);
                                }
                            }
                        }
                        break;
                    }
                    case QueryKind::diam: {
                        if (!live.diam) {
                            DiameterOptions dopts;
                            dopts.eps = cfg.eps;
                            dopts.seed = cfg.seed;
                            dopts.field = cfg.field;
                            live.diam = std::make_unique<DiameterEstimator>(mirror, dopts);
                        }
                        const Dist got = live.diam->estimate();
                        rec.answer = got;
                        if (cfg.verify) {
                            rec.truth =
                                closure_diameter(oracle_bfs(mirror, all_nodes(s.n)), s.n);
                            tally.diameter(got, rec.truth, live.diam->eps());
                        }
                        break;
                    }
                    case QueryKind::xst: {
                        rec.u = e.u;
                        rec.v = e.v;
                        if (!live.xst) {
                            ExactStOptions xopts;
                            xopts.field = cfg.field;
                            xopts.seed = cfg.seed;
                            live.xst = std::make_unique<ExactStDistance>(
                                mirror, e.u, e.v, cfg.xst_hops, xopts);
                        }
                        const Dist got = live.xst->query();
                        rec.answer = got;
                        if (cfg.verify) {
                            rec.truth = oracle_bfs(mirror, {e.u}).at(0, e.v);
                            tally.pair(got, rec.truth, 0.0);
                        }
                        break;
                    }
                }
            } catch (const DimensionError& err) {
                event_error(index, err.what());
            }
            rec.compared = tally.compared;
            rec.violations = tally.violations;
            rec.ratio = tally.ratio;
            ++rep.summary.queries;
            rep.summary.comparisons += tally.compared;
            rep.summary.max_ratio = std::max(rep.summary.max_ratio, tally.ratio);
        }

        rec.pass = rec.violations == 0;
        rec.wall_ms = ms_since(t0);
        ++rep.summary.events;
        if (!rec.pass) ++rep.summary.failures;
        rep.events.push_back(std::move(rec));
    }

    if (monitors) {
        rep.summary.rebuild_spikes = monitors->rebuild_spikes;
        rep.summary.recourse_hist = monitors->hist;
    }
    rep.summary.wall_ms = ms_since(run_start);
    return rep;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

std::string VerificationReport::to_ndjson(bool include_timings) const {
    std::ostringstream out;
    for (const EventRecord& e : events) {
        ordered_json j;
        j["e"] = e.index;
        j["op"] = std::string(1, e.op);
        if (e.op != '?') {
            j["u"] = e.u;
            j["v"] = e.v;
        } else {
            j["q"] = e.query;
            if (e.u >= 0) j["u"] = e.u;
            if (e.v >= 0) j["v"] = e.v;
            if (e.query == "st" || e.query == "diam" || e.query == "xst") {
                j["answer"] = e.answer;
                j["truth"] = e.truth;
            }
            j["cmp"] = e.compared;
            j["ratio"] = e.ratio;
        }
        j["viol"] = e.violations;
        j["pass"] = e.pass;
        if (include_timings) j["ms"] = e.wall_ms;
        out << j.dump() << '\n';
    }
    ordered_json j;
    j["schema"] = summary.schema;
    j["summary"] = true;
    j["events"] = summary.events;
    j["updates"] = summary.updates;
    j["queries"] = summary.queries;
    j["comparisons"] = summary.comparisons;
    j["failures"] = summary.failures;
    j["max_ratio"] = summary.max_ratio;
    j["rebuild_spikes"] = summary.rebuild_spikes;
    j["recourse_hist"] = summary.recourse_hist;
    j["seed"] = summary.seed;
    if (include_timings) j["ms"] = summary.wall_ms;
    out << j.dump() << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// Benchmark driver
// ---------------------------------------------------------------------------

namespace {

// Answers read back after every update, per oracle kind.
void read_answers(const DistanceOracle& o) {
    switch (o.kind()) {
        case OracleKind::st: (void)o.st_query(); break;
        case OracleKind::sssp: (void)o.sssp_query(); break;
        case OracleKind::mssp:
        case OracleKind::apsp: (void)o.mssp_query(); break;
    }
}

}  // namespace

BenchReport run_bench(const BenchConfig& cfg) {
    BenchReport rep;
    for (const int n : cfg.sizes) {
        if (n < 2) throw DimensionError("run_bench: sizes must be at least 2");
        GenConfig gen;
        gen.kind = cfg.stream;
        gen.n = n;
        gen.length = cfg.updates;
        gen.seed = cfg.seed;
        const UpdateStream stream = gen_stream(gen);

        OracleOptions oopts;
        oopts.engine = cfg.engine;
        std::vector<int> sources;
        DynGraph start(n, false);
        std::unique_ptr<DistanceOracle> oracle;
        switch (cfg.kind) {
            case OracleKind::st:
                sources = {0};
                oracle = std::make_unique<DistanceOracle>(
                    DistanceOracle::make_st(start, 0, n - 1, cfg.eps, oopts));
                break;
            case OracleKind::sssp:
                sources = {0};
                oracle = std::make_unique<DistanceOracle>(
                    DistanceOracle::make_sssp(start, 0, cfg.eps, oopts));
                break;
            case OracleKind::mssp:
                sources = all_nodes(std::min(4, n));
                oracle = std::make_unique<DistanceOracle>(
                    DistanceOracle::make_mssp(start, sources, cfg.eps, oopts));
                break;
            case OracleKind::apsp:
                sources = all_nodes(n);
                oracle = std::make_unique<DistanceOracle>(
                    DistanceOracle::make_apsp(start, cfg.eps, oopts));
                break;
        }

        BenchRow row;
        row.n = n;
        DynGraph mirror(n, false);
        long timed = 0;
        for (const StreamEvent& e : stream.events) {
            if (e.type == StreamEvent::Type::query) continue;
            const EdgeOp op =
                e.type == StreamEvent::Type::insert ? EdgeOp::insert : EdgeOp::remove;
            const auto t0 = Clock::now();
            oracle->update(op, e.u, e.v);
            read_answers(*oracle);
            row.oracle_ms += ms_since(t0);

            const auto t1 = Clock::now();
            if (op == EdgeOp::insert) {
                mirror.insert_edge(e.u, e.v);
            } else {
                mirror.delete_edge(e.u, e.v);
            }
            (void)oracle_bfs(mirror, sources);
            row.baseline_ms += ms_since(t1);
            ++timed;
        }
        if (timed > 0) {
            row.oracle_ms /= static_cast<double>(timed);
            row.baseline_ms /= static_cast<double>(timed);
        }
        rep.rows.push_back(row);
        if (rep.crossover_n < 0 && row.oracle_ms < row.baseline_ms) rep.crossover_n = n;
    }
    return rep;
}

std::string BenchReport::to_ndjson() const {
    std::ostringstream out;
    for (const BenchRow& r : rows) {
        ordered_json j;
        j["n"] = r.n;
        j["oracle_ms"] = r.oracle_ms;
        j["baseline_ms"] = r.baseline_ms;
        out << j.dump() << '\n';
    }
    ordered_json j;
    j["summary"] = true;
    j["crossover_n"] = crossover_n;
    out << j.dump() << '\n';
    return out.str();
}

}  // namespace dynshort
