// Command-line driver for the dynamic distance toolkit: generate update
// streams, replay them through the maintained oracles with verification
// against recomputed ground truth, and benchmark maintenance against
// recomputation.
//
// Subcommands: gen, run, verify, bench. Every option can also come from a
// single config file (--config, INI format with [subcommand] sections).
// Environment overrides are limited to DYNSHORT_SEED and DYNSHORT_THREADS.
//
// Exit codes: 0 all checks passed (or nothing to check), 1 verification
// failures, 2 bad input or usage.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dynshort/errors.hpp"
#include "dynshort/harness.hpp"

namespace {

using namespace dynshort;

std::vector<QueryKind> parse_query_list(const std::vector<std::string>& names) {
    std::vector<QueryKind> kinds;
    for (const std::string& name : names) {
        if (!name.empty()) kinds.push_back(query_kind_from(name));
    }
    if (kinds.empty()) throw ParseError("empty query kind list");
    return kinds;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write: " + path);
    out << text;
    if (!out) throw ParseError("write failed: " + path);
}

// Summary line on stderr so stdout stays clean NDJSON.
void print_summary(const RunSummary& s) {
    std::cerr << "events=" << s.events << " updates=" << s.updates
              << " queries=" << s.queries << " comparisons=" << s.comparisons
              << " failures=" << s.failures << " max_ratio=" << s.max_ratio
              << " rebuild_spikes=" << s.rebuild_spikes << "\n";
}

struct RunArgs {
    std::string stream_path;
    std::string report_path;
    double eps = 0.5;
    std::uint64_t seed = 1;
    std::string field = "deterministic";
    int copies = 3;
    int xst_hops = 8;
    int rebuild_every = 1;
    int threads = 1;
    bool no_verify = false;
    bool quiet = false;
};

void add_run_options(CLI::App* cmd, RunArgs& a, bool allow_no_verify) {
    cmd->add_option("--stream", a.stream_path, "Update stream file to replay")->required();
    cmd->add_option("--report", a.report_path,
                    "Write the NDJSON report here instead of stdout");
    cmd->add_option("--eps", a.eps, "Approximation parameter of the oracles")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", a.seed, "Seed for randomized estimators and monitors")
        ->envname("DYNSHORT_SEED");
    cmd->add_option("--field", a.field, "Field mode of the algebraic engine")
        ->check(CLI::IsMember({"deterministic", "randomized"}));
    cmd->add_option("--copies", a.copies, "Prime copies in randomized field mode")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--xst-hops", a.xst_hops, "Hop budget of the exact s-t structure")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--rebuild-every", a.rebuild_every,
                    "Emulator rebuild cadence inside the oracles")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--threads", a.threads,
                    "Reserved for parallel verification; this build replays "
                    "and verifies on one thread")
        ->envname("DYNSHORT_THREADS")
        ->check(CLI::PositiveNumber);
    if (allow_no_verify) {
        cmd->add_flag("--no-verify", a.no_verify,
                      "Replay and answer queries without ground-truth checks");
    }
    cmd->add_flag("--quiet", a.quiet, "Emit only the summary record");
}

int do_run(const RunArgs& a, bool force_verify) {
    const UpdateStream stream = load_stream(a.stream_path);
    if (force_verify) validate_stream(stream);

    RunConfig cfg;
    cfg.eps = a.eps;
    cfg.seed = a.seed;
    cfg.verify = force_verify || !a.no_verify;
    cfg.xst_hops = a.xst_hops;
    cfg.rebuild_every = a.rebuild_every;
    cfg.field = a.field == "randomized" ? FieldConfig::randomized(a.seed, a.copies)
                                        : FieldConfig::deterministic();

    const VerificationReport rep = run_stream(stream, cfg);
    if (a.quiet) {
        VerificationReport bare;
        bare.summary = rep.summary;
        write_text(a.report_path, bare.to_ndjson());
    } else {
        write_text(a.report_path, rep.to_ndjson());
    }
    print_summary(rep.summary);
    return rep.summary.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamic graph distances under edge updates"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "Config file (INI; [gen]/[run]/[verify]/[bench] sections)");

    // ---- gen ----
    auto* gen_cmd = app.add_subcommand("gen", "Generate an update stream");
    struct {
        std::string kind = "random";
        int nodes = 50;
        int length = 200;
        std::uint64_t seed = 1;
        bool directed = false;
        int query_every = 0;
        std::vector<std::string> queries = {"sssp"};
        int degree_target = 0;
        std::string out;
    } g;
    gen_cmd->add_option("--kind", g.kind, "Workload shape")
        ->check(CLI::IsMember({"random", "path-churn", "star-churn", "adversarial-degree"}));
    gen_cmd->add_option("--nodes", g.nodes, "Node count")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--updates,--length", g.length, "Total events to emit")
        ->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--seed", g.seed, "Generator seed")->envname("DYNSHORT_SEED");
    gen_cmd->add_flag("--directed", g.directed, "Generate a directed stream");
    gen_cmd->add_option("--query-every", g.query_every,
                        "Emit a query at every k-th event slot (0 = none)")
        ->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--queries", g.queries,
                        "Comma-separated query kinds cycled at query slots")
        ->delimiter(',');
    gen_cmd->add_option("--degree-target", g.degree_target,
                        "adversarial-degree: threshold to oscillate around (0 = auto)")
        ->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--out", g.out, "Output file ('-' = stdout)");

    // ---- run / verify ----
    auto* run_cmd = app.add_subcommand("run", "Replay a stream and report answers");
    RunArgs run_args;
    add_run_options(run_cmd, run_args, /*allow_no_verify=*/true);

    auto* verify_cmd =
        app.add_subcommand("verify", "Validate a stream and replay it fully checked");
    RunArgs verify_args;
    add_run_options(verify_cmd, verify_args, /*allow_no_verify=*/false);

    // ---- bench ----
    auto* bench_cmd =
        app.add_subcommand("bench", "Compare maintenance against BFS recomputation");
    struct {
        std::string kind = "sssp";
        std::vector<int> sizes = {50, 100, 200};
        int updates = 50;
        double eps = 0.5;
        std::uint64_t seed = 1;
        std::string stream = "random";
        std::string engine = "automatic";
        std::string report;
    } b;
    bench_cmd->add_option("--kind", b.kind, "Oracle kind to benchmark")
        ->check(CLI::IsMember({"st", "sssp", "mssp", "apsp"}));
    bench_cmd->add_option("--sizes", b.sizes, "Node counts to sweep")->delimiter(',');
    bench_cmd->add_option("--updates", b.updates, "Edge updates timed per size")
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--eps", b.eps, "Approximation parameter")
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", b.seed, "Stream seed")->envname("DYNSHORT_SEED");
    bench_cmd->add_option("--stream-kind", b.stream, "Workload shape")
        ->check(CLI::IsMember({"random", "path-churn", "star-churn", "adversarial-degree"}));
    bench_cmd->add_option("--engine", b.engine, "Direct-channel backend override")
        ->check(CLI::IsMember({"automatic", "algebraic", "bfs"}));
    bench_cmd->add_option("--report", b.report, "Write the NDJSON rows here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen_cmd->parsed()) {
            GenConfig cfg;
            cfg.kind = stream_kind_from(g.kind);
            cfg.n = g.nodes;
            cfg.length = g.length;
            cfg.seed = g.seed;
            cfg.directed = g.directed;
            cfg.query_every = g.query_every;
            cfg.query_kinds = parse_query_list(g.queries);
            cfg.degree_target = g.degree_target;
            const UpdateStream s = gen_stream(cfg);
            write_text(g.out, to_text(s));
            std::cerr << "generated " << s.events.size() << " events on " << s.n
                      << " nodes\n";
            return 0;
        }
        if (run_cmd->parsed()) return do_run(run_args, /*force_verify=*/false);
        if (verify_cmd->parsed()) return do_run(verify_args, /*force_verify=*/true);
        if (bench_cmd->parsed()) {
            BenchConfig cfg;
            cfg.kind = b.kind == "st"     ? OracleKind::st
                       : b.kind == "mssp" ? OracleKind::mssp
                       : b.kind == "apsp" ? OracleKind::apsp
                                          : OracleKind::sssp;
            cfg.sizes = b.sizes;
            cfg.updates = b.updates;
            cfg.eps = b.eps;
            cfg.seed = b.seed;
            cfg.stream = stream_kind_from(b.stream);
            cfg.engine = b.engine == "algebraic" ? BoundedDistOptions::Engine::algebraic
                         : b.engine == "bfs"     ? BoundedDistOptions::Engine::bfs
                                                 : BoundedDistOptions::Engine::automatic;
            const BenchReport rep = run_bench(cfg);
            write_text(b.report, rep.to_ndjson());
            if (rep.crossover_n >= 0) {
                std::cerr << "maintenance wins from n=" << rep.crossover_n << "\n";
            } else {
                std::cerr << "recomputation won at every benchmarked size\n";
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
