#include "tablefill/cli.hpp"

#include "tablefill/bench.hpp"
#include "tablefill/index.hpp"
#include "tablefill/index_io.hpp"
#include "tablefill/ingest.hpp"
#include "tablefill/service.hpp"
#include "tablefill/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <csignal>
#include <fstream>
#include <ostream>
#include <thread>

namespace tablefill {
namespace {

namespace fs = std::filesystem;

constexpr std::size_t kMaxReportedLineErrors = 20;

struct ParamFlags {
    std::string file;
    std::optional<double> lambda_entity, lambda_caption, mu_labels, mu_entity, k1, b;
    std::optional<std::size_t> top_k;
    std::optional<std::string> seed_tables;

    void add_to(CLI::App& app) {
        app.add_option("--params", file, "JSON file with scoring parameters")->check(CLI::ExistingFile);
        app.add_option("--lambda-e", lambda_entity, "Weight of category similarity in entity similarity");
        app.add_option("--lambda-c", lambda_caption, "Weight of the KB part in caption likelihood");
        app.add_option("--mu-labels", mu_labels, "Dirichlet prior for column labels likelihood");
        app.add_option("--mu-entity", mu_entity, "Dirichlet prior for entity abstract models");
        app.add_option("--bm25-k1", k1, "BM25 k1");
        app.add_option("--bm25-b", b, "BM25 b");
        app.add_option("--top-k", top_k, "Tables kept per retrieval route");
        app.add_option("--seed-tables", seed_tables, "Tables counted for co-occurrence: all or any")
            ->check(CLI::IsMember({"all", "any"}));
    }

    ScoringParams resolve() const {
        ScoringParams p;
        if (!file.empty()) {
            std::ifstream in(file);
            const auto j = nlohmann::json::parse(in);
            p.lambda_entity = j.value("lambdaE", p.lambda_entity);
            p.lambda_caption = j.value("lambdaC", p.lambda_caption);
            p.mu_labels = j.value("muLabels", p.mu_labels);
            p.mu_entity = j.value("muEntity", p.mu_entity);
            p.bm25_k1 = j.value("bm25K1", p.bm25_k1);
            p.bm25_b = j.value("bm25B", p.bm25_b);
            p.top_k_tables = j.value("topKTables", p.top_k_tables);
            if (j.contains("seedTables")) {
                p.seed_table_match = j.at("seedTables").get<std::string>() == "any" ? SeedTableMatch::any_entity
                                                                                    : SeedTableMatch::all_entities;
            }
        }
        if (lambda_entity) p.lambda_entity = *lambda_entity;
        if (lambda_caption) p.lambda_caption = *lambda_caption;
        if (mu_labels) p.mu_labels = *mu_labels;
        if (mu_entity) p.mu_entity = *mu_entity;
        if (k1) p.bm25_k1 = *k1;
        if (b) p.bm25_b = *b;
        if (top_k) p.top_k_tables = *top_k;
        if (seed_tables) p.seed_table_match = *seed_tables == "any" ? SeedTableMatch::any_entity : SeedTableMatch::all_entities;
        p.validate();
        return p;
    }
};

int cmd_build(const fs::path& corpus, const fs::path& kb, const fs::path& out_dir, std::ostream& out,
              std::ostream& err) {
    for (const auto& p : {kb, corpus}) {
        if (!fs::is_regular_file(p)) {
            err << "error: input file not found: " << p.string() << "\n";
            return 1;
        }
    }
    try {
        auto kb_result = load_kb(kb);
        auto corpus_result = load_corpus(corpus, kb_result.id_set());
        const auto stats = combine_stats(kb_result, corpus_result);

        std::size_t reported = 0;
        for (const auto& [file, errors] : {std::pair{kb, &kb_result.errors}, std::pair{corpus, &corpus_result.errors}}) {
            for (const auto& e : *errors) {
                if (reported++ < kMaxReportedLineErrors) err << file.string() << ":" << e.line << ": " << e.message << "\n";
            }
        }
        if (reported > kMaxReportedLineErrors) err << "(" << reported - kMaxReportedLineErrors << " more line errors)\n";

        auto bundle = build_indexes(std::move(corpus_result.tables), std::move(kb_result.entities));
        bundle.provenance = {sha256_file(corpus), sha256_file(kb)};
        persist(bundle, out_dir);

        out << "tables                " << stats.table_count << "\n"
            << "entities              " << stats.entity_count << "\n"
            << "dropped entities      " << stats.dropped_entities << "\n"
            << "dangling links        " << stats.dangling_links << "\n"
            << "label vocabulary      " << stats.label_vocabulary_size << "\n"
            << "duplicate ids         " << stats.duplicate_ids << "\n"
            << "line errors           " << stats.line_errors << "\n"
            << "index written to " << out_dir.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_serve(const fs::path& index, const std::string& host, int port, const ScoringParams& params, std::ostream& out,
              std::ostream& err) {
    std::shared_ptr<const IndexBundle> bundle;
    try {
        bundle = std::make_shared<const IndexBundle>(load_index(index));
    } catch (const std::exception& e) {
        err << "error: cannot load index: " << e.what() << "\n";
        return 1;
    }
    Service service(bundle, params);
    HttpServer server(service);
    try {
        server.bind(host, port);
    } catch (const ServeError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    // Signals are blocked before the server spawns its workers, so only the
    // watcher thread receives them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    sigset_t previous;
    pthread_sigmask(SIG_BLOCK, &signals, &previous);

    std::atomic<bool> done{false};
    std::thread watcher([&] {
        const timespec tick{0, 200'000'000};
        while (!done.load()) {
            if (sigtimedwait(&signals, nullptr, &tick) > 0) {
                server.stop();
                return;
            }
        }
    });

    out << "serving " << bundle->tables.size() << " tables, " << bundle->entity_index.records.size()
        << " entities on http://" << host << ":" << server.port() << std::endl;
    server.listen();
    done = true;
    watcher.join();
    pthread_sigmask(SIG_SETMASK, &previous, nullptr);
    out << "stopped" << std::endl;
    return 0;
}

struct BenchFlags {
    std::string index, mode = "rows", seeds, json_out;
    std::vector<std::size_t> sizes{1, 2, 3, 4, 5};
    std::size_t repeats = 10, limit = 10, concurrency = 1;
    std::optional<std::size_t> sample;
    std::uint64_t rng_seed = 1;
    bool uncapped = false;
    bool full_seed = false;
};

int cmd_bench(const BenchFlags& f, ScoringParams params, std::ostream& out, std::ostream& err) {
    if (f.sizes.empty()) {
        err << "error: --sizes needs at least one value\n";
        return 1;
    }
    try {
        const auto bundle = load_index(f.index);
        if (f.uncapped) params.top_k_tables = std::max<std::size_t>(1, bundle.table_count());
        BenchOptions options;
        options.mode = parse_bench_mode(f.mode);
        options.sizes = f.sizes;
        options.repeats = f.repeats;
        options.limit = f.limit;
        options.concurrency = f.concurrency;
        options.isolate = !f.full_seed;

        std::vector<SeedTable> seeds;
        if (f.sample) {
            // Large enough for every size in both modes, so one file serves both.
            const auto largest = *std::max_element(f.sizes.begin(), f.sizes.end());
            seeds = sample_seeds(bundle, *f.sample, f.rng_seed, largest, largest);
            if (!f.seeds.empty()) write_seeds(f.seeds, seeds);
        } else if (!f.seeds.empty()) {
            seeds = read_seeds(f.seeds);
        } else {
            err << "error: --seeds or --sample is required\n";
            return 1;
        }
        if (seeds.empty()) {
            err << "error: no seed tables available\n";
            return 1;
        }

        const auto report = run_bench(bundle, params, seeds, options);
        if (!f.json_out.empty()) {
            std::ofstream json_file(f.json_out, std::ios::trunc);
            json_file << report_json(report) << "\n";
            if (!json_file) throw std::runtime_error("cannot write " + f.json_out);
        }
        out << report_table(report);
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Row and column suggestions for relational tables", "tablefill"};
    app.require_subcommand(1);

    std::string corpus, kb, out_dir;
    auto* build = app.add_subcommand("build", "Ingest a corpus and KB and write the index");
    build->add_option("--corpus", corpus, "Table corpus, JSON Lines")->required();
    build->add_option("--kb", kb, "Knowledge base, JSON Lines")->required();
    build->add_option("--out", out_dir, "Index directory")->required();

    std::string serve_index, host = "127.0.0.1";
    int port = 8080;
    ParamFlags serve_params;
    auto* serve = app.add_subcommand("serve", "Serve the HTTP API over an index");
    serve->add_option("--index", serve_index, "Index directory")->required();
    serve->add_option("--port", port, "TCP port, 0 for any free port")->check(CLI::Range(0, 65535));
    serve->add_option("--host", host, "Bind address");
    serve_params.add_to(*serve);

    BenchFlags bf;
    ParamFlags bench_params;
    auto* bench = app.add_subcommand("bench", "Measure suggestion latency against seed size");
    bench->add_option("--index", bf.index, "Index directory")->required();
    bench->add_option("--mode", bf.mode, "rows or columns")->check(CLI::IsMember({"rows", "columns"}));
    bench->add_option("--sizes", bf.sizes, "Seed sizes")->delimiter(',');
    bench->add_option("--repeats", bf.repeats, "Timed calls per seed and size")->check(CLI::PositiveNumber);
    bench->add_option("--seeds", bf.seeds, "Seeds file (written when --sample is given)");
    bench->add_option("--sample", bf.sample, "Draw this many seeds from the corpus");
    bench->add_option("--rng-seed", bf.rng_seed, "Seed for --sample");
    bench->add_option("--json", bf.json_out, "Write the JSON report here");
    bench->add_option("--limit", bf.limit, "Suggestions per call");
    bench->add_option("--concurrency", bf.concurrency, "Parallel callers")->check(CLI::PositiveNumber);
    bench->add_flag("--uncapped", bf.uncapped, "Consider every matching table (no top-k)");
    bench->add_flag("--full-seed", bf.full_seed, "Keep caption and the non-varied field in each seed");
    bench_params.add_to(*bench);

    SynthConfig synth_config;
    std::string synth_kb, synth_corpus;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus and KB");
    synth->add_option("--tables", synth_config.tables);
    synth->add_option("--entities", synth_config.entities);
    synth->add_option("--categories", synth_config.categories);
    synth->add_option("--topics", synth_config.topics);
    synth->add_option("--seed", synth_config.seed);
    synth->add_option("--kb", synth_kb, "Output KB file")->required();
    synth->add_option("--corpus", synth_corpus, "Output corpus file")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*build) return cmd_build(corpus, kb, out_dir, out, err);
        if (*serve) return cmd_serve(serve_index, host, port, serve_params.resolve(), out, err);
        if (*bench) return cmd_bench(bf, bench_params.resolve(), out, err);
        if (*synth) {
            write_corpus(generate_corpus(synth_config), synth_kb, synth_corpus);
            out << "wrote " << synth_config.tables << " tables to " << synth_corpus << " and " << synth_config.entities
                << " entities to " << synth_kb << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace tablefill
