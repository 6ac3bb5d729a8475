#include "tablefill/bench.hpp"
#include "tablefill/columns.hpp"
#include "tablefill/ingest.hpp"
#include "tablefill/rows.hpp"
#include "tablefill/synth.hpp"
#include "tablefill/text.hpp"

#include <benchmark/benchmark.h>

#include <filesystem>
#include <unistd.h>

namespace fs = std::filesystem;
using namespace tablefill;

namespace {

// 20k synthetic tables, built once per process.
const IndexBundle& corpus() {
    static const IndexBundle bundle = [] {
        const auto dir = fs::temp_directory_path() / ("tablefill_micro_" + std::to_string(getpid()));
        fs::create_directories(dir);
        SynthConfig config;
        config.tables = 20'000;
        config.entities = 10'000;
        config.topics = 100;
        config.categories = 400;
        write_corpus(generate_corpus(config), dir / "kb.jsonl", dir / "corpus.jsonl");
        auto kb = load_kb(dir / "kb.jsonl");
        auto tables = load_corpus(dir / "corpus.jsonl", kb.id_set());
        fs::remove_all(dir);
        return build_indexes(std::move(tables.tables), std::move(kb.entities));
    }();
    return bundle;
}

const std::vector<SeedTable>& seeds() {
    static const auto s = sample_seeds(corpus(), 10, 1, 5, 5);
    return s;
}

void BM_RankRows(benchmark::State& state) {
    const auto& b = corpus();
    const auto size = static_cast<std::size_t>(state.range(0));
    const ScoringParams p;
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& full = seeds()[i++ % seeds().size()];
        const SeedTable seed("", {full.entities().begin(), full.entities().begin() + static_cast<std::ptrdiff_t>(size)}, {});
        benchmark::DoNotOptimize(rank_rows(seed, select_row_candidates(seed, b, p), b, p, 10));
    }
}
BENCHMARK(BM_RankRows)->DenseRange(1, 5)->Unit(benchmark::kMicrosecond);

void BM_RankLabels(benchmark::State& state) {
    const auto& b = corpus();
    const auto size = static_cast<std::size_t>(state.range(0));
    ScoringParams p;
    p.top_k_tables = static_cast<std::size_t>(state.range(1));
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& full = seeds()[i++ % seeds().size()];
        const SeedTable seed("", {}, {full.labels().begin(), full.labels().begin() + static_cast<std::ptrdiff_t>(size)});
        benchmark::DoNotOptimize(rank_labels(seed, find_related_tables(seed, b, p), b, p, 10));
    }
}
BENCHMARK(BM_RankLabels)->ArgsProduct({{1, 3, 5}, {256, 20'000}})->Unit(benchmark::kMicrosecond);

void BM_Tokenize(benchmark::State& state) {
    const std::string ascii = "List of FIFA World Cup finals (1930-2022), by host country";
    const std::string unicode = "Liste der Olympiasieger im Eisschnelllauf – Männer, 1924–2022";
    const auto& text = state.range(0) ? unicode : ascii;
    for (auto _ : state) benchmark::DoNotOptimize(tokenize(text));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Tokenize)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
