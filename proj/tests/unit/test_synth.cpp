#include "tablefill/index.hpp"
#include "tablefill/ingest.hpp"
#include "tablefill/synth.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

using namespace tablefill;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("generated corpus shape") {
    SynthConfig c;
    c.tables = 200;
    c.entities = 120;
    c.categories = 40;
    c.topics = 8;
    const auto corpus = generate_corpus(c);
    CHECK(corpus.tables.size() == 200);
    CHECK(corpus.entities.size() == 120);
    CHECK(corpus.explicit_core.size() == 200);
    std::unordered_set<std::string> ids;
    for (const auto& t : corpus.tables) {
        CHECK(ids.insert(t.id).second);
        CHECK(!t.rows.empty());
        CHECK(t.core_column < t.column_count());
        CHECK(t.labels.size() == t.column_count());
    }
}

TEST_CASE("generation is deterministic in the seed") {
    SynthConfig c;
    c.tables = 50;
    const auto a = generate_corpus(c);
    const auto b = generate_corpus(c);
    CHECK(a.tables == b.tables);
    CHECK(a.entities == b.entities);
    c.seed = 43;
    CHECK(generate_corpus(c).tables != a.tables);
}

TEST_CASE("invalid configurations") {
    SynthConfig c;
    c.topics = 0;
    CHECK_THROWS(generate_corpus(c));
    c = {};
    c.categories = c.topics - 1;
    CHECK_THROWS(generate_corpus(c));
    c = {};
    c.entities = c.topics - 1;
    CHECK_THROWS(generate_corpus(c));
}

TEST_CASE("written files ingest cleanly") {
    SynthConfig c;
    c.tables = 300;
    c.entities = 200;
    const auto corpus = generate_corpus(c);
    const auto dir = std::filesystem::temp_directory_path() / "tablefill_synth_test";
    std::filesystem::create_directories(dir);
    write_corpus(corpus, dir / "kb.jsonl", dir / "corpus.jsonl");

    const auto kb = load_kb(dir / "kb.jsonl");
    CHECK(kb.errors.empty());
    CHECK(kb.dropped_entities > 0);
    CHECK(kb.entities.size() + kb.dropped_entities == 200);
    const auto tables = load_corpus(dir / "corpus.jsonl", kb.id_set());
    CHECK(tables.errors.empty());
    CHECK(tables.tables.size() == 300);
    CHECK(tables.dangling_links > 0);

    const auto bundle = build_indexes(tables.tables, kb.entities);
    std::size_t with_core = 0;
    for (const auto& t : bundle.tables) with_core += !t.core_entities.empty();
    CHECK(with_core > 250);

    // Same config, same bytes.
    write_corpus(generate_corpus(c), dir / "kb2.jsonl", dir / "corpus2.jsonl");
    CHECK(slurp(dir / "kb.jsonl") == slurp(dir / "kb2.jsonl"));
    CHECK(slurp(dir / "corpus.jsonl") == slurp(dir / "corpus2.jsonl"));
    std::filesystem::remove_all(dir);
}
