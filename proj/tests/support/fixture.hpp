#pragma once

#include "tablefill/index.hpp"
#include "tablefill/types.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

namespace tablefill::testing {

/// Small random corpus and KB with overlapping captions, abstracts and
/// labels (labels come in several spellings).
struct Fixture {
    std::vector<CorpusTable> tables;
    std::vector<EntityRecord> entities;

    IndexBundle build() const { return build_indexes(tables, entities); }
};

struct FixtureShape {
    std::size_t tables = 10;
    std::size_t entities = 20;
    std::size_t categories = 15;
};

Fixture make_fixture(std::uint64_t seed, FixtureShape shape = {});

/// Random seed table over the fixture: caption words (sometimes one unseen
/// word), 0-3 entities and 0-3 labels in random spellings. Never fully empty.
/// Writes the fixture as kb.jsonl and corpus.jsonl under `dir`.
void write_fixture(const Fixture& fixture, const std::filesystem::path& dir);

SeedTable random_seed(const Fixture& fixture, std::mt19937_64& rng, bool require_entities);

}  // namespace tablefill::testing
