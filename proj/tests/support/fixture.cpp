#include "fixture.hpp"

#include "tablefill/ingest.hpp"
#include "tablefill/text.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>

namespace tablefill::testing {
namespace {

constexpr std::array<const char*, 16> kCaptionWords = {"world",   "cup",    "olympic", "games",     "football", "clubs",
                                                       "season",  "league", "champions", "european", "players", "medal",
                                                       "winners", "norway", "2010",    "2014"};
constexpr std::array<const char*, 8> kFiller = {"the", "a", "team", "country", "born", "city", "national", "player"};
constexpr std::array<const char*, 12> kLabels = {"Team", "Country", "Year",     "Wins",  "Points", "Player",
                                                 "Club", "Position", "Goals",   "Medal", "Rank",   "Notes"};

std::string spelling(const std::string& label, std::mt19937_64& rng) {
    switch (std::uniform_int_distribution<int>(0, 5)(rng)) {
        case 0: {
            std::string s = label;
            for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            return s;
        }
        case 1: {
            std::string s = label;
            for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            return s;
        }
        case 2:
            return " " + label + "  ";
        default:
            return label;
    }
}

std::string id(char prefix, std::size_t n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%c%02zu", prefix, n);
    return buf;
}

template <typename Pool>
std::string words(const Pool& pool, std::size_t n, std::mt19937_64& rng) {
    std::string out;
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (std::size_t i = 0; i < n; ++i) {
        if (!out.empty()) out += ' ';
        out += pool[pick(rng)];
    }
    return out;
}

}  // namespace

Fixture make_fixture(std::uint64_t seed, FixtureShape shape) {
    std::mt19937_64 rng(seed);
    auto uniform = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    Fixture f;

    for (std::size_t i = 1; i <= shape.entities; ++i) {
        EntityRecord e;
        e.id = id('E', i);
        e.label = "Entity " + words(kCaptionWords, 1, rng) + " " + std::to_string(i);
        std::vector<const char*> pool(kCaptionWords.begin(), kCaptionWords.end());
        pool.insert(pool.end(), kFiller.begin(), kFiller.end());
        e.abstract = words(pool, uniform(3, 9), rng) + ".";
        std::set<std::string> cats{id('C', 1 + (i - 1) % shape.categories)};
        for (std::size_t k = uniform(0, 2); k > 0; --k) cats.insert(id('C', uniform(1, shape.categories)));
        e.categories.assign(cats.begin(), cats.end());
        f.entities.push_back(std::move(e));
    }

    for (std::size_t j = 1; j <= shape.tables; ++j) {
        CorpusTable t;
        t.id = id('T', j);
        t.page_title = words(kCaptionWords, uniform(1, 3), rng);
        t.section_title = words(kCaptionWords, uniform(0, 2), rng);
        t.caption = words(kCaptionWords, uniform(1, 4), rng);
        t.labels.push_back(spelling("Name", rng));
        std::vector<std::string> pool(kLabels.begin(), kLabels.end());
        std::shuffle(pool.begin(), pool.end(), rng);
        for (std::size_t k = uniform(2, 4); k > 0; --k) t.labels.push_back(spelling(pool[k], rng));
        // Now and then a second spelling of a label already present.
        if (uniform(0, 3) == 0) t.labels.push_back(spelling(pool[1], rng));

        std::vector<std::size_t> members(shape.entities);
        for (std::size_t i = 0; i < members.size(); ++i) members[i] = i;
        std::shuffle(members.begin(), members.end(), rng);
        members.resize(uniform(2, 6));
        for (std::size_t m : members) {
            const auto& e = f.entities[m];
            std::vector<Cell> row{{e.label, e.id}};
            for (std::size_t c = 1; c < t.labels.size(); ++c) row.push_back({std::to_string(uniform(0, 99)), std::nullopt});
            t.rows.push_back(std::move(row));
            t.core_entities.push_back(e.id);
        }
        t.core_column = 0;
        f.tables.push_back(std::move(t));
    }
    return f;
}

void write_fixture(const Fixture& fixture, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream kb(dir / "kb.jsonl", std::ios::binary);
    for (const auto& e : fixture.entities) kb << to_json_line(e) << '\n';
    std::ofstream corpus(dir / "corpus.jsonl", std::ios::binary);
    for (const auto& t : fixture.tables) corpus << to_json_line(t) << '\n';
}

SeedTable random_seed(const Fixture& fixture, std::mt19937_64& rng, bool require_entities) {
    auto uniform = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    for (;;) {
        std::string caption;
        if (uniform(0, 3) != 0) {
            caption = words(kCaptionWords, uniform(1, 3), rng);
            if (uniform(0, 4) == 0) caption += " zanzibar";
        }
        std::vector<EntityId> entities;
        // Entities of one table make the "tables with all seeds" set non-trivial.
        const auto& table = fixture.tables[uniform(0, fixture.tables.size() - 1)];
        for (std::size_t k = uniform(require_entities ? 1 : 0, 3); k > 0; --k) {
            const auto& candidate = uniform(0, 2) == 0 ? fixture.entities[uniform(0, fixture.entities.size() - 1)].id
                                                       : table.core_entities[uniform(0, table.core_entities.size() - 1)];
            if (std::find(entities.begin(), entities.end(), candidate) == entities.end()) entities.push_back(candidate);
        }
        std::vector<std::string> labels;
        std::vector<std::string> seen;
        for (std::size_t k = uniform(0, 3); k > 0; --k) {
            const std::string raw = uniform(0, 5) == 0 ? std::string("Trophies") : spelling(kLabels[uniform(0, kLabels.size() - 1)], rng);
            auto norm = normalize_label(raw);
            if (std::find(seen.begin(), seen.end(), norm) != seen.end()) continue;
            seen.push_back(norm);
            labels.push_back(raw);
        }
        SeedTable seed(caption, entities, labels);
        if (!seed.empty()) return seed;
    }
}

}  // namespace tablefill::testing
