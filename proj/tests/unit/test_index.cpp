#include "fixture.hpp"

#include "tablefill/index.hpp"
#include "tablefill/text.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

using namespace tablefill;
using namespace tablefill::testing;

namespace {

std::vector<std::string> field_text_tokens(const CorpusTable& t, TableField f) {
    switch (f) {
        case TableField::caption: return tokenize(t.caption);
        case TableField::page_title: return tokenize(t.page_title);
        case TableField::section_title: return tokenize(t.section_title);
        case TableField::labels_text: {
            std::vector<std::string> out;
            for (const auto& l : t.labels) {
                for (auto& tok : tokenize(l)) out.push_back(tok);
            }
            return out;
        }
    }
    return {};
}

bool in_core(const CorpusTable& t, const std::string& e) {
    return std::find(t.core_entities.begin(), t.core_entities.end(), e) != t.core_entities.end();
}

}  // namespace

TEST_CASE("empty build") {
    auto b = build_indexes({}, {});
    CHECK(b.table_count() == 0);
    CHECK(b.entity_count() == 0);
    CHECK(b.stats.table_count == 0);
    CHECK(b.lookup_tables_by_entity("E1").empty());
    CHECK(b.lookup_entities_by_category("C1").empty());
    CHECK(b.lookup_tables_by_label("Team").empty());
    CHECK(b.field_postings(TableField::caption, "world").empty());
}

TEST_CASE("single table caption co-occurrence") {
    CorpusTable t;
    t.id = "T1";
    t.caption = "world cup";
    t.labels = {"Team"};
    t.rows = {{{"Norway", "E1"}}};
    t.core_entities = {"E1"};
    auto b = build_indexes({t}, {{"E1", "Norway", "A country.", {}}});
    const auto e = b.entity_index_of("E1");
    REQUIRE(e != kNotFound);
    CHECK(b.stats.caption_cooccurrence[e].frequency(b.term_id("world")) == 1);
    CHECK(b.stats.caption_cooccurrence[e].frequency(b.term_id("cup")) == 1);
    CHECK(b.entity_table_count(e) == 1);
}

TEST_CASE("unknown core entities are dropped and duplicates keep the last record") {
    CorpusTable t1;
    t1.id = "T1";
    t1.core_entities = {"E1", "GHOST"};
    t1.rows = {{{"a", "E1"}}, {{"g", "GHOST"}}};
    CorpusTable t1b = t1;
    t1b.caption = "second";
    auto b = build_indexes({t1, t1b}, {{"E1", "x", "y", {}}});
    REQUIRE(b.table_count() == 1);
    CHECK(b.tables[0].caption == "second");
    CHECK(b.tables[0].core_entities == std::vector<EntityId>{"E1"});
    CHECK_FALSE(b.tables[0].rows[1][0].entity_id.has_value());
}

TEST_CASE("postings equal a naive scan over a 5-table fixture") {
    const auto fx = make_fixture(5, {5, 12, 6});
    const auto b = fx.build();
    REQUIRE(b.table_count() == 5);

    for (TableField f : {TableField::caption, TableField::page_title, TableField::section_title, TableField::labels_text}) {
        const auto& field = b.table_index.field(f);
        double total = 0;
        for (std::size_t d = 0; d < fx.tables.size(); ++d) {
            const auto tokens = field_text_tokens(fx.tables[d], f);
            CHECK(field.lengths[d] == tokens.size());
            total += static_cast<double>(tokens.size());
        }
        CHECK(field.average_length == doctest::Approx(total / 5.0).epsilon(1e-12));
        for (const auto& term : b.vocabulary.terms) {
            std::vector<Posting> expected;
            for (std::size_t d = 0; d < fx.tables.size(); ++d) {
                const auto tokens = field_text_tokens(fx.tables[d], f);
                const auto tf = std::count(tokens.begin(), tokens.end(), term);
                if (tf > 0) expected.push_back({static_cast<DocId>(d), static_cast<std::uint32_t>(tf)});
            }
            const auto got = b.field_postings(f, term);
            CHECK(std::vector<Posting>(got.begin(), got.end()) == expected);
        }
    }
}

TEST_CASE("lookups equal linear scans over a 10-table fixture") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto fx = make_fixture(seed);
        const auto b = fx.build();
        for (const auto& e : fx.entities) {
            std::vector<TableId> expected;
            for (const auto& t : fx.tables) {
                if (in_core(t, e.id)) expected.push_back(t.id);
            }
            CHECK(b.lookup_tables_by_entity(e.id) == expected);
        }
        CHECK(b.lookup_tables_by_entity("NOPE").empty());

        std::map<std::string, std::vector<EntityId>> members;
        for (const auto& e : fx.entities) {
            for (const auto& c : e.categories) members[c].push_back(e.id);
        }
        CHECK(b.category_index.ids.size() == members.size());
        for (const auto& [c, ids] : members) CHECK(b.lookup_entities_by_category(c) == ids);
        CHECK(b.lookup_entities_by_category("Category:None").empty());

        for (const auto& l : b.vocabulary.labels) {
            std::vector<TableId> expected;
            for (const auto& t : fx.tables) {
                bool has = false;
                for (const auto& raw : t.labels) has = has || normalize_label(raw) == l;
                if (has) expected.push_back(t.id);
            }
            CHECK(b.lookup_tables_by_label(l) == expected);
            CHECK(b.lookup_tables_by_label("  " + l + " ") == expected);
        }
    }
}

TEST_CASE("postings consistency and collection statistics invariants") {
    const auto fx = make_fixture(9);
    const auto b = fx.build();
    const auto& tindex = b.table_index;

    for (EntityIdx e = 0; e < b.entity_count(); ++e) {
        for (DocId d : tindex.entity_postings[e]) CHECK(in_core(b.tables[d], b.entity_index.records[e].id));
        const auto& tv = b.entity_index.label_terms[e];
        std::uint64_t sum = 0;
        for (const auto& [t, f] : tv.entries()) {
            CHECK(f > 0);
            sum += f;
        }
        CHECK(tv.total() == sum);
        if (b.entity_table_count(e) > 0) CHECK(tv.total() > 0);

        for (const auto& [t, f] : b.stats.caption_cooccurrence[e].entries()) {
            CHECK(f <= b.entity_table_count(e));
        }
        CHECK(b.entity_table_count(e) <= b.stats.table_count);
    }

    double p = 0;
    for (TermId t = 0; t < b.vocabulary.terms.size(); ++t) p += b.stats.label_model.probability(t);
    CHECK(p == doctest::Approx(1.0).epsilon(1e-9));

    for (std::size_t f = 0; f < kTableFieldCount; ++f) {
        for (const auto& list : tindex.fields[f].postings) {
            CHECK(std::is_sorted(list.begin(), list.end(), [](auto a, auto c) { return a.doc < c.doc; }));
            CHECK(std::adjacent_find(list.begin(), list.end(), [](auto a, auto c) { return a.doc == c.doc; }) == list.end());
        }
    }
    for (const auto& list : tindex.label_postings) {
        CHECK(std::is_sorted(list.begin(), list.end()));
        CHECK(std::adjacent_find(list.begin(), list.end()) == list.end());
    }
}

TEST_CASE("label display form is the most frequent spelling") {
    auto table = [](std::string id, std::string label) {
        CorpusTable t;
        t.id = std::move(id);
        t.labels = {std::move(label)};
        return t;
    };
    auto b = build_indexes({table("T1", "TEAM"), table("T2", "Team"), table("T3", "Team"), table("T4", "team")}, {});
    REQUIRE(b.vocabulary.labels == std::vector<std::string>{"team"});
    CHECK(b.vocabulary.label_display[0] == "Team");
    auto tie = build_indexes({table("T2", "b Side"), table("T1", "B side")}, {});
    CHECK(tie.vocabulary.label_display[0] == "B side");
}

TEST_CASE("dense ids follow string order") {
    const auto fx = make_fixture(4);
    const auto b = fx.build();
    CHECK(std::is_sorted(b.vocabulary.terms.begin(), b.vocabulary.terms.end()));
    CHECK(std::is_sorted(b.vocabulary.labels.begin(), b.vocabulary.labels.end()));
    CHECK(std::is_sorted(b.tables.begin(), b.tables.end(), [](auto& x, auto& y) { return x.id < y.id; }));
    for (DocId d = 0; d < b.table_count(); ++d) CHECK(b.table_index_of(b.tables[d].id) == d);
    CHECK(b.table_index_of("missing") == kNotFound);
}

TEST_CASE("term vector adds repeated entries") {
    TermVector tv({{3, 1}, {1, 2}, {3, 4}});
    CHECK(tv.frequency(3) == 5);
    CHECK(tv.frequency(1) == 2);
    CHECK(tv.frequency(2) == 0);
    CHECK(tv.total() == 7);
    CHECK(tv.entries().size() == 2);
}
