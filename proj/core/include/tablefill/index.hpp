#pragma once

#include "tablefill/types.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tablefill {

// Dense identifiers. Tables, entities, categories, terms and labels are each
// numbered by the rank of their string id, so sorting by dense id is sorting
// by string id.
using DocId = std::uint32_t;
using EntityIdx = std::uint32_t;
using CategoryIdx = std::uint32_t;
using TermId = std::uint32_t;
using LabelId = std::uint32_t;

inline constexpr std::uint32_t kNotFound = std::numeric_limits<std::uint32_t>::max();

/// Sparse term -> frequency map, sorted by term id, no zero entries.
class TermVector {
public:
    using Entry = std::pair<TermId, std::uint32_t>;

    TermVector() = default;
    /// Accepts unsorted entries with repeats; frequencies of a repeated term add up.
    explicit TermVector(std::vector<Entry> entries);

    std::uint32_t frequency(TermId term) const noexcept;
    std::uint64_t total() const noexcept { return total_; }
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }

    bool operator==(const TermVector&) const = default;

private:
    std::vector<Entry> entries_;
    std::uint64_t total_ = 0;
};

/// Term -> count model over a collection; probability() is count / total.
struct CollectionModel {
    std::vector<std::uint64_t> counts;  // by TermId
    std::uint64_t total = 0;

    double probability(TermId term) const noexcept {
        if (term >= counts.size() || total == 0) return 0.0;
        return static_cast<double>(counts[term]) / static_cast<double>(total);
    }

    bool operator==(const CollectionModel&) const = default;
};

enum class TableField : std::uint8_t { caption = 0, page_title = 1, section_title = 2, labels_text = 3 };
inline constexpr std::size_t kTableFieldCount = 4;

struct Posting {
    DocId doc = 0;
    std::uint32_t tf = 0;

    bool operator==(const Posting&) const = default;
};

struct FieldIndex {
    std::vector<std::vector<Posting>> postings;  // by TermId, sorted by doc
    std::vector<std::uint32_t> lengths;          // by DocId
    double average_length = 0.0;

    bool operator==(const FieldIndex&) const = default;
};

struct TableIndex {
    std::array<FieldIndex, kTableFieldCount> fields;
    std::vector<std::vector<DocId>> entity_postings;  // by EntityIdx: tables with e in the core column
    std::vector<std::vector<DocId>> label_postings;   // by LabelId
    std::vector<std::vector<LabelId>> table_labels;   // by DocId: distinct normalized labels in header order
    std::vector<std::vector<std::uint32_t>> table_label_positions;  // parallel to table_labels: header index of first raw form
    std::vector<std::vector<EntityIdx>> table_entities;  // by DocId: core entities, sorted
    std::uint32_t doc_count = 0;

    const FieldIndex& field(TableField f) const noexcept { return fields[static_cast<std::size_t>(f)]; }

    bool operator==(const TableIndex&) const = default;
};

struct EntityIndex {
    std::vector<EntityRecord> records;          // by EntityIdx
    std::vector<TermVector> abstract_terms;     // entity LM over the abstract
    std::vector<TermVector> label_terms;        // tf(t,e) over labels of tables containing e
    std::vector<std::vector<EntityIdx>> name_postings;    // by TermId
    std::vector<std::vector<CategoryIdx>> categories;     // by EntityIdx, sorted

    bool operator==(const EntityIndex&) const = default;
};

struct CategoryIndex {
    std::vector<CategoryId> ids;                  // sorted
    std::vector<std::vector<EntityIdx>> members;  // by CategoryIdx, sorted

    bool operator==(const CategoryIndex&) const = default;
};

struct CollectionStats {
    CollectionModel label_model;     // P(t|theta) over column labels of all tables
    CollectionModel abstract_model;  // background model for entity abstracts
    std::vector<TermVector> caption_cooccurrence;  // by EntityIdx: #(t,e)
    std::uint32_t table_count = 0;

    bool operator==(const CollectionStats&) const = default;
};

struct Vocabulary {
    std::vector<std::string> terms;           // sorted, by TermId
    std::vector<std::string> labels;          // normalized, sorted, by LabelId
    std::vector<std::string> label_display;   // most frequent raw form, by LabelId

    bool operator==(const Vocabulary&) const = default;
};

struct Provenance {
    std::string corpus_sha256;
    std::string kb_sha256;

    bool operator==(const Provenance&) const = default;
};

/// Everything the engines read: corpus, KB, three inverted indices and
/// collection statistics. Immutable once built or loaded.
class IndexBundle {
public:
    IndexBundle() = default;
    IndexBundle(IndexBundle&&) noexcept = default;
    IndexBundle& operator=(IndexBundle&&) noexcept = default;
    // Lookup maps view into the persisted strings, so copies are not allowed.
    IndexBundle(const IndexBundle&) = delete;
    IndexBundle& operator=(const IndexBundle&) = delete;

    // Persisted state.
    std::vector<CorpusTable> tables;  // by DocId
    Vocabulary vocabulary;
    TableIndex table_index;
    EntityIndex entity_index;
    CategoryIndex category_index;
    CollectionStats stats;
    Provenance provenance;

    /// Rebuilds the string -> dense id maps from persisted state.
    void finalize();

    std::size_t table_count() const noexcept { return tables.size(); }
    std::size_t entity_count() const noexcept { return entity_index.records.size(); }

    DocId table_index_of(std::string_view id) const noexcept;
    EntityIdx entity_index_of(std::string_view id) const noexcept;
    CategoryIdx category_index_of(std::string_view id) const noexcept;
    TermId term_id(std::string_view term) const noexcept;
    LabelId label_id(std::string_view normalized) const noexcept;

    const EntityRecord* find_entity(std::string_view id) const noexcept;

    std::vector<TableId> lookup_tables_by_entity(std::string_view entity) const;
    std::vector<EntityId> lookup_entities_by_category(std::string_view category) const;
    std::vector<TableId> lookup_tables_by_label(std::string_view raw_label) const;

    /// Postings for `term` in `field`; empty for unknown terms.
    std::span<const Posting> field_postings(TableField field, std::string_view term) const noexcept;

    /// #(e)
    std::uint32_t entity_table_count(EntityIdx e) const noexcept {
        return static_cast<std::uint32_t>(table_index.entity_postings[e].size());
    }

    /// Persisted state only; lookup maps are derived.
    bool operator==(const IndexBundle& other) const;

private:
    std::unordered_map<std::string_view, DocId> table_ids_;
    std::unordered_map<std::string_view, EntityIdx> entity_ids_;
    std::unordered_map<std::string_view, CategoryIdx> category_ids_;
    std::unordered_map<std::string_view, TermId> term_ids_;
    std::unordered_map<std::string_view, LabelId> label_ids_;
};

/// Builds all structures from validated ingestion output. Tables and
/// entities may arrive in any order; duplicate ids keep the last record.
/// Core entities missing from `entities` are dropped.
IndexBundle build_indexes(std::vector<CorpusTable> tables, std::vector<EntityRecord> entities);

}  // namespace tablefill
