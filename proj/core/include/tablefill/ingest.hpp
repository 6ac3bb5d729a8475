#pragma once

#include "tablefill/types.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace tablefill {

/// Unrecoverable ingestion failure (unreadable file).
class IngestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LineError {
    std::size_t line = 0;  // 1-based
    std::string message;
};

struct CorpusStats {
    std::size_t table_count = 0;
    std::size_t entity_count = 0;
    std::size_t dropped_entities = 0;  // no abstract
    std::size_t dangling_links = 0;    // links not resolvable to a KB id
    std::size_t label_vocabulary_size = 0;
    std::size_t duplicate_ids = 0;
    std::size_t line_errors = 0;
};

struct KbLoadResult {
    std::vector<EntityRecord> entities;  // order of first appearance
    std::vector<LineError> errors;
    std::size_t lines = 0;  // non-blank input lines
    std::size_t dropped_entities = 0;
    std::size_t duplicate_ids = 0;

    std::unordered_set<EntityId> id_set() const;
};

struct CorpusLoadResult {
    std::vector<CorpusTable> tables;  // order of first appearance
    std::vector<LineError> errors;
    std::size_t lines = 0;
    std::size_t dangling_links = 0;
    std::size_t duplicate_ids = 0;
    std::size_t label_vocabulary_size = 0;
};

/// Reads a JSON Lines knowledge base. Entities without an abstract are
/// dropped; a repeated id replaces the earlier record. Blank lines are
/// ignored.
KbLoadResult load_kb(const std::filesystem::path& path);
KbLoadResult parse_kb(std::istream& in);

/// Reads a JSON Lines table corpus, resolving cell links against `kb`.
/// Unresolvable links are cleared to their anchor text.
CorpusLoadResult load_corpus(const std::filesystem::path& path, const std::unordered_set<EntityId>& kb);
CorpusLoadResult parse_corpus(std::istream& in, const std::unordered_set<EntityId>& kb);

/// Leftmost column with the highest fraction of entity-linked cells.
std::size_t guess_core_column(const std::vector<std::vector<Cell>>& rows, std::size_t columns);

CorpusStats combine_stats(const KbLoadResult& kb, const CorpusLoadResult& corpus);

/// Single-line JSON encodings of the two input formats.
std::string to_json_line(const EntityRecord& entity);
std::string to_json_line(const CorpusTable& table);

}  // namespace tablefill
