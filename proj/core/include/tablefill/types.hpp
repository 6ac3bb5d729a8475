#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tablefill {

using EntityId = std::string;
using CategoryId = std::string;
using TableId = std::string;

/// A seed that cannot be used for the requested kind of suggestion.
class SeedError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The user's in-progress table: caption, core-column entities and heading
/// labels. Entity ids are unique; labels are unique after normalize_label().
class SeedTable {
public:
    SeedTable() = default;

    /// Throws std::invalid_argument on a duplicate entity id or a label that
    /// repeats under normalization.
    SeedTable(std::string caption, std::vector<EntityId> entities, std::vector<std::string> labels);

    const std::string& caption() const noexcept { return caption_; }
    const std::vector<EntityId>& entities() const noexcept { return entities_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    bool empty() const noexcept { return caption_.empty() && entities_.empty() && labels_.empty(); }

    bool operator==(const SeedTable&) const = default;

private:
    std::string caption_;
    std::vector<EntityId> entities_;
    std::vector<std::string> labels_;
};

struct Cell {
    std::string text;
    std::optional<EntityId> entity_id;  // never an empty string

    bool operator==(const Cell&) const = default;
};

struct CorpusTable {
    TableId id;
    std::string page_title;
    std::string section_title;
    std::string caption;
    std::vector<std::string> labels;
    std::vector<EntityId> core_entities;
    std::size_t core_column = 0;
    std::vector<std::vector<Cell>> rows;

    std::size_t column_count() const noexcept;

    bool operator==(const CorpusTable&) const = default;
};

struct EntityRecord {
    EntityId id;
    std::string label;
    std::string abstract;
    std::vector<CategoryId> categories;  // sorted, duplicate-free

    bool operator==(const EntityRecord&) const = default;
};

/// A ranked recommendation. `score` is the product of `components`.
struct Suggestion {
    std::string target;
    double score = 0.0;
    std::map<std::string, double> components;

    bool operator==(const Suggestion&) const = default;
};

/// Orders suggestions by score descending, then target ascending.
void sort_suggestions(std::vector<Suggestion>& suggestions);

/// How the entity co-occurrence fraction counts "tables containing the seed".
enum class SeedTableMatch { all_entities, any_entity };

/// Model parameters with their default values; see validate() for bounds.
struct ScoringParams {
    double lambda_entity = 0.5;
    double lambda_caption = 0.5;
    double mu_labels = 2000.0;
    double mu_entity = 2000.0;
    double bm25_k1 = 1.2;
    double bm25_b = 0.75;
    std::size_t top_k_tables = 256;
    SeedTableMatch seed_table_match = SeedTableMatch::all_entities;

    /// Throws std::invalid_argument naming the first out-of-range field.
    void validate() const;
};

}  // namespace tablefill
