#pragma once

#include "tablefill/index.hpp"
#include "tablefill/types.hpp"

#include <vector>

namespace tablefill {

struct RelatedTable {
    DocId doc = 0;
    double entity_coverage = 1.0;  // |T_E ∩ E| / |E|, or 1 without seed entities
    double caption_score = 1.0;    // BM25 of the seed caption, or 1 without a caption
    double label_overlap = 1.0;    // |T_L ∩ L| / |L|, or 1 without seed labels

    double relevance() const noexcept { return entity_coverage * caption_score * label_overlap; }
};

struct RelatedTableSet {
    std::vector<RelatedTable> tables;  // sorted by doc
};

/// Union of the caption, entity and label routes of retrieve_tables(), each
/// table annotated with its relevance components. Throws SeedError for an
/// empty seed.
RelatedTableSet find_related_tables(const SeedTable& seed, const IndexBundle& bundle, const ScoringParams& params);

/// Scores each label of the related tables (minus the seed labels) by the sum
/// of the relevance of the tables that carry it. Sorted by score descending,
/// then normalized label; at most `limit`. Targets use the most frequent raw
/// spelling among the related tables.
std::vector<Suggestion> rank_labels(const SeedTable& seed, const RelatedTableSet& related, const IndexBundle& bundle,
                                    const ScoringParams& params, std::size_t limit);

inline constexpr const char* kTableRelevance = "table-relevance";

}  // namespace tablefill
