#pragma once

#include "tablefill/index.hpp"
#include "tablefill/types.hpp"

#include <vector>

namespace tablefill {

/// Seed resolved against a bundle once per request.
struct ResolvedSeed {
    std::vector<std::string> caption_terms;
    std::vector<EntityIdx> entities;       // known seed entities, sorted
    std::size_t entity_count = 0;          // |E| including ids missing from the KB
    std::vector<std::string> labels;       // distinct non-empty normalized labels
    std::vector<LabelId> label_ids;        // labels present in the corpus, sorted
    std::vector<std::vector<TermId>> label_terms;  // per entry of `labels`

    bool has_caption() const noexcept { return !caption_terms.empty(); }
};

ResolvedSeed resolve_seed(const SeedTable& seed, const IndexBundle& bundle);

/// Tables matched by each of the three query routes, each capped at
/// top_k_tables and sorted by DocId:
///  - caption: highest BM25 of the seed caption over table captions;
///  - entity: tables holding a seed entity in the core column, most seed
///    entities first;
///  - label: tables sharing a normalized heading label, most shared first.
/// Ties within a route go to the smaller table id.
struct TableRoutes {
    std::vector<DocId> caption;
    std::vector<DocId> entity;
    std::vector<DocId> label;
    std::vector<std::pair<DocId, double>> caption_scores;  // every table with BM25 > 0, by DocId

    std::vector<DocId> merged() const;
};

TableRoutes retrieve_tables(const ResolvedSeed& seed, const IndexBundle& bundle, const ScoringParams& params);

}  // namespace tablefill
