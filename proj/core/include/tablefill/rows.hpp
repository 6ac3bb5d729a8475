#pragma once

#include "tablefill/index.hpp"
#include "tablefill/types.hpp"

#include <vector>

namespace tablefill {

/// Candidate entities for the core column, excluding the seed entities.
/// Indices refer to the bundle the set was selected from.
struct RowCandidateSet {
    std::vector<EntityIdx> entities;  // sorted
    std::size_t from_kb = 0;          // candidates sharing a category with a seed entity
    std::size_t from_tc = 0;          // candidates from the core column of a similar table

    std::vector<EntityId> ids(const IndexBundle& bundle) const;
};

/// Union of KB category neighbours of the seed entities and core-column
/// entities of similar tables (see retrieve_tables()). Throws SeedError when
/// the seed has no entities.
RowCandidateSet select_row_candidates(const SeedTable& seed, const IndexBundle& bundle, const ScoringParams& params);

/// Scores candidates by entity similarity x label likelihood x caption
/// likelihood. Sorted by score descending, then entity id; at most `limit`.
std::vector<Suggestion> rank_rows(const SeedTable& seed, const RowCandidateSet& candidates, const IndexBundle& bundle,
                                  const ScoringParams& params, std::size_t limit);

inline constexpr const char* kEntitySimilarity = "entity-similarity";
inline constexpr const char* kLabelLikelihood = "label-likelihood";
inline constexpr const char* kCaptionLikelihood = "caption-likelihood";

}  // namespace tablefill
