#pragma once

#include "tablefill/index.hpp"
#include "tablefill/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tablefill {

/// |a ∩ b| / |a ∪ b| over sorted, duplicate-free ranges. Two empty sets give 0.
template <typename T>
double jaccard(std::span<const T> a, std::span<const T> b) {
    std::size_t common = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++common;
            ++i;
            ++j;
        }
    }
    const std::size_t unioned = a.size() + b.size() - common;
    return unioned == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(unioned);
}

/// Unsorted convenience overload; copies and sorts both inputs.
double jaccard(std::vector<std::string> a, std::vector<std::string> b);

/// |source ∩ reference| / |reference| over sorted, duplicate-free ranges.
/// An empty reference gives 0.
template <typename T>
double overlap_ratio(std::span<const T> source, std::span<const T> reference) {
    if (reference.empty()) return 0.0;
    std::size_t common = 0;
    auto i = source.begin();
    auto j = reference.begin();
    while (i != source.end() && j != reference.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++common;
            ++i;
            ++j;
        }
    }
    return static_cast<double>(common) / static_cast<double>(reference.size());
}

double overlap_ratio(std::vector<std::string> source, std::vector<std::string> reference);

/// Dirichlet-smoothed term probability (tf + mu * p_collection) / (total + mu).
inline double dirichlet_lm_prob(std::uint64_t tf, std::uint64_t total, double p_collection, double mu) noexcept {
    return (static_cast<double>(tf) + mu * p_collection) / (static_cast<double>(total) + mu);
}

inline double dirichlet_lm_prob(TermId term, const TermVector& tv, const CollectionModel& collection,
                                double mu) noexcept {
    const std::uint64_t tf = term == kNotFound ? 0 : tv.frequency(term);
    const double p = term == kNotFound ? 0.0 : collection.probability(term);
    return dirichlet_lm_prob(tf, tv.total(), p, mu);
}

/// P(L|e): sum over labels of the product of per-token Dirichlet factors
/// against the entity's label-term statistics. Unknown entities fall back
/// to the collection model. Empty L gives 0.
double column_labels_likelihood(std::span<const std::string> labels, std::string_view entity,
                                const IndexBundle& bundle, const ScoringParams& params);

/// Same, with labels already tokenized and mapped to term ids.
double column_labels_likelihood(std::span<const std::vector<TermId>> label_terms, EntityIdx entity,
                                const IndexBundle& bundle, const ScoringParams& params);

/// BM25 inverse document frequency, ln((N - df + 0.5) / (df + 0.5) + 1); never negative.
inline double bm25_idf(std::uint64_t doc_count, std::uint64_t df) noexcept {
    const double n = static_cast<double>(doc_count);
    const double d = static_cast<double>(df);
    return std::log((n - d + 0.5) / (d + 0.5) + 1.0);
}

/// Okapi BM25 of one table's field against a query. Repeated query terms
/// count once per occurrence. Unknown tables and empty queries score 0.
double bm25_score(std::span<const std::string> query_terms, TableField field, std::string_view table,
                  const IndexBundle& bundle, const ScoringParams& params);

/// Scores every table with a non-zero BM25 in one pass over the postings.
/// Returned pairs are sorted by DocId.
std::vector<std::pair<DocId, double>> bm25_all(std::span<const std::string> query_terms, TableField field,
                                               const IndexBundle& bundle, const ScoringParams& params);

/// Maps terms to ids; out-of-vocabulary terms become kNotFound.
std::vector<TermId> term_ids(std::span<const std::string> terms, const IndexBundle& bundle);

}  // namespace tablefill
