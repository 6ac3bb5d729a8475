#include "tablefill/scoring.hpp"

#include "tablefill/text.hpp"

namespace tablefill {
namespace {

void sort_unique(std::vector<std::string>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

double bm25_term(double idf, std::uint32_t tf, std::uint32_t length, double average_length,
                 const ScoringParams& params) {
    const double norm = average_length > 0.0 ? static_cast<double>(length) / average_length : 0.0;
    const double f = static_cast<double>(tf);
    return idf * f * (params.bm25_k1 + 1.0) / (f + params.bm25_k1 * (1.0 - params.bm25_b + params.bm25_b * norm));
}

}  // namespace

double jaccard(std::vector<std::string> a, std::vector<std::string> b) {
    sort_unique(a);
    sort_unique(b);
    return jaccard<std::string>(a, b);
}

double overlap_ratio(std::vector<std::string> source, std::vector<std::string> reference) {
    sort_unique(source);
    sort_unique(reference);
    return overlap_ratio<std::string>(source, reference);
}

std::vector<TermId> term_ids(std::span<const std::string> terms, const IndexBundle& bundle) {
    std::vector<TermId> ids;
    ids.reserve(terms.size());
    for (const auto& t : terms) ids.push_back(bundle.term_id(t));
    return ids;
}

double column_labels_likelihood(std::span<const std::vector<TermId>> label_terms, EntityIdx entity,
                                const IndexBundle& bundle, const ScoringParams& params) {
    static const TermVector kEmpty;
    const auto& tv = entity == kNotFound ? kEmpty : bundle.entity_index.label_terms[entity];
    const auto& collection = bundle.stats.label_model;
    double sum = 0.0;
    for (const auto& terms : label_terms) {
        double product = 1.0;
        for (TermId t : terms) product *= dirichlet_lm_prob(t, tv, collection, params.mu_labels);
        sum += product;
    }
    return sum;
}

double column_labels_likelihood(std::span<const std::string> labels, std::string_view entity,
                                const IndexBundle& bundle, const ScoringParams& params) {
    std::vector<std::vector<TermId>> label_terms;
    label_terms.reserve(labels.size());
    for (const auto& label : labels) label_terms.push_back(term_ids(tokenize(label), bundle));
    return column_labels_likelihood(label_terms, bundle.entity_index_of(entity), bundle, params);
}

double bm25_score(std::span<const std::string> query_terms, TableField field, std::string_view table,
                  const IndexBundle& bundle, const ScoringParams& params) {
    const DocId doc = bundle.table_index_of(table);
    if (doc == kNotFound) return 0.0;
    const auto& index = bundle.table_index.field(field);
    double score = 0.0;
    for (const auto& term : query_terms) {
        const auto postings = bundle.field_postings(field, term);
        auto it = std::lower_bound(postings.begin(), postings.end(), doc,
                                   [](const Posting& p, DocId d) { return p.doc < d; });
        if (it == postings.end() || it->doc != doc) continue;
        const double idf = bm25_idf(bundle.table_index.doc_count, postings.size());
        score += bm25_term(idf, it->tf, index.lengths[doc], index.average_length, params);
    }
    return score;
}

std::vector<std::pair<DocId, double>> bm25_all(std::span<const std::string> query_terms, TableField field,
                                               const IndexBundle& bundle, const ScoringParams& params) {
    const auto& index = bundle.table_index.field(field);
    std::vector<std::pair<DocId, double>> scores;
    for (const auto& term : query_terms) {
        const auto postings = bundle.field_postings(field, term);
        if (postings.empty()) continue;
        const double idf = bm25_idf(bundle.table_index.doc_count, postings.size());
        for (const auto& p : postings) {
            scores.emplace_back(p.doc, bm25_term(idf, p.tf, index.lengths[p.doc], index.average_length, params));
        }
    }
    // Sum per document in query-term order so the total matches bm25_score().
    std::stable_sort(scores.begin(), scores.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<DocId, double>> merged;
    for (const auto& [doc, s] : scores) {
        if (!merged.empty() && merged.back().first == doc) {
            merged.back().second += s;
        } else {
            merged.emplace_back(doc, s);
        }
    }
    std::erase_if(merged, [](const auto& p) { return !(p.second > 0.0); });
    return merged;
}

}  // namespace tablefill
