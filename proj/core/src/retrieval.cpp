#include "tablefill/retrieval.hpp"

#include "tablefill/scoring.hpp"
#include "tablefill/text.hpp"

#include <algorithm>

namespace tablefill {
namespace {

// Keeps the k best (key desc, doc asc) and returns their docs sorted by doc.
template <typename Key>
std::vector<DocId> best_k(std::vector<std::pair<DocId, Key>> scored, std::size_t k) {
    if (scored.size() > k) {
        auto better = [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        };
        std::nth_element(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(), better);
        scored.resize(k);
    }
    std::vector<DocId> docs;
    docs.reserve(scored.size());
    for (const auto& [doc, key] : scored) docs.push_back(doc);
    std::sort(docs.begin(), docs.end());
    return docs;
}

// Number of lists each doc appears in, sorted by doc.
std::vector<std::pair<DocId, std::uint32_t>> count_hits(const std::vector<const std::vector<DocId>*>& lists) {
    std::vector<DocId> all;
    std::size_t total = 0;
    for (const auto* l : lists) total += l->size();
    all.reserve(total);
    for (const auto* l : lists) all.insert(all.end(), l->begin(), l->end());
    std::sort(all.begin(), all.end());
    std::vector<std::pair<DocId, std::uint32_t>> counts;
    for (DocId d : all) {
        if (!counts.empty() && counts.back().first == d) {
            ++counts.back().second;
        } else {
            counts.emplace_back(d, 1);
        }
    }
    return counts;
}

}  // namespace

ResolvedSeed resolve_seed(const SeedTable& seed, const IndexBundle& bundle) {
    ResolvedSeed r;
    r.caption_terms = tokenize(seed.caption());
    r.entity_count = seed.entities().size();
    for (const auto& id : seed.entities()) {
        const auto e = bundle.entity_index_of(id);
        if (e != kNotFound) r.entities.push_back(e);
    }
    std::sort(r.entities.begin(), r.entities.end());
    r.entities.erase(std::unique(r.entities.begin(), r.entities.end()), r.entities.end());

    for (const auto& raw : seed.labels()) {
        auto norm = normalize_label(raw);
        if (norm.empty() || std::find(r.labels.begin(), r.labels.end(), norm) != r.labels.end()) continue;
        r.label_terms.push_back(term_ids(tokenize(raw), bundle));
        const auto l = bundle.label_id(norm);
        if (l != kNotFound) r.label_ids.push_back(l);
        r.labels.push_back(std::move(norm));
    }
    std::sort(r.label_ids.begin(), r.label_ids.end());
    return r;
}

std::vector<DocId> TableRoutes::merged() const {
    std::vector<DocId> all;
    all.reserve(caption.size() + entity.size() + label.size());
    all.insert(all.end(), caption.begin(), caption.end());
    all.insert(all.end(), entity.begin(), entity.end());
    all.insert(all.end(), label.begin(), label.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
}

TableRoutes retrieve_tables(const ResolvedSeed& seed, const IndexBundle& bundle, const ScoringParams& params) {
    TableRoutes routes;
    const auto k = params.top_k_tables;

    if (seed.has_caption()) {
        routes.caption_scores = bm25_all(seed.caption_terms, TableField::caption, bundle, params);
        routes.caption = best_k(routes.caption_scores, k);
    }

    std::vector<const std::vector<DocId>*> lists;
    for (EntityIdx e : seed.entities) lists.push_back(&bundle.table_index.entity_postings[e]);
    routes.entity = best_k(count_hits(lists), k);

    lists.clear();
    for (LabelId l : seed.label_ids) lists.push_back(&bundle.table_index.label_postings[l]);
    routes.label = best_k(count_hits(lists), k);
    return routes;
}

}  // namespace tablefill
