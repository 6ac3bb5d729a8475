#include "tablefill/columns.hpp"

#include "tablefill/retrieval.hpp"

#include <algorithm>
#include <string_view>
#include <unordered_map>

namespace tablefill {

RelatedTableSet find_related_tables(const SeedTable& seed, const IndexBundle& bundle, const ScoringParams& params) {
    if (seed.empty()) throw SeedError("column population requires a non-empty seed");
    const auto resolved = resolve_seed(seed, bundle);
    const auto routes = retrieve_tables(resolved, bundle, params);
    const auto& tindex = bundle.table_index;

    RelatedTableSet related;
    const auto docs = routes.merged();
    related.tables.reserve(docs.size());
    for (DocId d : docs) {
        RelatedTable t;
        t.doc = d;
        if (resolved.entity_count > 0) {
            const auto& core = tindex.table_entities[d];
            std::size_t common = 0;
            for (EntityIdx e : core) {
                if (std::binary_search(resolved.entities.begin(), resolved.entities.end(), e)) ++common;
            }
            t.entity_coverage = static_cast<double>(common) / static_cast<double>(resolved.entity_count);
        }
        if (resolved.has_caption()) {
            const auto& scores = routes.caption_scores;
            auto it = std::lower_bound(scores.begin(), scores.end(), d,
                                       [](const auto& p, DocId doc) { return p.first < doc; });
            t.caption_score = (it != scores.end() && it->first == d) ? it->second : 0.0;
        }
        if (!resolved.labels.empty()) {
            std::size_t common = 0;
            for (LabelId l : tindex.table_labels[d]) {
                if (std::binary_search(resolved.label_ids.begin(), resolved.label_ids.end(), l)) ++common;
            }
            t.label_overlap = static_cast<double>(common) / static_cast<double>(resolved.labels.size());
        }
        related.tables.push_back(t);
    }
    return related;
}

std::vector<Suggestion> rank_labels(const SeedTable& seed, const RelatedTableSet& related, const IndexBundle& bundle,
                                    const ScoringParams& /*params*/, std::size_t limit) {
    if (limit == 0) return {};
    const auto resolved = resolve_seed(seed, bundle);
    const auto& tindex = bundle.table_index;
    const auto is_seed_label = [&](LabelId l) {
        return std::binary_search(resolved.label_ids.begin(), resolved.label_ids.end(), l);
    };

    std::vector<double> scores(bundle.vocabulary.labels.size(), 0.0);
    std::vector<char> seen(scores.size(), 0);
    std::vector<LabelId> candidates;
    for (const auto& table : related.tables) {
        const double relevance = table.relevance();
        for (LabelId l : tindex.table_labels[table.doc]) {
            if (is_seed_label(l)) continue;
            if (!seen[l]) {
                seen[l] = 1;
                candidates.push_back(l);
            }
            scores[l] += relevance;
        }
    }

    const auto take = std::min(limit, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(),
                      [&](LabelId a, LabelId b) {
                          if (scores[a] != scores[b]) return scores[a] > scores[b];
                          return a < b;
                      });
    candidates.resize(take);

    // Most frequent raw spelling among the related tables; ties go to the
    // spelling seen first in table-id order.
    struct Form {
        std::string_view text;
        std::size_t count;
    };
    std::unordered_map<LabelId, std::vector<Form>> forms;
    for (LabelId l : candidates) forms.emplace(l, std::vector<Form>{});
    for (const auto& table : related.tables) {
        const auto& ids = tindex.table_labels[table.doc];
        const auto& positions = tindex.table_label_positions[table.doc];
        for (std::size_t i = 0; i < ids.size(); ++i) {
            auto it = forms.find(ids[i]);
            if (it == forms.end()) continue;
            const std::string_view raw = bundle.tables[table.doc].labels[positions[i]];
            auto& list = it->second;
            auto f = std::find_if(list.begin(), list.end(), [&](const Form& x) { return x.text == raw; });
            if (f == list.end()) {
                list.push_back({raw, 1});
            } else {
                ++f->count;
            }
        }
    }

    std::vector<Suggestion> out;
    out.reserve(take);
    for (LabelId l : candidates) {
        const auto& list = forms.at(l);
        const Form* best = nullptr;
        for (const auto& f : list) {
            if (!best || f.count > best->count) best = &f;
        }
        out.push_back({std::string(best ? best->text : std::string_view(bundle.vocabulary.labels[l])),
                       scores[l],
                       {{kTableRelevance, scores[l]}}});
    }
    return out;
}

}  // namespace tablefill
