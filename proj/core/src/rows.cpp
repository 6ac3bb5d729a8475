#include "tablefill/rows.hpp"

#include "tablefill/retrieval.hpp"
#include "tablefill/scoring.hpp"

#include <algorithm>

namespace tablefill {
namespace {

void sort_unique(std::vector<EntityIdx>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<EntityIdx> without(std::vector<EntityIdx> v, const std::vector<EntityIdx>& excluded) {
    std::erase_if(v, [&](EntityIdx e) { return std::binary_search(excluded.begin(), excluded.end(), e); });
    return v;
}

std::vector<DocId> intersect(const std::vector<DocId>& a, const std::vector<DocId>& b) {
    std::vector<DocId> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// Tables containing the seed entities: all of them, or any of them.
std::vector<DocId> seed_tables(const ResolvedSeed& seed, const IndexBundle& bundle, SeedTableMatch match) {
    const auto& postings = bundle.table_index.entity_postings;
    if (seed.entities.empty()) return {};
    if (match == SeedTableMatch::any_entity) {
        std::vector<DocId> all;
        for (EntityIdx e : seed.entities) all.insert(all.end(), postings[e].begin(), postings[e].end());
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        return all;
    }
    // A seed id missing from the KB is in no table.
    if (seed.entities.size() != seed.entity_count) return {};
    std::vector<EntityIdx> order = seed.entities;
    std::sort(order.begin(), order.end(),
              [&](EntityIdx a, EntityIdx b) { return postings[a].size() < postings[b].size(); });
    std::vector<DocId> common = postings[order.front()];
    for (std::size_t i = 1; i < order.size() && !common.empty(); ++i) common = intersect(common, postings[order[i]]);
    return common;
}

struct Scored {
    EntityIdx entity;
    double similarity;
    double labels;
    double caption;
    double score;
};

}  // namespace

std::vector<EntityId> RowCandidateSet::ids(const IndexBundle& bundle) const {
    std::vector<EntityId> out;
    out.reserve(entities.size());
    for (EntityIdx e : entities) out.push_back(bundle.entity_index.records[e].id);
    return out;
}

RowCandidateSet select_row_candidates(const SeedTable& seed, const IndexBundle& bundle, const ScoringParams& params) {
    if (seed.entities().empty()) throw SeedError("row population requires at least one seed entity");
    const auto resolved = resolve_seed(seed, bundle);

    std::vector<EntityIdx> from_kb;
    for (EntityIdx e : resolved.entities) {
        for (CategoryIdx c : bundle.entity_index.categories[e]) {
            const auto& members = bundle.category_index.members[c];
            from_kb.insert(from_kb.end(), members.begin(), members.end());
        }
    }
    sort_unique(from_kb);
    from_kb = without(std::move(from_kb), resolved.entities);

    std::vector<EntityIdx> from_tc;
    for (DocId d : retrieve_tables(resolved, bundle, params).merged()) {
        const auto& core = bundle.table_index.table_entities[d];
        from_tc.insert(from_tc.end(), core.begin(), core.end());
    }
    sort_unique(from_tc);
    from_tc = without(std::move(from_tc), resolved.entities);

    RowCandidateSet set;
    set.from_kb = from_kb.size();
    set.from_tc = from_tc.size();
    std::set_union(from_kb.begin(), from_kb.end(), from_tc.begin(), from_tc.end(), std::back_inserter(set.entities));
    return set;
}

std::vector<Suggestion> rank_rows(const SeedTable& seed, const RowCandidateSet& candidates, const IndexBundle& bundle,
                                  const ScoringParams& params, std::size_t limit) {
    if (limit == 0) return {};
    const auto resolved = resolve_seed(seed, bundle);
    const auto& eindex = bundle.entity_index;

    const auto common_tables = seed_tables(resolved, bundle, params.seed_table_match);
    const auto caption_terms = term_ids(resolved.caption_terms, bundle);

    // Number of seed tables each entity appears in, sorted by entity.
    std::vector<std::pair<EntityIdx, std::uint32_t>> shared;
    {
        std::vector<EntityIdx> all;
        for (DocId d : common_tables) {
            const auto& core = bundle.table_index.table_entities[d];
            all.insert(all.end(), core.begin(), core.end());
        }
        std::sort(all.begin(), all.end());
        for (EntityIdx e : all) {
            if (!shared.empty() && shared.back().first == e) {
                ++shared.back().second;
            } else {
                shared.emplace_back(e, 1);
            }
        }
    }

    std::vector<Scored> scored;
    scored.reserve(candidates.entities.size());
    for (EntityIdx e : candidates.entities) {
        if (std::binary_search(resolved.entities.begin(), resolved.entities.end(), e)) continue;

        double kb = 0.0;
        if (resolved.entity_count > 0) {
            const auto& cats = eindex.categories[e];
            for (EntityIdx s : resolved.entities) kb += jaccard<CategoryIdx>(cats, eindex.categories[s]);
            kb /= static_cast<double>(resolved.entity_count);
        }
        double tc = 0.0;
        if (!common_tables.empty()) {
            auto it = std::lower_bound(shared.begin(), shared.end(), e,
                                       [](const auto& p, EntityIdx x) { return p.first < x; });
            if (it != shared.end() && it->first == e) {
                tc = static_cast<double>(it->second) / static_cast<double>(common_tables.size());
            }
        }
        const double similarity = params.lambda_entity * kb + (1.0 - params.lambda_entity) * tc;

        const double labels =
            resolved.labels.empty() ? 1.0 : column_labels_likelihood(resolved.label_terms, e, bundle, params);

        double caption = 1.0;
        if (resolved.has_caption()) {
            const auto& abstract = eindex.abstract_terms[e];
            const auto& cooccur = bundle.stats.caption_cooccurrence[e];
            const auto tables_with_e = bundle.entity_table_count(e);
            for (TermId t : caption_terms) {
                const double kb_part = dirichlet_lm_prob(t, abstract, bundle.stats.abstract_model, params.mu_entity);
                double tc_part = 0.0;
                if (tables_with_e > 0 && t != kNotFound) {
                    tc_part = static_cast<double>(cooccur.frequency(t)) / static_cast<double>(tables_with_e);
                }
                caption *= params.lambda_caption * kb_part + (1.0 - params.lambda_caption) * tc_part;
            }
        }
        scored.push_back({e, similarity, labels, caption, similarity * labels * caption});
    }

    const auto take = std::min(limit, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(),
                      [](const Scored& a, const Scored& b) {
                          if (a.score != b.score) return a.score > b.score;
                          return a.entity < b.entity;
                      });

    std::vector<Suggestion> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        const auto& s = scored[i];
        out.push_back({eindex.records[s.entity].id,
                       s.score,
                       {{kEntitySimilarity, s.similarity}, {kLabelLikelihood, s.labels}, {kCaptionLikelihood, s.caption}}});
    }
    return out;
}

}  // namespace tablefill
