#include "tablefill/search.hpp"

#include "tablefill/text.hpp"

#include <algorithm>

namespace tablefill {

NameMatcher::NameMatcher(std::string_view query) : normalized_(normalize_label(query)), terms_(tokenize(query)) {}

MatchQuality NameMatcher::match(std::string_view name) const {
    if (normalized_.empty()) return MatchQuality::none;
    const auto norm = normalize_label(name);
    if (norm == normalized_) return MatchQuality::exact;
    if (norm.starts_with(normalized_)) return MatchQuality::prefix;
    if (terms_.empty()) return MatchQuality::none;
    const auto name_terms = tokenize(name);
    const bool all = std::all_of(terms_.begin(), terms_.end(), [&](const std::string& q) {
        return std::any_of(name_terms.begin(), name_terms.end(),
                           [&](const std::string& t) { return t.starts_with(q); });
    });
    return all ? MatchQuality::token : MatchQuality::none;
}

std::vector<EntityHit> search_entities(const IndexBundle& bundle, std::string_view query, std::size_t limit) {
    const NameMatcher matcher(query);
    if (matcher.empty() || limit == 0) return {};
    const auto& records = bundle.entity_index.records;

    // Any match implies the first query term prefixes some name term, so
    // the name postings of those terms cover every match.
    std::vector<EntityIdx> candidates;
    if (matcher.terms().empty()) {
        candidates.resize(records.size());
        for (EntityIdx e = 0; e < records.size(); ++e) candidates[e] = e;
    } else {
        const auto& first = matcher.terms().front();
        const auto& terms = bundle.vocabulary.terms;
        for (auto it = std::lower_bound(terms.begin(), terms.end(), first); it != terms.end() && it->starts_with(first);
             ++it) {
            const auto& postings = bundle.entity_index.name_postings[static_cast<TermId>(it - terms.begin())];
            candidates.insert(candidates.end(), postings.begin(), postings.end());
        }
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    }

    std::vector<std::pair<MatchQuality, EntityIdx>> matches;
    for (EntityIdx e : candidates) {
        const auto q = matcher.match(records[e].label);
        if (q != MatchQuality::none) matches.emplace_back(q, e);
    }
    const auto take = std::min(limit, matches.size());
    std::partial_sort(matches.begin(), matches.begin() + static_cast<std::ptrdiff_t>(take), matches.end(),
                      [](const auto& a, const auto& b) {
                          if (a.first != b.first) return a.first > b.first;
                          return a.second < b.second;
                      });
    std::vector<EntityHit> hits;
    hits.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        const auto& r = records[matches[i].second];
        hits.push_back({r.id, r.label, snippet(r.abstract), matches[i].first});
    }
    return hits;
}

std::vector<LabelHit> search_labels(const IndexBundle& bundle, std::string_view query, std::size_t limit) {
    const NameMatcher matcher(query);
    if (matcher.empty() || limit == 0) return {};
    const auto& labels = bundle.vocabulary.labels;
    std::vector<std::pair<std::size_t, LabelId>> matches;
    for (LabelId l = 0; l < labels.size(); ++l) {
        if (matcher.match(labels[l]) != MatchQuality::none) {
            matches.emplace_back(bundle.table_index.label_postings[l].size(), l);
        }
    }
    const auto take = std::min(limit, matches.size());
    std::partial_sort(matches.begin(), matches.begin() + static_cast<std::ptrdiff_t>(take), matches.end(),
                      [](const auto& a, const auto& b) {
                          if (a.first != b.first) return a.first > b.first;
                          return a.second < b.second;
                      });
    std::vector<LabelHit> hits;
    hits.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        hits.push_back({bundle.vocabulary.label_display[matches[i].second], matches[i].first});
    }
    return hits;
}

std::string snippet(std::string_view text, std::size_t max_chars) {
    std::size_t chars = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        // Count lead bytes only.
        if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
            if (chars == max_chars) return std::string(text.substr(0, i)) + "…";
            ++chars;
        }
    }
    return std::string(text);
}

}  // namespace tablefill
