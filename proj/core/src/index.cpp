#include "tablefill/index.hpp"

#include "tablefill/text.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

namespace tablefill {
namespace {

template <typename Record>
std::vector<Record> dedupe_sorted(std::vector<Record> records) {
    // Stable sort keeps input order among equal ids, so the last one wins.
    std::stable_sort(records.begin(), records.end(),
                     [](const Record& a, const Record& b) { return a.id < b.id; });
    std::vector<Record> out;
    out.reserve(records.size());
    for (auto& r : records) {
        if (!out.empty() && out.back().id == r.id) {
            out.back() = std::move(r);
        } else {
            out.push_back(std::move(r));
        }
    }
    return out;
}

template <typename Map>
std::uint32_t find_or(const Map& map, std::string_view key) noexcept {
    auto it = map.find(key);
    return it == map.end() ? kNotFound : it->second;
}

struct TokenizedTable {
    std::array<std::vector<std::string>, kTableFieldCount> fields;
};

std::vector<std::string> label_tokens(const std::vector<std::string>& labels) {
    std::vector<std::string> out;
    for (const auto& label : labels) {
        auto terms = tokenize(label);
        std::move(terms.begin(), terms.end(), std::back_inserter(out));
    }
    return out;
}

std::vector<TermVector::Entry> count_terms(const std::vector<std::string>& tokens,
                                           const std::unordered_map<std::string_view, TermId>& ids) {
    std::vector<TermVector::Entry> entries;
    entries.reserve(tokens.size());
    for (const auto& t : tokens) entries.emplace_back(ids.at(t), 1);
    return TermVector(std::move(entries)).entries();
}

}  // namespace

TermVector::TermVector(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end());
    for (const auto& [term, freq] : entries) {
        if (freq == 0) continue;
        if (!entries_.empty() && entries_.back().first == term) {
            entries_.back().second += freq;
        } else {
            entries_.emplace_back(term, freq);
        }
        total_ += freq;
    }
}

std::uint32_t TermVector::frequency(TermId term) const noexcept {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), term,
                               [](const Entry& e, TermId t) { return e.first < t; });
    return (it != entries_.end() && it->first == term) ? it->second : 0;
}

void IndexBundle::finalize() {
    table_ids_.clear();
    entity_ids_.clear();
    category_ids_.clear();
    term_ids_.clear();
    label_ids_.clear();
    table_ids_.reserve(tables.size());
    for (DocId d = 0; d < tables.size(); ++d) table_ids_.emplace(tables[d].id, d);
    const auto& records = entity_index.records;
    entity_ids_.reserve(records.size());
    for (EntityIdx e = 0; e < records.size(); ++e) entity_ids_.emplace(records[e].id, e);
    for (CategoryIdx c = 0; c < category_index.ids.size(); ++c) category_ids_.emplace(category_index.ids[c], c);
    term_ids_.reserve(vocabulary.terms.size());
    for (TermId t = 0; t < vocabulary.terms.size(); ++t) term_ids_.emplace(vocabulary.terms[t], t);
    for (LabelId l = 0; l < vocabulary.labels.size(); ++l) label_ids_.emplace(vocabulary.labels[l], l);
}

DocId IndexBundle::table_index_of(std::string_view id) const noexcept { return find_or(table_ids_, id); }
EntityIdx IndexBundle::entity_index_of(std::string_view id) const noexcept { return find_or(entity_ids_, id); }
CategoryIdx IndexBundle::category_index_of(std::string_view id) const noexcept {
    return find_or(category_ids_, id);
}
TermId IndexBundle::term_id(std::string_view term) const noexcept { return find_or(term_ids_, term); }
LabelId IndexBundle::label_id(std::string_view normalized) const noexcept { return find_or(label_ids_, normalized); }

const EntityRecord* IndexBundle::find_entity(std::string_view id) const noexcept {
    const auto e = entity_index_of(id);
    return e == kNotFound ? nullptr : &entity_index.records[e];
}

std::vector<TableId> IndexBundle::lookup_tables_by_entity(std::string_view entity) const {
    std::vector<TableId> out;
    const auto e = entity_index_of(entity);
    if (e == kNotFound) return out;
    for (DocId d : table_index.entity_postings[e]) out.push_back(tables[d].id);
    return out;
}

std::vector<EntityId> IndexBundle::lookup_entities_by_category(std::string_view category) const {
    std::vector<EntityId> out;
    const auto c = category_index_of(category);
    if (c == kNotFound) return out;
    for (EntityIdx e : category_index.members[c]) out.push_back(entity_index.records[e].id);
    return out;
}

std::vector<TableId> IndexBundle::lookup_tables_by_label(std::string_view raw_label) const {
    std::vector<TableId> out;
    const auto l = label_id(normalize_label(raw_label));
    if (l == kNotFound) return out;
    for (DocId d : table_index.label_postings[l]) out.push_back(tables[d].id);
    return out;
}

std::span<const Posting> IndexBundle::field_postings(TableField field, std::string_view term) const noexcept {
    const auto t = term_id(term);
    if (t == kNotFound) return {};
    return table_index.field(field).postings[t];
}

bool IndexBundle::operator==(const IndexBundle& other) const {
    return tables == other.tables && vocabulary == other.vocabulary && table_index == other.table_index &&
           entity_index == other.entity_index && category_index == other.category_index &&
           stats == other.stats && provenance == other.provenance;
}

IndexBundle build_indexes(std::vector<CorpusTable> input_tables, std::vector<EntityRecord> input_entities) {
    IndexBundle bundle;
    bundle.tables = dedupe_sorted(std::move(input_tables));
    auto& tables = bundle.tables;
    auto& entities = bundle.entity_index.records;
    entities = dedupe_sorted(std::move(input_entities));
    for (auto& e : entities) {
        std::sort(e.categories.begin(), e.categories.end());
        e.categories.erase(std::unique(e.categories.begin(), e.categories.end()), e.categories.end());
    }

    std::unordered_map<std::string_view, EntityIdx> entity_ids;
    entity_ids.reserve(entities.size());
    for (EntityIdx e = 0; e < entities.size(); ++e) entity_ids.emplace(entities[e].id, e);

    // Drop references to entities outside the KB.
    for (auto& table : tables) {
        std::erase_if(table.core_entities, [&](const EntityId& id) { return !entity_ids.contains(id); });
        for (auto& row : table.rows) {
            for (auto& cell : row) {
                if (cell.entity_id && !entity_ids.contains(*cell.entity_id)) cell.entity_id.reset();
            }
        }
    }

    const auto table_count = static_cast<std::uint32_t>(tables.size());
    const auto entity_count = entities.size();

    // Tokenize everything once, then assign term ids in sorted order.
    std::vector<TokenizedTable> tokenized(table_count);
    std::vector<std::vector<std::string>> abstract_tokens(entity_count);
    std::vector<std::vector<std::string>> name_tokens(entity_count);
    std::vector<std::string> all_terms;
    for (DocId d = 0; d < table_count; ++d) {
        auto& fields = tokenized[d].fields;
        fields[static_cast<std::size_t>(TableField::caption)] = tokenize(tables[d].caption);
        fields[static_cast<std::size_t>(TableField::page_title)] = tokenize(tables[d].page_title);
        fields[static_cast<std::size_t>(TableField::section_title)] = tokenize(tables[d].section_title);
        fields[static_cast<std::size_t>(TableField::labels_text)] = label_tokens(tables[d].labels);
        for (const auto& f : fields) all_terms.insert(all_terms.end(), f.begin(), f.end());
    }
    for (EntityIdx e = 0; e < entity_count; ++e) {
        abstract_tokens[e] = tokenize(entities[e].abstract);
        name_tokens[e] = tokenize(entities[e].label);
        all_terms.insert(all_terms.end(), abstract_tokens[e].begin(), abstract_tokens[e].end());
        all_terms.insert(all_terms.end(), name_tokens[e].begin(), name_tokens[e].end());
    }
    std::sort(all_terms.begin(), all_terms.end());
    all_terms.erase(std::unique(all_terms.begin(), all_terms.end()), all_terms.end());
    bundle.vocabulary.terms = std::move(all_terms);
    const auto& terms = bundle.vocabulary.terms;
    std::unordered_map<std::string_view, TermId> term_ids;
    term_ids.reserve(terms.size());
    for (TermId t = 0; t < terms.size(); ++t) term_ids.emplace(terms[t], t);

    // Field postings; documents are visited in id order so postings come out sorted.
    auto& tindex = bundle.table_index;
    tindex.doc_count = table_count;
    for (std::size_t f = 0; f < kTableFieldCount; ++f) {
        auto& field = tindex.fields[f];
        field.postings.assign(terms.size(), {});
        field.lengths.assign(table_count, 0);
        std::uint64_t total_length = 0;
        for (DocId d = 0; d < table_count; ++d) {
            const auto& tokens = tokenized[d].fields[f];
            field.lengths[d] = static_cast<std::uint32_t>(tokens.size());
            total_length += tokens.size();
            for (const auto& [term, tf] : count_terms(tokens, term_ids)) {
                field.postings[term].push_back({d, tf});
            }
        }
        field.average_length =
            table_count == 0 ? 0.0 : static_cast<double>(total_length) / static_cast<double>(table_count);
    }

    // Normalized labels, their postings and display forms.
    std::vector<std::vector<std::pair<std::string, std::uint32_t>>> table_norm_labels(table_count);
    std::vector<std::string> label_names;
    for (DocId d = 0; d < table_count; ++d) {
        std::unordered_set<std::string> seen;
        const auto& raw_labels = tables[d].labels;
        for (std::uint32_t i = 0; i < raw_labels.size(); ++i) {
            auto norm = normalize_label(raw_labels[i]);
            if (norm.empty() || !seen.insert(norm).second) continue;
            label_names.push_back(norm);
            table_norm_labels[d].emplace_back(std::move(norm), i);
        }
    }
    std::sort(label_names.begin(), label_names.end());
    label_names.erase(std::unique(label_names.begin(), label_names.end()), label_names.end());
    bundle.vocabulary.labels = std::move(label_names);
    const auto& labels = bundle.vocabulary.labels;
    std::unordered_map<std::string_view, LabelId> label_ids;
    for (LabelId l = 0; l < labels.size(); ++l) label_ids.emplace(labels[l], l);

    tindex.label_postings.assign(labels.size(), {});
    tindex.table_labels.assign(table_count, {});
    tindex.table_label_positions.assign(table_count, {});
    // Per label: raw form -> (count, order of first sighting).
    std::vector<std::map<std::string, std::pair<std::size_t, std::size_t>>> raw_forms(labels.size());
    for (DocId d = 0; d < table_count; ++d) {
        for (const auto& [norm, position] : table_norm_labels[d]) {
            const auto l = label_ids.at(norm);
            tindex.label_postings[l].push_back(d);
            tindex.table_labels[d].push_back(l);
            tindex.table_label_positions[d].push_back(position);
            auto& forms = raw_forms[l];
            auto [it, inserted] = forms.try_emplace(tables[d].labels[position], 0, forms.size());
            ++it->second.first;
        }
    }
    bundle.vocabulary.label_display.resize(labels.size());
    for (LabelId l = 0; l < labels.size(); ++l) {
        const std::string* best = nullptr;
        std::pair<std::size_t, std::size_t> best_key{0, 0};
        for (const auto& [form, key] : raw_forms[l]) {
            if (!best || key.first > best_key.first ||
                (key.first == best_key.first && key.second < best_key.second)) {
                best = &form;
                best_key = key;
            }
        }
        bundle.vocabulary.label_display[l] = best ? *best : labels[l];
    }

    // Core-column entity structures and per-entity corpus statistics.
    tindex.entity_postings.assign(entity_count, {});
    tindex.table_entities.assign(table_count, {});
    std::vector<std::vector<TermVector::Entry>> label_entries(entity_count);
    std::vector<std::vector<TermVector::Entry>> caption_entries(entity_count);
    for (DocId d = 0; d < table_count; ++d) {
        auto& core = tindex.table_entities[d];
        for (const auto& id : tables[d].core_entities) core.push_back(entity_ids.at(id));
        std::sort(core.begin(), core.end());
        core.erase(std::unique(core.begin(), core.end()), core.end());
        if (core.empty()) continue;

        const auto label_counts =
            count_terms(tokenized[d].fields[static_cast<std::size_t>(TableField::labels_text)], term_ids);
        auto caption_counts =
            count_terms(tokenized[d].fields[static_cast<std::size_t>(TableField::caption)], term_ids);
        for (auto& entry : caption_counts) entry.second = 1;

        for (EntityIdx e : core) {
            tindex.entity_postings[e].push_back(d);
            label_entries[e].insert(label_entries[e].end(), label_counts.begin(), label_counts.end());
            caption_entries[e].insert(caption_entries[e].end(), caption_counts.begin(), caption_counts.end());
        }
    }

    auto& eindex = bundle.entity_index;
    auto& stats = bundle.stats;
    stats.table_count = table_count;
    eindex.label_terms.resize(entity_count);
    stats.caption_cooccurrence.resize(entity_count);
    eindex.abstract_terms.resize(entity_count);
    eindex.name_postings.assign(terms.size(), {});
    stats.abstract_model.counts.assign(terms.size(), 0);
    stats.label_model.counts.assign(terms.size(), 0);
    for (EntityIdx e = 0; e < entity_count; ++e) {
        eindex.label_terms[e] = TermVector(std::move(label_entries[e]));
        stats.caption_cooccurrence[e] = TermVector(std::move(caption_entries[e]));
        eindex.abstract_terms[e] = TermVector(count_terms(abstract_tokens[e], term_ids));
        for (const auto& [term, tf] : eindex.abstract_terms[e].entries()) {
            stats.abstract_model.counts[term] += tf;
            stats.abstract_model.total += tf;
        }
        for (const auto& [term, tf] : count_terms(name_tokens[e], term_ids)) eindex.name_postings[term].push_back(e);
    }
    const auto& label_field = tindex.field(TableField::labels_text);
    for (TermId t = 0; t < terms.size(); ++t) {
        for (const auto& p : label_field.postings[t]) {
            stats.label_model.counts[t] += p.tf;
            stats.label_model.total += p.tf;
        }
    }

    // Categories.
    auto& cindex = bundle.category_index;
    for (const auto& e : entities) cindex.ids.insert(cindex.ids.end(), e.categories.begin(), e.categories.end());
    std::sort(cindex.ids.begin(), cindex.ids.end());
    cindex.ids.erase(std::unique(cindex.ids.begin(), cindex.ids.end()), cindex.ids.end());
    std::unordered_map<std::string_view, CategoryIdx> category_ids;
    for (CategoryIdx c = 0; c < cindex.ids.size(); ++c) category_ids.emplace(cindex.ids[c], c);
    cindex.members.assign(cindex.ids.size(), {});
    eindex.categories.assign(entity_count, {});
    for (EntityIdx e = 0; e < entity_count; ++e) {
        for (const auto& cat : entities[e].categories) {
            const auto c = category_ids.at(cat);
            cindex.members[c].push_back(e);
            eindex.categories[e].push_back(c);
        }
    }

    bundle.finalize();
    return bundle;
}

}  // namespace tablefill
