#include "tablefill/types.hpp"

#include "tablefill/text.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace tablefill {

SeedTable::SeedTable(std::string caption, std::vector<EntityId> entities, std::vector<std::string> labels)
    : caption_(std::move(caption)), entities_(std::move(entities)), labels_(std::move(labels)) {
    std::unordered_set<std::string_view> seen_entities;
    for (const auto& id : entities_) {
        if (id.empty()) throw std::invalid_argument("seed entity id must not be empty");
        if (!seen_entities.insert(id).second) {
            throw std::invalid_argument("duplicate seed entity: " + id);
        }
    }
    std::unordered_set<std::string> seen_labels;
    for (const auto& label : labels_) {
        if (!seen_labels.insert(normalize_label(label)).second) {
            throw std::invalid_argument("duplicate seed label: " + label);
        }
    }
}

std::size_t CorpusTable::column_count() const noexcept {
    std::size_t columns = labels.size();
    for (const auto& row : rows) columns = std::max(columns, row.size());
    return columns;
}

void sort_suggestions(std::vector<Suggestion>& suggestions) {
    std::sort(suggestions.begin(), suggestions.end(), [](const Suggestion& a, const Suggestion& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.target < b.target;
    });
}

void ScoringParams::validate() const {
    auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!in_unit(lambda_entity)) throw std::invalid_argument("lambda-E must lie in [0,1]");
    if (!in_unit(lambda_caption)) throw std::invalid_argument("lambda-c must lie in [0,1]");
    if (!positive(mu_labels)) throw std::invalid_argument("mu-labels must be > 0");
    if (!positive(mu_entity)) throw std::invalid_argument("mu-entity must be > 0");
    if (!positive(bm25_k1)) throw std::invalid_argument("bm25-k1 must be > 0");
    if (!in_unit(bm25_b)) throw std::invalid_argument("bm25-b must lie in [0,1]");
    if (top_k_tables == 0) throw std::invalid_argument("top-k-tables must be positive");
}

}  // namespace tablefill
