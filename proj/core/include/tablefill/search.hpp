#pragma once

#include "tablefill/index.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tablefill {

/// How well a display name matches a typed query.
enum class MatchQuality : int { none = 0, token = 1, prefix = 2, exact = 3 };

/// Compares normalized forms: exact equality, then prefix, then every query
/// term being a prefix of some name term.
class NameMatcher {
public:
    explicit NameMatcher(std::string_view query);

    MatchQuality match(std::string_view name) const;
    bool empty() const noexcept { return normalized_.empty(); }
    const std::vector<std::string>& terms() const noexcept { return terms_; }

private:
    std::string normalized_;
    std::vector<std::string> terms_;
};

struct EntityHit {
    EntityId id;
    std::string label;
    std::string snippet;
    MatchQuality quality = MatchQuality::none;
};

struct LabelHit {
    std::string label;  // most frequent raw spelling in the corpus
    std::size_t table_count = 0;
};

/// Entities whose canonical name matches `query`, best match first, then by id.
std::vector<EntityHit> search_entities(const IndexBundle& bundle, std::string_view query, std::size_t limit);

/// Corpus labels matching `query`, most used first, then by normalized label.
std::vector<LabelHit> search_labels(const IndexBundle& bundle, std::string_view query, std::size_t limit);

/// First `max_chars` code points of `text`, with an ellipsis when cut.
std::string snippet(std::string_view text, std::size_t max_chars = 160);

}  // namespace tablefill
