#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tablefill {

/// Unicode case fold, collapse whitespace runs to one space, trim.
/// Idempotent. Invalid UTF-8 is replaced with U+FFFD.
std::string normalize_label(std::string_view raw);

/// Case-folded terms split on anything that is not a letter, digit or
/// combining mark. Never yields an empty term.
std::vector<std::string> tokenize(std::string_view text);

/// True if `text` is well-formed UTF-8.
bool is_valid_utf8(std::string_view text) noexcept;

}  // namespace tablefill
