#pragma once

#include "tablefill/index.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace tablefill {

inline constexpr int kIndexFormatVersion = 1;

/// Failure to read or write an index directory. The message names the
/// structure or file involved.
class IndexIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Writes manifest.json plus one binary file per structure into `dir`
/// (created if needed). Output depends only on the bundle contents.
void persist(const IndexBundle& bundle, const std::filesystem::path& dir);

/// Reads a directory written by persist(). Verifies the format version and
/// the per-file checksums recorded in the manifest.
IndexBundle load_index(const std::filesystem::path& dir);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view data);

}  // namespace tablefill
