#pragma once

#include "tablefill/types.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace tablefill {

/// Shape of a generated Wikipedia-like corpus. Entities cluster into topics;
/// each topic owns categories, heading labels and caption vocabulary, and
/// its tables list its entities in the core column.
struct SynthConfig {
    std::size_t tables = 1000;
    std::size_t entities = 500;
    std::size_t categories = 150;
    std::size_t topics = 30;
    std::uint64_t seed = 42;
    double missing_abstract_rate = 0.02;
    double dangling_link_rate = 0.02;
    double implicit_core_rate = 0.05;  // tables written without coreColumnIndex
};

/// Raw generated records, in the form ingestion reads them: some entities
/// lack an abstract and some cells link to ids outside the KB.
struct SynthCorpus {
    std::vector<EntityRecord> entities;
    std::vector<CorpusTable> tables;  // core_entities left empty
    std::vector<bool> explicit_core;  // per table: write coreColumnIndex
};

SynthCorpus generate_corpus(const SynthConfig& config);

/// Writes the two JSON Lines input files.
void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& kb_path,
                  const std::filesystem::path& corpus_path);

}  // namespace tablefill
