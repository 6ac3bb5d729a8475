#pragma once

#include "tablefill/index.hpp"
#include "tablefill/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tablefill {

enum class BenchMode { rows, columns };

BenchMode parse_bench_mode(const std::string& text);
std::string to_string(BenchMode mode);

struct BenchOptions {
    BenchMode mode = BenchMode::rows;
    std::vector<std::size_t> sizes{1, 2, 3, 4, 5};
    std::size_t repeats = 10;
    std::size_t limit = 10;
    std::size_t concurrency = 1;
    // Seeds carry only the varied input (entities for rows, labels for
    // columns); when false the caption and the other field are kept.
    bool isolate = true;
};

/// Latency aggregates for one seed size, in microseconds.
struct BenchBucket {
    std::size_t size = 0;
    std::size_t seeds = 0;    // seeds timed at this size
    std::size_t skipped = 0;  // seeds too small for this size
    std::size_t samples = 0;
    double mean = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct BenchReport {
    BenchMode mode = BenchMode::rows;
    std::size_t repeats = 1;
    std::size_t top_k_tables = 0;
    std::string corpus_fingerprint;
    std::vector<BenchBucket> buckets;
};

/// Times the engine calls (candidate selection plus ranking) for every seed
/// truncated to each size: the first s entities in rows mode, the first s
/// labels in columns mode. Seeds lacking s of them are skipped at that size.
/// Buckets are reproducible in structure; only the timings vary.
BenchReport run_bench(const IndexBundle& bundle, const ScoringParams& params, const std::vector<SeedTable>& seeds,
                      const BenchOptions& options);

/// Seeds file: one {"caption", "entities", "labels"} object per line.
std::vector<SeedTable> read_seeds(const std::filesystem::path& path);
void write_seeds(const std::filesystem::path& path, const std::vector<SeedTable>& seeds);

/// Draws n distinct corpus tables (deterministic for a given rng_seed), each
/// with at least min_entities core entities and min_labels labels, and turns
/// them into seeds. Fewer than n are returned if the corpus runs out.
std::vector<SeedTable> sample_seeds(const IndexBundle& bundle, std::size_t n, std::uint64_t rng_seed,
                                    std::size_t min_entities, std::size_t min_labels);

/// Nearest-rank percentile, q in [0, 1].
double percentile(std::vector<double> samples, double q);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Least-squares line through (x, y); r_squared is 1 for a perfect fit and
/// for constant y.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

std::string report_json(const BenchReport& report);
std::string report_table(const BenchReport& report);

/// Short hash of the bundle's input checksums and counts.
std::string corpus_fingerprint(const IndexBundle& bundle);

}  // namespace tablefill
