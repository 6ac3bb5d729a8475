#include "tablefill/bench.hpp"

#include "tablefill/columns.hpp"
#include "tablefill/index_io.hpp"
#include "tablefill/rows.hpp"
#include "tablefill/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace tablefill {
namespace {

using nlohmann::json;

double run_once(const SeedTable& seed, const IndexBundle& bundle, const ScoringParams& params, BenchMode mode,
                std::size_t limit) {
    const auto start = std::chrono::steady_clock::now();
    std::size_t produced = 0;
    if (mode == BenchMode::rows) {
        const auto candidates = select_row_candidates(seed, bundle, params);
        produced = rank_rows(seed, candidates, bundle, params, limit).size();
    } else {
        const auto related = find_related_tables(seed, bundle, params);
        produced = rank_labels(seed, related, bundle, params, limit).size();
    }
    const std::chrono::duration<double, std::micro> elapsed = std::chrono::steady_clock::now() - start;
    // Keeps the result observable so the calls cannot be elided.
    static std::atomic<std::size_t> sink{0};
    sink.fetch_add(produced, std::memory_order_relaxed);
    return elapsed.count();
}

std::optional<SeedTable> truncated(const SeedTable& seed, BenchMode mode, std::size_t size, bool isolate) {
    const std::string caption = isolate ? std::string{} : seed.caption();
    if (mode == BenchMode::rows) {
        if (seed.entities().size() < size) return std::nullopt;
        std::vector<EntityId> entities(seed.entities().begin(), seed.entities().begin() + static_cast<std::ptrdiff_t>(size));
        return SeedTable(caption, std::move(entities), isolate ? std::vector<std::string>{} : seed.labels());
    }
    if (seed.labels().size() < size) return std::nullopt;
    std::vector<std::string> labels(seed.labels().begin(), seed.labels().begin() + static_cast<std::ptrdiff_t>(size));
    return SeedTable(caption, isolate ? std::vector<EntityId>{} : seed.entities(), std::move(labels));
}

}  // namespace

BenchMode parse_bench_mode(const std::string& text) {
    if (text == "rows") return BenchMode::rows;
    if (text == "columns") return BenchMode::columns;
    throw std::invalid_argument("mode must be rows or columns, got '" + text + "'");
}

std::string to_string(BenchMode mode) { return mode == BenchMode::rows ? "rows" : "columns"; }

double percentile(std::vector<double> samples, double q) {
    if (samples.empty()) return 0.0;
    std::sort(samples.begin(), samples.end());
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size())));
    return samples[std::clamp<std::size_t>(rank, 1, samples.size()) - 1];
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line needs at least two points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line needs at least two distinct x values");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

std::string corpus_fingerprint(const IndexBundle& bundle) {
    const auto text = bundle.provenance.corpus_sha256 + ":" + bundle.provenance.kb_sha256 + ":" +
                      std::to_string(bundle.tables.size()) + ":" + std::to_string(bundle.entity_index.records.size());
    return sha256_hex(text).substr(0, 16);
}

BenchReport run_bench(const IndexBundle& bundle, const ScoringParams& params, const std::vector<SeedTable>& seeds,
                      const BenchOptions& options) {
    if (options.repeats == 0) throw std::invalid_argument("repeats must be at least 1");
    if (options.sizes.empty()) throw std::invalid_argument("at least one size is required");
    if (options.concurrency == 0) throw std::invalid_argument("concurrency must be at least 1");
    params.validate();

    BenchReport report;
    report.mode = options.mode;
    report.repeats = options.repeats;
    report.top_k_tables = params.top_k_tables;
    report.corpus_fingerprint = corpus_fingerprint(bundle);

    for (std::size_t size : options.sizes) {
        if (size == 0) throw std::invalid_argument("sizes must be positive");
        BenchBucket bucket;
        bucket.size = size;
        std::vector<SeedTable> usable;
        for (const auto& seed : seeds) {
            if (auto t = truncated(seed, options.mode, size, options.isolate)) {
                usable.push_back(std::move(*t));
            } else {
                ++bucket.skipped;
            }
        }
        bucket.seeds = usable.size();
        if (!usable.empty()) {
            // One untimed pass warms caches and the allocator.
            run_once(usable.front(), bundle, params, options.mode, options.limit);

            const std::size_t jobs = usable.size() * options.repeats;
            std::vector<double> samples(jobs);
            std::atomic<std::size_t> next{0};
            auto worker = [&] {
                for (std::size_t j = next++; j < jobs; j = next++) {
                    samples[j] = run_once(usable[j % usable.size()], bundle, params, options.mode, options.limit);
                }
            };
            if (options.concurrency == 1) {
                worker();
            } else {
                std::vector<std::jthread> threads;
                for (std::size_t t = 0; t < options.concurrency; ++t) threads.emplace_back(worker);
            }
            bucket.samples = samples.size();
            bucket.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
            bucket.min = *std::min_element(samples.begin(), samples.end());
            bucket.max = *std::max_element(samples.begin(), samples.end());
            bucket.p50 = percentile(samples, 0.50);
            bucket.p95 = percentile(samples, 0.95);
        }
        report.buckets.push_back(bucket);
    }
    return report;
}

std::vector<SeedTable> read_seeds(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open seeds file: " + path.string());
    std::vector<SeedTable> seeds;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = json::parse(line);
            seeds.emplace_back(j.value("caption", std::string{}), j.value("entities", std::vector<EntityId>{}),
                               j.value("labels", std::vector<std::string>{}));
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return seeds;
}

void write_seeds(const std::filesystem::path& path, const std::vector<SeedTable>& seeds) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write seeds file: " + path.string());
    for (const auto& s : seeds) {
        out << json{{"caption", s.caption()}, {"entities", s.entities()}, {"labels", s.labels()}}.dump() << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<SeedTable> sample_seeds(const IndexBundle& bundle, std::size_t n, std::uint64_t rng_seed,
                                    std::size_t min_entities, std::size_t min_labels) {
    std::vector<std::size_t> order(bundle.tables.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(rng_seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<SeedTable> seeds;
    for (std::size_t i : order) {
        if (seeds.size() == n) break;
        const auto& table = bundle.tables[i];
        std::vector<std::string> labels;
        std::vector<std::string> seen;
        for (const auto& raw : table.labels) {
            auto norm = normalize_label(raw);
            if (norm.empty() || std::find(seen.begin(), seen.end(), norm) != seen.end()) continue;
            seen.push_back(std::move(norm));
            labels.push_back(raw);
        }
        if (table.core_entities.size() < min_entities || labels.size() < min_labels) continue;
        seeds.emplace_back(table.caption, table.core_entities, std::move(labels));
    }
    return seeds;
}

std::string report_json(const BenchReport& report) {
    json buckets = json::array();
    for (const auto& b : report.buckets) {
        buckets.push_back({{"size", b.size},
                           {"seeds", b.seeds},
                           {"skipped", b.skipped},
                           {"samples", b.samples},
                           {"repeats", report.repeats},
                           {"meanMicros", b.mean},
                           {"p50Micros", b.p50},
                           {"p95Micros", b.p95},
                           {"minMicros", b.min},
                           {"maxMicros", b.max}});
    }
    std::vector<std::size_t> sizes;
    for (const auto& b : report.buckets) sizes.push_back(b.size);
    const json j{{"mode", to_string(report.mode)},
                 {"inputSizes", sizes},
                 {"repeats", report.repeats},
                 {"topKTables", report.top_k_tables},
                 {"corpusFingerprint", report.corpus_fingerprint},
                 {"buckets", buckets}};
    return j.dump(2);
}

std::string report_table(const BenchReport& report) {
    std::ostringstream out;
    out << "mode " << to_string(report.mode) << ", repeats " << report.repeats << ", corpus "
        << report.corpus_fingerprint << "\n";
    out << std::setw(6) << "size" << std::setw(8) << "seeds" << std::setw(8) << "skipped" << std::setw(12) << "mean ms"
        << std::setw(12) << "p50 ms" << std::setw(12) << "p95 ms" << "\n";
    out << std::fixed << std::setprecision(3);
    for (const auto& b : report.buckets) {
        out << std::setw(6) << b.size << std::setw(8) << b.seeds << std::setw(8) << b.skipped << std::setw(12)
            << b.mean / 1000.0 << std::setw(12) << b.p50 / 1000.0 << std::setw(12) << b.p95 / 1000.0 << "\n";
    }
    return out.str();
}

}  // namespace tablefill
