#include "tablefill/synth.hpp"

#include "tablefill/ingest.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

namespace tablefill {
namespace {

constexpr std::array<const char*, 24> kSyllables = {"ka", "lo", "mi", "ne", "ru", "ta", "vo", "si", "de", "ga", "bo", "ri",
                                                     "an", "el", "os", "ul", "fa", "zi", "po", "he", "ja", "qu", "ye", "wu"};

constexpr std::array<const char*, 12> kCommonLabels = {"Year", "Notes", "Rank", "Country", "Score", "Date",
                                                       "Location", "Team", "Points", "Result", "Ref.", "Club"};

std::string word(std::uint64_t n, std::size_t min_syllables = 2) {
    std::string w;
    std::size_t count = 0;
    do {
        w += kSyllables[n % kSyllables.size()];
        n /= kSyllables.size();
        ++count;
    } while (n > 0 || count < min_syllables);
    return w;
}

std::string capitalized(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::size_t uniform(std::size_t lo, std::size_t hi) {  // inclusive
        return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
    }
    double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    bool chance(double p) { return unit() < p; }
    std::mt19937_64& engine() { return engine_; }
    // Skewed pick in [0, n): small indices are popular.
    std::size_t skewed(std::size_t n) {
        const double u = unit();
        return std::min(n - 1, static_cast<std::size_t>(static_cast<double>(n) * u * u));
    }

private:
    std::mt19937_64 engine_;
};

struct Topic {
    std::vector<std::size_t> categories;
    std::vector<std::string> labels;
    std::vector<std::string> words;
    std::vector<std::size_t> members;  // entity indices
};

}  // namespace

SynthCorpus generate_corpus(const SynthConfig& config) {
    if (config.topics == 0 || config.categories < config.topics || config.entities < config.topics) {
        throw std::invalid_argument("synthetic corpus needs topics <= categories and topics <= entities, topics > 0");
    }
    Rng rng(config.seed);
    SynthCorpus corpus;

    std::vector<Topic> topics(config.topics);
    for (std::size_t c = 0; c < config.categories; ++c) topics[c % config.topics].categories.push_back(c);
    for (std::size_t t = 0; t < config.topics; ++t) {
        auto& topic = topics[t];
        for (std::size_t i = 0; i < 6; ++i) topic.words.push_back(word(1000 + t * 7 + i * 7919 % 4001));
        for (std::size_t i = 0; i < 10; ++i) {
            const auto a = word(50000 + (t * 13 + i * 31) % 900);
            topic.labels.push_back(i % 3 == 0 ? capitalized(a) : capitalized(a) + " " + word(70000 + i % 40));
        }
    }
    const auto category_name = [&](std::size_t c) {
        return "Category:" + capitalized(topics[c % config.topics].words[0]) + "_" + word(c, 1);
    };

    corpus.entities.reserve(config.entities);
    for (std::size_t i = 0; i < config.entities; ++i) {
        const auto t = i % config.topics;
        auto& topic = topics[t];
        topic.members.push_back(i);
        EntityRecord e;
        e.id = "E" + std::to_string(i);
        e.label = capitalized(word(i * 2654435761ULL % 1000003)) + " " + capitalized(word(i, 2));
        if (!rng.chance(config.missing_abstract_rate)) {
            e.abstract = e.label + " is a " + topic.words[rng.uniform(0, 5)] + " " + topic.words[rng.uniform(0, 5)] +
                         " from " + word(rng.uniform(0, 300)) + ", known for " + topic.words[rng.uniform(0, 5)] + " " +
                         word(rng.uniform(300, 600)) + ".";
        }
        const auto n_cats = rng.uniform(1, std::min<std::size_t>(3, topic.categories.size()));
        for (std::size_t k = 0; k < n_cats; ++k) {
            e.categories.push_back(category_name(topic.categories[rng.skewed(topic.categories.size())]));
        }
        if (rng.chance(0.15)) e.categories.push_back(category_name(rng.uniform(0, config.categories - 1)));
        std::sort(e.categories.begin(), e.categories.end());
        e.categories.erase(std::unique(e.categories.begin(), e.categories.end()), e.categories.end());
        corpus.entities.push_back(std::move(e));
    }

    corpus.tables.reserve(config.tables);
    corpus.explicit_core.reserve(config.tables);
    const auto width = std::to_string(config.tables).size();
    for (std::size_t j = 0; j < config.tables; ++j) {
        const auto& topic = topics[rng.skewed(config.topics)];
        CorpusTable table;
        auto id = std::to_string(j);
        table.id = "T" + std::string(width - id.size(), '0') + id;
        const auto year = std::to_string(1950 + rng.uniform(0, 70));
        table.page_title = "List of " + topic.words[0] + " " + topic.words[rng.uniform(1, 5)];
        table.section_title = capitalized(word(rng.uniform(0, 200))) + " " + year;
        table.caption = capitalized(topic.words[rng.uniform(0, 5)]) + " " + topic.words[rng.uniform(0, 5)] + " " + year;

        const bool numbered = rng.chance(0.3);
        if (numbered) table.labels.push_back("No.");
        table.core_column = numbered ? 1 : 0;
        table.labels.push_back(rng.chance(0.2) ? "Name" : topic.labels[0]);
        const auto n_topic_labels = rng.uniform(2, 5);
        for (std::size_t k = 0; k < n_topic_labels; ++k) table.labels.push_back(topic.labels[rng.skewed(topic.labels.size())]);
        const auto n_common = rng.uniform(0, 2);
        for (std::size_t k = 0; k < n_common; ++k) table.labels.push_back(kCommonLabels[rng.uniform(0, kCommonLabels.size() - 1)]);
        // Headers are distinct within a table.
        std::vector<std::string> headers;
        for (auto& l : table.labels) {
            if (std::find(headers.begin(), headers.end(), l) == headers.end()) headers.push_back(l);
        }
        // Attribute columns come in no particular order.
        std::shuffle(headers.begin() + static_cast<std::ptrdiff_t>(table.core_column) + 1, headers.end(), rng.engine());
        table.labels = std::move(headers);

        const auto n_rows = rng.uniform(3, 10);
        for (std::size_t r = 0; r < n_rows; ++r) {
            std::vector<Cell> row;
            for (std::size_t c = 0; c < table.labels.size(); ++c) {
                Cell cell;
                if (c == table.core_column) {
                    if (rng.chance(config.dangling_link_rate)) {
                        cell.text = capitalized(word(rng.uniform(0, 5000)));
                        cell.entity_id = "X" + std::to_string(rng.uniform(0, 100000));
                    } else {
                        const auto e = topic.members[rng.skewed(topic.members.size())];
                        cell.text = corpus.entities[e].label;
                        cell.entity_id = corpus.entities[e].id;
                    }
                } else if (numbered && c == 0) {
                    cell.text = std::to_string(r + 1);
                } else if (rng.chance(0.05)) {
                    const auto e = rng.uniform(0, config.entities - 1);
                    cell.text = corpus.entities[e].label;
                    cell.entity_id = corpus.entities[e].id;
                } else {
                    cell.text = std::to_string(rng.uniform(0, 999));
                }
                row.push_back(std::move(cell));
            }
            table.rows.push_back(std::move(row));
        }
        corpus.explicit_core.push_back(!rng.chance(config.implicit_core_rate));
        corpus.tables.push_back(std::move(table));
    }
    return corpus;
}

void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& kb_path,
                  const std::filesystem::path& corpus_path) {
    std::ofstream kb(kb_path, std::ios::binary | std::ios::trunc);
    if (!kb) throw std::runtime_error("cannot write " + kb_path.string());
    for (const auto& e : corpus.entities) kb << to_json_line(e) << '\n';

    std::ofstream out(corpus_path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + corpus_path.string());
    for (std::size_t i = 0; i < corpus.tables.size(); ++i) {
        if (corpus.explicit_core[i]) {
            out << to_json_line(corpus.tables[i]) << '\n';
        } else {
            auto j = nlohmann::json::parse(to_json_line(corpus.tables[i]));
            j.erase("coreColumnIndex");
            out << j.dump() << '\n';
        }
    }
    if (!kb || !out) throw std::runtime_error("write failed for synthetic corpus");
}

}  // namespace tablefill
