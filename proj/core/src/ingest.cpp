#include "tablefill/ingest.hpp"

#include "tablefill/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <unordered_map>

namespace tablefill {
namespace {

using json = nlohmann::json;

class LineRejected : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

bool blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string string_field(const json& obj, const char* key, bool required) {
    auto it = obj.find(key);
    if (it == obj.end() || (!required && it->is_null())) {
        if (required) throw LineRejected(std::string("missing field '") + key + "'");
        return {};
    }
    if (!it->is_string()) throw LineRejected(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

std::vector<std::string> string_array(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return {};
    if (!it->is_array()) throw LineRejected(std::string("field '") + key + "' must be an array");
    std::vector<std::string> out;
    out.reserve(it->size());
    for (const auto& v : *it) {
        if (!v.is_string()) throw LineRejected(std::string("field '") + key + "' must hold strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

json parse_object(const std::string& line) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw LineRejected(std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw LineRejected("line is not a JSON object");
    return obj;
}

EntityRecord parse_entity(const std::string& line) {
    const auto obj = parse_object(line);
    EntityRecord record;
    record.id = string_field(obj, "id", true);
    if (record.id.empty()) throw LineRejected("empty entity id");
    record.label = string_field(obj, "label", false);
    record.abstract = string_field(obj, "abstract", false);
    record.categories = string_array(obj, "categories");
    std::erase(record.categories, std::string{});
    std::sort(record.categories.begin(), record.categories.end());
    record.categories.erase(std::unique(record.categories.begin(), record.categories.end()),
                            record.categories.end());
    return record;
}

Cell parse_cell(const json& v) {
    if (!v.is_object()) throw LineRejected("cell must be an object");
    Cell cell;
    cell.text = string_field(v, "text", false);
    auto id = string_field(v, "entityId", false);
    if (!id.empty()) cell.entity_id = std::move(id);
    return cell;
}

CorpusTable parse_table(const std::string& line, const std::unordered_set<EntityId>& kb,
                        std::size_t& dangling) {
    const auto obj = parse_object(line);
    CorpusTable table;
    table.id = string_field(obj, "id", true);
    if (table.id.empty()) throw LineRejected("empty table id");
    table.page_title = string_field(obj, "pageTitle", false);
    table.section_title = string_field(obj, "sectionTitle", false);
    table.caption = string_field(obj, "caption", false);
    table.labels = string_array(obj, "headers");

    if (auto it = obj.find("rows"); it != obj.end() && !it->is_null()) {
        if (!it->is_array()) throw LineRejected("field 'rows' must be an array");
        for (const auto& row : *it) {
            if (!row.is_array()) throw LineRejected("each row must be an array");
            auto& cells = table.rows.emplace_back();
            cells.reserve(row.size());
            for (const auto& v : row) cells.push_back(parse_cell(v));
        }
    }

    std::optional<std::size_t> core;
    if (auto it = obj.find("coreColumnIndex"); it != obj.end() && !it->is_null()) {
        if (!it->is_number_integer() || it->get<long long>() < 0) {
            throw LineRejected("'coreColumnIndex' must be a non-negative integer");
        }
        core = it->get<std::size_t>();
    }

    // Links are resolved before the heuristic so it only counts real entities.
    std::size_t cleared = 0;
    for (auto& row : table.rows) {
        for (auto& cell : row) {
            if (cell.entity_id && !kb.contains(*cell.entity_id)) {
                cell.entity_id.reset();
                ++cleared;
            }
        }
    }

    const auto columns = table.column_count();
    if (core) {
        if (!table.rows.empty() && *core >= columns) {
            throw LineRejected("'coreColumnIndex' " + std::to_string(*core) + " out of range for " +
                               std::to_string(columns) + " columns");
        }
        table.core_column = *core;
    } else {
        table.core_column = guess_core_column(table.rows, columns);
    }

    std::unordered_set<std::string_view> seen;
    for (const auto& row : table.rows) {
        if (table.core_column >= row.size()) continue;
        const auto& cell = row[table.core_column];
        if (cell.entity_id && seen.insert(*cell.entity_id).second) {
            table.core_entities.push_back(*cell.entity_id);
        }
    }
    dangling += cleared;
    return table;
}

template <typename Record, typename Parse>
void read_lines(std::istream& in, std::vector<Record>& out, std::vector<LineError>& errors,
                std::size_t& lines, std::size_t& duplicates, Parse&& parse) {
    std::unordered_map<std::string, std::size_t> position;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (blank(line)) continue;
        ++lines;
        if (!is_valid_utf8(line)) {
            errors.push_back({number, "invalid UTF-8"});
            continue;
        }
        try {
            std::optional<Record> record = parse(line);
            if (!record) continue;
            auto [it, inserted] = position.try_emplace(record->id, out.size());
            if (inserted) {
                out.push_back(std::move(*record));
            } else {
                out[it->second] = std::move(*record);
                ++duplicates;
            }
        } catch (const LineRejected& e) {
            errors.push_back({number, e.what()});
        } catch (const json::exception& e) {
            errors.push_back({number, e.what()});
        }
    }
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open " + path.string());
    return in;
}

json cell_json(const Cell& cell) {
    json c = {{"text", cell.text}};
    c["entityId"] = cell.entity_id ? json(*cell.entity_id) : json(nullptr);
    return c;
}

}  // namespace

std::unordered_set<EntityId> KbLoadResult::id_set() const {
    std::unordered_set<EntityId> ids;
    ids.reserve(entities.size());
    for (const auto& e : entities) ids.insert(e.id);
    return ids;
}

std::size_t guess_core_column(const std::vector<std::vector<Cell>>& rows, std::size_t columns) {
    std::size_t best = 0;
    double best_fraction = -1.0;
    for (std::size_t col = 0; col < columns; ++col) {
        std::size_t linked = 0;
        std::size_t present = 0;
        for (const auto& row : rows) {
            if (col >= row.size()) continue;
            ++present;
            if (row[col].entity_id) ++linked;
        }
        const double fraction = present == 0 ? 0.0 : static_cast<double>(linked) / static_cast<double>(present);
        if (fraction > best_fraction) {
            best_fraction = fraction;
            best = col;
        }
    }
    return best;
}

KbLoadResult parse_kb(std::istream& in) {
    KbLoadResult result;
    read_lines(in, result.entities, result.errors, result.lines, result.duplicate_ids,
               [&](const std::string& line) -> std::optional<EntityRecord> {
                   auto record = parse_entity(line);
                   if (record.abstract.empty()) {
                       ++result.dropped_entities;
                       return std::nullopt;
                   }
                   return record;
               });
    return result;
}

KbLoadResult load_kb(const std::filesystem::path& path) {
    auto in = open_input(path);
    auto result = parse_kb(in);
    if (in.bad()) throw IngestError("read error in " + path.string());
    return result;
}

CorpusLoadResult parse_corpus(std::istream& in, const std::unordered_set<EntityId>& kb) {
    CorpusLoadResult result;
    read_lines(in, result.tables, result.errors, result.lines, result.duplicate_ids,
               [&](const std::string& line) -> std::optional<CorpusTable> {
                   std::size_t dangling = 0;
                   auto table = parse_table(line, kb, dangling);
                   result.dangling_links += dangling;
                   return table;
               });
    std::unordered_set<std::string> vocabulary;
    for (const auto& table : result.tables) {
        for (const auto& label : table.labels) {
            auto norm = normalize_label(label);
            if (!norm.empty()) vocabulary.insert(std::move(norm));
        }
    }
    result.label_vocabulary_size = vocabulary.size();
    return result;
}

CorpusLoadResult load_corpus(const std::filesystem::path& path, const std::unordered_set<EntityId>& kb) {
    auto in = open_input(path);
    auto result = parse_corpus(in, kb);
    if (in.bad()) throw IngestError("read error in " + path.string());
    return result;
}

CorpusStats combine_stats(const KbLoadResult& kb, const CorpusLoadResult& corpus) {
    CorpusStats stats;
    stats.table_count = corpus.tables.size();
    stats.entity_count = kb.entities.size();
    stats.dropped_entities = kb.dropped_entities;
    stats.dangling_links = corpus.dangling_links;
    stats.label_vocabulary_size = corpus.label_vocabulary_size;
    stats.duplicate_ids = kb.duplicate_ids + corpus.duplicate_ids;
    stats.line_errors = kb.errors.size() + corpus.errors.size();
    return stats;
}

std::string to_json_line(const EntityRecord& entity) {
    json j = {{"id", entity.id},
              {"label", entity.label},
              {"abstract", entity.abstract},
              {"categories", entity.categories}};
    return j.dump();
}

std::string to_json_line(const CorpusTable& table) {
    json rows = json::array();
    for (const auto& row : table.rows) {
        json cells = json::array();
        for (const auto& cell : row) cells.push_back(cell_json(cell));
        rows.push_back(std::move(cells));
    }
    json j = {{"id", table.id},
              {"pageTitle", table.page_title},
              {"sectionTitle", table.section_title},
              {"caption", table.caption},
              {"headers", table.labels},
              {"coreColumnIndex", table.core_column},
              {"rows", std::move(rows)}};
    return j.dump();
}

}  // namespace tablefill
