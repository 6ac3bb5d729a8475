#include "tablefill/index_io.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

namespace tablefill {
namespace {

static_assert(std::endian::native == std::endian::little, "index files are written little-endian");

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr char kMagic[4] = {'T', 'F', 'I', 'X'};
constexpr const char* kManifest = "manifest.json";

class Writer {
public:
    explicit Writer(std::string_view structure) {
        bytes_.append(kMagic, sizeof kMagic);
        put(static_cast<std::uint32_t>(kIndexFormatVersion));
        put(std::string(structure));
    }

    template <typename T>
        requires std::is_arithmetic_v<T>
    void put(T v) {
        char buf[sizeof(T)];
        std::memcpy(buf, &v, sizeof(T));
        bytes_.append(buf, sizeof(T));
    }
    void put(const std::string& s) {
        put(static_cast<std::uint64_t>(s.size()));
        bytes_.append(s);
    }
    void put(const Posting& p) {
        put(p.doc);
        put(p.tf);
    }
    void put(const TermVector& tv) { put(tv.entries()); }
    template <typename A, typename B>
    void put(const std::pair<A, B>& p) {
        put(p.first);
        put(p.second);
    }
    template <typename T>
    void put(const std::optional<T>& v) {
        put(static_cast<std::uint8_t>(v.has_value()));
        if (v) put(*v);
    }
    void put(const Cell& c) {
        put(c.text);
        put(c.entity_id);
    }
    void put(const CollectionModel& m) {
        put(m.counts);
        put(m.total);
    }
    void put(const FieldIndex& f) {
        put(f.postings);
        put(f.lengths);
        put(f.average_length);
    }
    template <typename T>
    void put(const std::vector<T>& v) {
        put(static_cast<std::uint64_t>(v.size()));
        for (const auto& x : v) put(x);
    }

    const std::string& bytes() const noexcept { return bytes_; }

private:
    std::string bytes_;
};

class Reader {
public:
    Reader(std::string bytes, std::string structure) : bytes_(std::move(bytes)), structure_(std::move(structure)) {
        if (bytes_.size() < sizeof kMagic || std::memcmp(bytes_.data(), kMagic, sizeof kMagic) != 0) {
            fail("bad magic");
        }
        pos_ = sizeof kMagic;
        const auto version = get<std::uint32_t>();
        if (version != static_cast<std::uint32_t>(kIndexFormatVersion)) {
            fail("format version mismatch: file has " + std::to_string(version) + ", expected " +
                 std::to_string(kIndexFormatVersion));
        }
        if (get<std::string>() != structure_) fail("structure name mismatch");
    }

    template <typename T>
    T get() {
        T value{};
        read(value);
        return value;
    }

    void expect_end() const {
        if (pos_ != bytes_.size()) fail("trailing bytes");
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw IndexIoError("corrupt index structure '" + structure_ + "': " + what);
    }

    template <typename T>
        requires std::is_arithmetic_v<T>
    void read(T& v) {
        if (bytes_.size() - pos_ < sizeof(T)) fail("truncated");
        std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
    }
    void read(std::string& s) {
        const auto n = get<std::uint64_t>();
        if (bytes_.size() - pos_ < n) fail("truncated");
        s.assign(bytes_.data() + pos_, n);
        pos_ += n;
    }
    void read(Posting& p) {
        read(p.doc);
        read(p.tf);
    }
    void read(TermVector& tv) {
        std::vector<TermVector::Entry> entries;
        read(entries);
        tv = TermVector(std::move(entries));
    }
    template <typename A, typename B>
    void read(std::pair<A, B>& p) {
        read(p.first);
        read(p.second);
    }
    template <typename T>
    void read(std::optional<T>& v) {
        if (get<std::uint8_t>() != 0) {
            v.emplace();
            read(*v);
        } else {
            v.reset();
        }
    }
    void read(Cell& c) {
        read(c.text);
        read(c.entity_id);
    }
    void read(CollectionModel& m) {
        read(m.counts);
        read(m.total);
    }
    void read(FieldIndex& f) {
        read(f.postings);
        read(f.lengths);
        read(f.average_length);
    }
    template <typename T>
    void read(std::vector<T>& v) {
        const auto n = get<std::uint64_t>();
        // Every element takes at least one byte, which bounds bogus sizes.
        if (n > bytes_.size() - pos_) fail("truncated");
        v.clear();
        v.resize(n);
        for (auto& x : v) read(x);
    }

    friend void read_table(Reader&, CorpusTable&);
    friend void read_entity(Reader&, EntityRecord&);

    std::string bytes_;
    std::string structure_;
    std::size_t pos_ = 0;
};

void put_table(Writer& w, const CorpusTable& t) {
    w.put(t.id);
    w.put(t.page_title);
    w.put(t.section_title);
    w.put(t.caption);
    w.put(t.labels);
    w.put(t.core_entities);
    w.put(static_cast<std::uint64_t>(t.core_column));
    w.put(t.rows);
}

void read_table(Reader& r, CorpusTable& t) {
    r.read(t.id);
    r.read(t.page_title);
    r.read(t.section_title);
    r.read(t.caption);
    r.read(t.labels);
    r.read(t.core_entities);
    t.core_column = r.get<std::uint64_t>();
    r.read(t.rows);
}

void put_entity(Writer& w, const EntityRecord& e) {
    w.put(e.id);
    w.put(e.label);
    w.put(e.abstract);
    w.put(e.categories);
}

void read_entity(Reader& r, EntityRecord& e) {
    r.read(e.id);
    r.read(e.label);
    r.read(e.abstract);
    r.read(e.categories);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IndexIoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

void write_file(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IndexIoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IndexIoError("write failed for " + path.string());
}

struct Structure {
    const char* name;
    const char* file;
};

constexpr Structure kTables{"tables", "tables.bin"};
constexpr Structure kVocabulary{"vocabulary", "vocabulary.bin"};
constexpr Structure kTableIndex{"table-index", "table_index.bin"};
constexpr Structure kEntityIndex{"entity-index", "entity_index.bin"};
constexpr Structure kCategoryIndex{"category-index", "category_index.bin"};
constexpr Structure kCollectionStats{"collection-stats", "collection_stats.bin"};

}  // namespace

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1) {
        throw std::runtime_error("SHA-256 failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

void persist(const IndexBundle& bundle, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IndexIoError("cannot create index directory " + dir.string() + ": " + ec.message());

    json files = json::object();
    auto emit = [&](const Structure& s, const Writer& w) {
        try {
            write_file(dir / s.file, w.bytes());
        } catch (const IndexIoError& e) {
            throw IndexIoError(std::string("persisting ") + s.name + ": " + e.what());
        }
        files[s.file] = sha256_hex(w.bytes());
    };

    {
        Writer w(kTables.name);
        w.put(static_cast<std::uint64_t>(bundle.tables.size()));
        for (const auto& t : bundle.tables) put_table(w, t);
        emit(kTables, w);
    }
    {
        Writer w(kVocabulary.name);
        w.put(bundle.vocabulary.terms);
        w.put(bundle.vocabulary.labels);
        w.put(bundle.vocabulary.label_display);
        emit(kVocabulary, w);
    }
    {
        Writer w(kTableIndex.name);
        const auto& ti = bundle.table_index;
        for (const auto& f : ti.fields) w.put(f);
        w.put(ti.entity_postings);
        w.put(ti.label_postings);
        w.put(ti.table_labels);
        w.put(ti.table_label_positions);
        w.put(ti.table_entities);
        w.put(ti.doc_count);
        emit(kTableIndex, w);
    }
    {
        Writer w(kEntityIndex.name);
        const auto& ei = bundle.entity_index;
        w.put(static_cast<std::uint64_t>(ei.records.size()));
        for (const auto& e : ei.records) put_entity(w, e);
        w.put(ei.abstract_terms);
        w.put(ei.label_terms);
        w.put(ei.name_postings);
        w.put(ei.categories);
        emit(kEntityIndex, w);
    }
    {
        Writer w(kCategoryIndex.name);
        w.put(bundle.category_index.ids);
        w.put(bundle.category_index.members);
        emit(kCategoryIndex, w);
    }
    {
        Writer w(kCollectionStats.name);
        w.put(bundle.stats.label_model);
        w.put(bundle.stats.abstract_model);
        w.put(bundle.stats.caption_cooccurrence);
        w.put(bundle.stats.table_count);
        emit(kCollectionStats, w);
    }

    json manifest = {{"formatVersion", kIndexFormatVersion},
                     {"tables", bundle.table_count()},
                     {"entities", bundle.entity_count()},
                     {"categories", bundle.category_index.ids.size()},
                     {"builtFrom", {{"corpus", bundle.provenance.corpus_sha256}, {"kb", bundle.provenance.kb_sha256}}},
                     {"files", files}};
    write_file(dir / kManifest, manifest.dump(2) + "\n");
}

IndexBundle load_index(const fs::path& dir) {
    const auto manifest_path = dir / kManifest;
    if (!fs::exists(manifest_path)) throw IndexIoError("missing manifest: " + manifest_path.string());

    json manifest;
    try {
        manifest = json::parse(read_file(manifest_path));
    } catch (const json::parse_error& e) {
        throw IndexIoError(std::string("corrupt manifest: ") + e.what());
    }
    if (!manifest.is_object() || !manifest.contains("formatVersion") || !manifest["formatVersion"].is_number_integer()) {
        throw IndexIoError("corrupt manifest: no integer formatVersion");
    }
    const auto version = manifest["formatVersion"].get<long long>();
    if (version != kIndexFormatVersion) {
        throw IndexIoError("index format version mismatch: index has version " + std::to_string(version) +
                           ", this build reads version " + std::to_string(kIndexFormatVersion));
    }

    IndexBundle bundle;
    auto open = [&](const Structure& s) {
        const auto path = dir / s.file;
        if (!fs::exists(path)) throw IndexIoError(std::string("missing index file for ") + s.name + ": " + path.string());
        auto bytes = read_file(path);
        const auto files = manifest.value("files", json::object());
        if (!files.contains(s.file) || files[s.file] != sha256_hex(bytes)) {
            throw IndexIoError(std::string("checksum mismatch for ") + s.name + " (" + path.string() + ")");
        }
        return Reader(std::move(bytes), s.name);
    };

    try {
        {
            auto r = open(kTables);
            bundle.tables.resize(r.get<std::uint64_t>());
            for (auto& t : bundle.tables) read_table(r, t);
            r.expect_end();
        }
        {
            auto r = open(kVocabulary);
            bundle.vocabulary.terms = r.get<std::vector<std::string>>();
            bundle.vocabulary.labels = r.get<std::vector<std::string>>();
            bundle.vocabulary.label_display = r.get<std::vector<std::string>>();
            r.expect_end();
        }
        {
            auto r = open(kTableIndex);
            auto& ti = bundle.table_index;
            for (auto& f : ti.fields) f = r.get<FieldIndex>();
            ti.entity_postings = r.get<std::vector<std::vector<DocId>>>();
            ti.label_postings = r.get<std::vector<std::vector<DocId>>>();
            ti.table_labels = r.get<std::vector<std::vector<LabelId>>>();
            ti.table_label_positions = r.get<std::vector<std::vector<std::uint32_t>>>();
            ti.table_entities = r.get<std::vector<std::vector<EntityIdx>>>();
            ti.doc_count = r.get<std::uint32_t>();
            r.expect_end();
        }
        {
            auto r = open(kEntityIndex);
            auto& ei = bundle.entity_index;
            ei.records.resize(r.get<std::uint64_t>());
            for (auto& e : ei.records) read_entity(r, e);
            ei.abstract_terms = r.get<std::vector<TermVector>>();
            ei.label_terms = r.get<std::vector<TermVector>>();
            ei.name_postings = r.get<std::vector<std::vector<EntityIdx>>>();
            ei.categories = r.get<std::vector<std::vector<CategoryIdx>>>();
            r.expect_end();
        }
        {
            auto r = open(kCategoryIndex);
            bundle.category_index.ids = r.get<std::vector<CategoryId>>();
            bundle.category_index.members = r.get<std::vector<std::vector<EntityIdx>>>();
            r.expect_end();
        }
        {
            auto r = open(kCollectionStats);
            bundle.stats.label_model = r.get<CollectionModel>();
            bundle.stats.abstract_model = r.get<CollectionModel>();
            bundle.stats.caption_cooccurrence = r.get<std::vector<TermVector>>();
            bundle.stats.table_count = r.get<std::uint32_t>();
            r.expect_end();
        }
    } catch (const std::bad_alloc&) {
        throw IndexIoError("out of memory while loading index from " + dir.string());
    }

    const auto built_from = manifest.value("builtFrom", json::object());
    bundle.provenance.corpus_sha256 = built_from.value("corpus", "");
    bundle.provenance.kb_sha256 = built_from.value("kb", "");

    if (manifest.value("tables", -1LL) != static_cast<long long>(bundle.table_count()) ||
        manifest.value("entities", -1LL) != static_cast<long long>(bundle.entity_count())) {
        throw IndexIoError("manifest counts disagree with index contents in " + dir.string());
    }
    bundle.finalize();
    return bundle;
}

}  // namespace tablefill
