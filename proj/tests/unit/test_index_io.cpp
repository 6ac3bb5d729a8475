#include "fixture.hpp"

#include "tablefill/index_io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace tablefill;
using namespace tablefill::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("tablefill-io-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
}

}  // namespace

TEST_CASE("persist then load is the identity") {
    TempDir dir;
    auto fx = make_fixture(21);
    auto b = fx.build();
    b.provenance = {"aa", "bb"};
    persist(b, dir.path);
    CHECK(fs::exists(dir.path / "manifest.json"));
    const auto loaded = load_index(dir.path);
    CHECK(loaded == b);
    CHECK(loaded.entity_index_of("E05") == b.entity_index_of("E05"));
    CHECK(loaded.lookup_tables_by_label("team") == b.lookup_tables_by_label("team"));

    const auto manifest = nlohmann::json::parse(slurp(dir.path / "manifest.json"));
    CHECK(manifest.at("formatVersion") == kIndexFormatVersion);
    CHECK(manifest.at("tables") == 10);
    CHECK(manifest.at("entities") == 20);
    CHECK(manifest.at("builtFrom").at("corpus") == "aa");
    CHECK(manifest.at("builtFrom").at("kb") == "bb");
}

TEST_CASE("two builds from identical input are byte-identical") {
    TempDir a, c;
    persist(make_fixture(3).build(), a.path);
    persist(make_fixture(3).build(), c.path);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(a.path)) {
        CAPTURE(entry.path());
        CHECK(slurp(entry.path()) == slurp(c.path / entry.path().filename()));
        ++files;
    }
    CHECK(files == 7);
}

TEST_CASE("load errors") {
    TempDir dir;
    SUBCASE("empty directory") {
        CHECK_THROWS_WITH_AS(load_index(dir.path), doctest::Contains("missing manifest"), IndexIoError);
    }
    SUBCASE("version mismatch names both versions") {
        persist(make_fixture(1).build(), dir.path);
        auto m = nlohmann::json::parse(slurp(dir.path / "manifest.json"));
        m["formatVersion"] = 999;
        write(dir.path / "manifest.json", m.dump());
        try {
            load_index(dir.path);
            FAIL("expected an error");
        } catch (const IndexIoError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("999") != std::string::npos);
            CHECK(msg.find(std::to_string(kIndexFormatVersion)) != std::string::npos);
        }
    }
    SUBCASE("corrupted structure file") {
        persist(make_fixture(1).build(), dir.path);
        auto bytes = slurp(dir.path / "table_index.bin");
        bytes[bytes.size() / 2] ^= 0x5a;
        write(dir.path / "table_index.bin", bytes);
        CHECK_THROWS_WITH_AS(load_index(dir.path), doctest::Contains("checksum mismatch"), IndexIoError);
    }
    SUBCASE("truncated structure file with a matching checksum") {
        persist(make_fixture(1).build(), dir.path);
        auto bytes = slurp(dir.path / "vocabulary.bin");
        bytes.resize(bytes.size() / 2);
        write(dir.path / "vocabulary.bin", bytes);
        auto m = nlohmann::json::parse(slurp(dir.path / "manifest.json"));
        m["files"]["vocabulary.bin"] = sha256_hex(bytes);
        write(dir.path / "manifest.json", m.dump());
        CHECK_THROWS_AS(load_index(dir.path), IndexIoError);
    }
    SUBCASE("missing structure file") {
        persist(make_fixture(1).build(), dir.path);
        fs::remove(dir.path / "entity_index.bin");
        CHECK_THROWS_WITH_AS(load_index(dir.path), doctest::Contains("missing index file"), IndexIoError);
    }
    SUBCASE("manifest counts disagree") {
        persist(make_fixture(1).build(), dir.path);
        auto m = nlohmann::json::parse(slurp(dir.path / "manifest.json"));
        m["tables"] = 11;
        write(dir.path / "manifest.json", m.dump());
        CHECK_THROWS_AS(load_index(dir.path), IndexIoError);
    }
    SUBCASE("garbage manifest") {
        write(dir.path / "manifest.json", "{not json");
        CHECK_THROWS_WITH_AS(load_index(dir.path), doctest::Contains("corrupt manifest"), IndexIoError);
    }
}

TEST_CASE("sha256") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    TempDir dir;
    write(dir.path / "f", "abc");
    CHECK(sha256_file(dir.path / "f") == sha256_hex("abc"));
}
