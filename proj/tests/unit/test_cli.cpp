#include "fixture.hpp"

#include "tablefill/cli.hpp"
#include "tablefill/index_io.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

using namespace tablefill;
using namespace tablefill::testing;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    args.insert(args.begin(), "tablefill");
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / (name + std::to_string(getpid()))) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

// The CLI binary as a child process with stdout and stderr in files.
struct Child {
    pid_t pid = -1;
    fs::path out, err;

    Child(const std::vector<std::string>& args, const fs::path& dir) : out(dir / "child.out"), err(dir / "child.err") {
        pid = fork();
        if (pid == 0) {
            const int o = open(out.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
            const int e = open(err.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
            dup2(o, 1);
            dup2(e, 2);
            std::vector<char*> argv;
            std::string exe = TABLEFILL_CLI;
            argv.push_back(exe.data());
            std::vector<std::string> copy = args;
            for (auto& a : copy) argv.push_back(a.data());
            argv.push_back(nullptr);
            execv(exe.c_str(), argv.data());
            _exit(127);
        }
    }

    // Exit code, or -1 if still running after the timeout.
    int wait_exit(std::chrono::milliseconds timeout) {
        const auto until = std::chrono::steady_clock::now() + timeout;
        while (std::chrono::steady_clock::now() < until) {
            int status = 0;
            if (waitpid(pid, &status, WNOHANG) == pid) {
                pid = -1;
                return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
        }
        return -1;
    }

    ~Child() {
        if (pid > 0) {
            kill(pid, SIGKILL);
            waitpid(pid, nullptr, 0);
        }
    }
};

int serving_port(const fs::path& out, std::chrono::milliseconds timeout) {
    const std::regex line(R"(serving \d+ tables, \d+ entities on http://127\.0\.0\.1:(\d+))");
    const auto until = std::chrono::steady_clock::now() + timeout;
    while (std::chrono::steady_clock::now() < until) {
        std::smatch m;
        const auto text = slurp(out);
        if (std::regex_search(text, m, line)) return std::stoi(m[1]);
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    return -1;
}

void build_fixture_index(const fs::path& dir) {
    write_fixture(make_fixture(101), dir);
    REQUIRE(cli({"build", "--corpus", (dir / "corpus.jsonl").string(), "--kb", (dir / "kb.jsonl").string(), "--out",
                 (dir / "index").string()})
                .code == 0);
}

}  // namespace

TEST_CASE("build happy path") {
    TempDir dir("tablefill_cli_build");
    write_fixture(make_fixture(101), dir.path);
    const auto r = cli({"build", "--corpus", (dir.path / "corpus.jsonl").string(), "--kb",
                        (dir.path / "kb.jsonl").string(), "--out", (dir.path / "a").string()});
    CHECK(r.code == 0);
    CHECK(fs::exists(dir.path / "a" / "manifest.json"));
    CHECK(r.out.find("tables                10") != std::string::npos);
    CHECK(r.out.find("entities              20") != std::string::npos);

    SUBCASE("rebuild is byte-identical") {
        REQUIRE(cli({"build", "--corpus", (dir.path / "corpus.jsonl").string(), "--kb",
                     (dir.path / "kb.jsonl").string(), "--out", (dir.path / "b").string()})
                    .code == 0);
        std::size_t files = 0;
        for (const auto& entry : fs::directory_iterator(dir.path / "a")) {
            ++files;
            CHECK(slurp(entry.path()) == slurp(dir.path / "b" / entry.path().filename()));
        }
        CHECK(files == 7);
    }
}

TEST_CASE("build with a missing input names the path") {
    TempDir dir("tablefill_cli_missing");
    write_fixture(make_fixture(101), dir.path);
    const auto missing = (dir.path / "nope.jsonl").string();
    const auto r = cli({"build", "--corpus", missing, "--kb", (dir.path / "kb.jsonl").string(), "--out",
                        (dir.path / "x").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find(missing) != std::string::npos);
    CHECK(!fs::exists(dir.path / "x" / "manifest.json"));
}

TEST_CASE("build reports malformed lines and continues") {
    TempDir dir("tablefill_cli_malformed");
    write_fixture(make_fixture(101), dir.path);
    {
        std::ofstream kb(dir.path / "kb.jsonl", std::ios::app);
        kb << "{not json\n";
    }
    const auto r = cli({"build", "--corpus", (dir.path / "corpus.jsonl").string(), "--kb",
                        (dir.path / "kb.jsonl").string(), "--out", (dir.path / "i").string()});
    CHECK(r.code == 0);
    CHECK(r.err.find("kb.jsonl:21:") != std::string::npos);
    CHECK(r.out.find("line errors           1") != std::string::npos);
}

TEST_CASE("usage errors") {
    CHECK(cli({}).code != 0);
    CHECK(cli({"frobnicate"}).code != 0);
    CHECK(cli({"build", "--corpus", "x"}).code != 0);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("bench from the command line") {
    TempDir dir("tablefill_cli_bench");
    build_fixture_index(dir.path);
    const auto index = (dir.path / "index").string();
    const auto seeds = (dir.path / "seeds.jsonl").string();
    const auto report = (dir.path / "rows.json").string();
    const auto r = cli({"bench", "--index", index, "--mode", "rows", "--sizes", "1,2", "--repeats", "2", "--sample",
                        "5", "--rng-seed", "3", "--seeds", seeds, "--json", report});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("mean ms") != std::string::npos);
    const auto j = json::parse(slurp(report));
    CHECK(j["inputSizes"] == json::array({1, 2}));
    CHECK(j["buckets"][0]["samples"] == 10);

    // The written seeds file drives a second, columns run.
    const auto cols = (dir.path / "cols.json").string();
    REQUIRE(cli({"bench", "--index", index, "--mode", "columns", "--sizes", "1,2", "--repeats", "2", "--seeds", seeds,
                 "--json", cols, "--uncapped"})
                .code == 0);
    const auto c = json::parse(slurp(cols));
    CHECK(c["mode"] == "columns");
    CHECK(c["topKTables"] == 10);
    CHECK(c["buckets"][1]["seeds"] == 5);

    CHECK(cli({"bench", "--index", index, "--mode", "rows"}).code == 1);
    CHECK(cli({"bench", "--index", index, "--mode", "sideways", "--sample", "2"}).code != 0);
    CHECK(cli({"bench", "--index", (dir.path / "none").string(), "--sample", "2"}).code == 1);
}

TEST_CASE("synth writes ingestible files") {
    TempDir dir("tablefill_cli_synth");
    const auto kb = (dir.path / "kb.jsonl").string();
    const auto corpus = (dir.path / "corpus.jsonl").string();
    REQUIRE(cli({"synth", "--tables", "100", "--entities", "80", "--topics", "5", "--categories", "20", "--kb", kb,
                 "--corpus", corpus})
                .code == 0);
    const auto r = cli({"build", "--corpus", corpus, "--kb", kb, "--out", (dir.path / "i").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("tables                100") != std::string::npos);
}

TEST_CASE("serve answers health and stops on SIGTERM") {
    TempDir dir("tablefill_cli_serve");
    build_fixture_index(dir.path);
    Child child({"serve", "--index", (dir.path / "index").string(), "--port", "0"}, dir.path);
    const int port = serving_port(child.out, std::chrono::seconds(20));
    REQUIRE(port > 0);

    httplib::Client client("127.0.0.1", port);
    auto res = client.Get("/v1/health");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(json::parse(res->body) == json{{"status", "ok"}, {"tables", 10}, {"entities", 20}});

    kill(child.pid, SIGTERM);
    CHECK(child.wait_exit(std::chrono::seconds(10)) == 0);
    CHECK(slurp(child.out).find("stopped") != std::string::npos);
}

TEST_CASE("serve rejects a corrupt manifest") {
    TempDir dir("tablefill_cli_corrupt");
    build_fixture_index(dir.path);
    {
        std::ofstream m(dir.path / "index" / "manifest.json", std::ios::trunc);
        m << "{\"formatVersion\": ";
    }
    Child child({"serve", "--index", (dir.path / "index").string(), "--port", "0"}, dir.path);
    CHECK(child.wait_exit(std::chrono::seconds(20)) == 1);
    CHECK(slurp(child.err).find("cannot load index") != std::string::npos);
}

TEST_CASE("serve fails on a port in use and names it") {
    TempDir dir("tablefill_cli_port");
    build_fixture_index(dir.path);

    const int sock = socket(AF_INET, SOCK_STREAM, 0);
    REQUIRE(sock >= 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    REQUIRE(bind(sock, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
    REQUIRE(listen(sock, 4) == 0);
    socklen_t len = sizeof addr;
    getsockname(sock, reinterpret_cast<sockaddr*>(&addr), &len);
    const auto port = std::to_string(ntohs(addr.sin_port));

    Child child({"serve", "--index", (dir.path / "index").string(), "--port", port}, dir.path);
    CHECK(child.wait_exit(std::chrono::seconds(20)) == 1);
    CHECK(slurp(child.err).find(port) != std::string::npos);
    close(sock);
}
