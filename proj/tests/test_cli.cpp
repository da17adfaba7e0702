#include <doctest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;  // stdout only
    std::string err;
};

Outcome run(const std::string& args, const std::string& env = "") {
    const fs::path err_file = fs::temp_directory_path() / "it2frbc_cli_test.err";
    const std::string cmd = env + std::string(IT2FRBC_CLI) + " " + args + " 2>" + err_file.string();
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    while (const std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
    const int status = pclose(pipe);
    std::ifstream in(err_file);
    std::stringstream err;
    err << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("it2frbc_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("usage errors exit with 1") {
    CHECK(run("").code == 1);
    CHECK(run("frobnicate").code == 1);
    CHECK(run("eval --gen circular --bogus").code == 1);
    CHECK(run("eval --gen circular --ra -0.5").code == 1);
    CHECK(run("eval --gen circular --ra 0.3 --no-sc").code == 1);
    CHECK(run("eval --gen circular --no-sc --p 0").code == 1);
    CHECK(run("eval --gen circular --no-sc --m1 1.0").code == 1);
    CHECK(run("eval --gen circular --no-sc --runs 0").code == 1);
    CHECK(run("eval --gen circular --no-sc --train-frac 1.5").code == 1);
    CHECK(run("eval --gen circular").code == 1);
    CHECK(run("--help").code == 0);
}

TEST_CASE("data errors exit with 2") {
    TempDir tmp;
    CHECK(run("eval --in " + tmp / "missing.csv" + " --no-sc").code == 2);
    std::ofstream(tmp / "bad.csv") << "1,2,a\n3,x,b\n";
    const auto r = run("eval --in " + tmp / "bad.csv" + " --no-sc");
    CHECK(r.code == 2);
    CHECK(r.err.find("line 2") != std::string::npos);
    std::ofstream(tmp / "bad.json") << "{\"format\": \"something else\"}";
    CHECK(run("export-rules --model " + tmp / "bad.json").code == 2);
}

TEST_CASE("gen-data, train, predict and export-rules") {
    TempDir tmp;
    REQUIRE(run("gen-data --which circular --seed 7 --out " + tmp / "c.csv").code == 0);
    const auto train = run("train --in " + tmp / "c.csv" + " --ra 0.2 --seed 7 --model " + tmp / "m.json");
    REQUIRE(train.code == 0);
    CHECK(train.out.find("test accuracy:") != std::string::npos);
    CHECK(train.err.find("m1=1.5 m2=2.5 p=2") != std::string::npos);

    const auto pred = run("predict --model " + tmp / "m.json" + " --in " + tmp / "c.csv" + " --out " + tmp / "p.csv");
    REQUIRE(pred.code == 0);
    const std::string table = slurp(tmp / "p.csv");
    CHECK(table.rfind("x1,x2,class,predicted,score_1,score_2\n", 0) == 0);
    CHECK(std::count(table.begin(), table.end(), '\n') == 187);

    const auto rules = run("export-rules --model " + tmp / "m.json");
    REQUIRE(rules.code == 0);
    CHECK(rules.out.rfind("R1: IF x is A1 (center = (", 0) == 0);

    SUBCASE("dimension mismatch names both sizes") {
        const auto r = run("predict --model " + tmp / "m.json" + " --in " IT2FRBC_DATA_DIR "/iris.csv --out " +
                           tmp / "x.csv");
        CHECK(r.code == 2);
        CHECK(r.err.find("4") != std::string::npos);
        CHECK(r.err.find("2") != std::string::npos);
    }
}

TEST_CASE("cluster writes centers in original units") {
    TempDir tmp;
    const auto r = run("cluster --in " IT2FRBC_DATA_DIR "/iris.csv --ra 0.5 --out " + tmp / "c.csv");
    REQUIRE(r.code == 0);
    const std::string centers = slurp(tmp / "c.csv");
    CHECK(centers.rfind("sepal_length,sepal_width,petal_length,petal_width\n", 0) == 0);
    CHECK(std::count(centers.begin(), centers.end(), '\n') >= 2);
}

TEST_CASE("eval output is byte-identical across invocations and thread counts") {
    const std::string args = "eval --gen circular --runs 8 --ra 0.3 --seed 7 --format json";
    const auto a = run(args);
    const auto b = run(args, "IT2FRBC_THREADS=3 ");
    const auto c = run(args, "IT2FRBC_THREADS=1 ");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    CHECK(b.err.find("threads=3") != std::string::npos);
    CHECK(run(args, "IT2FRBC_THREADS=lots ").code == 1);
    CHECK(a.err.find("# started ") != std::string::npos);
    const auto quiet = run("--no-timestamp " + args);
    CHECK(quiet.err.find("# started ") == std::string::npos);
    CHECK(quiet.err.find("runs=8") != std::string::npos);
    CHECK(quiet.out == a.out);
}

TEST_CASE("bare baseline eval on the circular data") {
    const auto r = run("eval --gen circular --runs 32 --no-sc --seed 7 --format csv");
    REQUIRE(r.code == 0);
    const auto at = r.out.find("average,,,,,");
    REQUIRE(at != std::string::npos);
    const double avg = std::stod(r.out.substr(at + 12));
    CHECK(avg >= 58.0);
    CHECK(avg <= 74.0);
}
