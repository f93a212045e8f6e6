#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "multisync/cli.hpp"
#include "multisync/graphs.hpp"
#include "multisync/json_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace multisync;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("multisync_test_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

int run(const std::vector<std::string>& args, std::string* stdout_text = nullptr,
        std::string* stderr_text = nullptr) {
    std::ostringstream out, err;
    const int code = cli::run_command(args, out, err);
    if (stdout_text) *stdout_text = out.str();
    if (stderr_text) *stderr_text = err.str();
    return code;
}

void write_paper_graphs(const TempDir& dir) {
    const auto gs = paper_example();
    for (int i = 0; i < 3; ++i) {
        io::json j;
        j["n"] = 5;
        j["laplacian"] = io::matrix_to_json(gs[static_cast<std::size_t>(i)].matrix());
        write_file(dir.file("g" + std::to_string(i + 1) + ".json"), j.dump());
    }
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("spanning-tree verdicts and exit codes") {
    TempDir dir("sptree");
    write_paper_graphs(dir);
    std::string out;
    CHECK(run({"spanning-tree", dir.file("g1.json"), dir.file("g2.json"), dir.file("g3.json")},
              &out) == cli::kExitSatisfied);
    CHECK(out.find("spanning directed tree: yes") != std::string::npos);

    // two copies of one disconnected layer
    io::json half;
    half["n"] = 4;
    half["weights"] = io::json::parse("[[0,1,0,0],[1,0,0,0],[0,0,0,1],[0,0,1,0]]");
    write_file(dir.file("half.json"), half.dump());
    CHECK(run({"spanning-tree", dir.file("half.json"), dir.file("half.json")}) ==
          cli::kExitUnsatisfied);

    // mismatched orders are an input error
    io::json small;
    small["n"] = 3;
    small["weights"] = io::json::parse("[[0,1,0],[0,0,1],[1,0,0]]");
    write_file(dir.file("small.json"), small.dump());
    CHECK(run({"spanning-tree", dir.file("g1.json"), dir.file("small.json")}) ==
          cli::kExitInputError);
}

TEST_CASE("bounds and xi-max on a complete graph") {
    TempDir dir("ximax");
    io::json k5;
    k5["n"] = 5;
    k5["weights"] = io::json::parse(
        "[[0,1,1,1,1],[1,0,1,1,1],[1,1,0,1,1],[1,1,1,0,1],[1,1,1,1,0]]");
    write_file(dir.file("k5.json"), k5.dump());

    std::string out;
    CHECK(run({"--out", dir.file("res"), "bounds", dir.file("k5.json")}, &out) == 0);
    CHECK(out.find("upper bound = 5") != std::string::npos);

    CHECK(run({"--out", dir.file("res"), "xi-max", dir.file("k5.json"), "--eps", "1e-3"}, &out) ==
          0);
    const io::json res = io::load_json_file(dir.file("res") + "/ximax.json");
    CHECK(std::abs(res["value"].get<double>() - 5.0) <= 2e-3);
    CHECK(res["certificate"]["slacks"]["irreducible"].get<bool>());
}

TEST_CASE("check theorem5 and hypothesis violations") {
    TempDir dir("check");
    io::json cycle;
    cycle["n"] = 4;
    cycle["weights"] = io::json::parse("[[0,0,0,1],[1,0,0,0],[0,1,0,0],[0,0,1,0]]");
    write_file(dir.file("cycle.json"), cycle.dump());

    io::json sys;
    sys["graphs"] = {"cycle.json"};
    sys["D"] = io::json::parse("[[[1]]]");
    sys["dynamics"] = {{"kind", "logistic"}, {"a", 3.9}};
    write_file(dir.file("sys.json"), sys.dump());

    std::string out;
    CHECK(run({"--out", dir.file("res"), "check", "theorem5", "--system", dir.file("sys.json"),
               "--xi", "0.5"},
              &out) == cli::kExitSatisfied);
    CHECK(run({"--out", dir.file("res"), "check", "theorem5", "--system", dir.file("sys.json"),
               "--xi", "1.2"}) == cli::kExitUnsatisfied);

    // unbalanced layer: theorem5 hypotheses fail with exit 3
    io::json oneway;
    oneway["n"] = 2;
    oneway["weights"] = io::json::parse("[[0,0],[1,0]]");
    write_file(dir.file("oneway.json"), oneway.dump());
    io::json sys2 = sys;
    sys2["graphs"] = {"oneway.json"};
    write_file(dir.file("sys2.json"), sys2.dump());
    std::string err;
    CHECK(run({"check", "theorem5", "--system", dir.file("sys2.json"), "--xi", "0.1"}, nullptr,
              &err) == cli::kExitHypothesis);
    CHECK(err.find("column sums") != std::string::npos);
}

TEST_CASE("check eq4 prints a margin") {
    TempDir dir("eq4");
    io::json sys;
    sys["laplacians"] = io::json::parse(
        "[[[2,-1,0,-1],[-1,2,-1,0],[0,-1,2,-1],[-1,0,-1,2]]]");
    sys["D"] = io::json::parse("[[[0.3]]]");
    sys["dynamics"] = {{"kind", "logistic"}, {"a", 3.9}};
    write_file(dir.file("sys.json"), sys.dump());

    std::string out;
    const int code = run({"--out", dir.file("res"), "check", "eq4", "--system",
                          dir.file("sys.json")},
                         &out);
    CHECK(out.find("margin") != std::string::npos);
    const io::json verdict = io::load_json_file(dir.file("res") + "/verdict.json");
    CHECK(verdict["criterion"] == "eq4");
    CHECK((code == cli::kExitSatisfied || code == cli::kExitUnsatisfied));
}

TEST_CASE("simulate ct with identical initial states") {
    TempDir dir("simct");
    io::json sys;
    sys["laplacians"] =
        io::json::parse("[[[1,-1,0],[0,1,-1],[-1,0,1]]]");
    sys["D"] = io::json::parse("[[[1,0,0],[0,1,0],[0,0,1]]]");
    sys["dynamics"] = {{"kind", "lorenz"}};
    write_file(dir.file("sys.json"), sys.dump());

    std::string out;
    CHECK(run({"--out", dir.file("res"), "simulate", "ct", "--system", dir.file("sys.json"),
               "--dt", "1e-3", "--horizon", "1", "--perturbation", "0", "--record-every", "10"},
              &out) == cli::kExitSatisfied);
    CHECK(fs::exists(dir.file("res") + "/trace.csv"));
    CHECK(fs::exists(dir.file("res") + "/report.json"));
}

TEST_CASE("simulate dt uncoupled chaotic maps exit 1") {
    TempDir dir("simdt");
    io::json sys;
    sys["laplacians"] = io::json::parse("[[[0,0],[0,0]]]");
    sys["D"] = io::json::parse("[[[0]]]");
    sys["dynamics"] = {{"kind", "logistic"}, {"a", 3.9}};
    write_file(dir.file("sys.json"), sys.dump());

    CHECK(run({"--out", dir.file("res"), "simulate", "dt", "--system", dir.file("sys.json"),
               "--steps", "500"}) == cli::kExitUnsatisfied);
}

TEST_CASE("region closed form and determinism") {
    TempDir dir("region");
    write_file(dir.file("A.json"), "[[-1]]");
    write_file(dir.file("D.json"), "[[1]]");

    std::string out;
    CHECK(run({"--out", dir.file("r1"), "region", "--A", dir.file("A.json"), "--D",
               dir.file("D.json"), "--re0", "-2", "--re1", "2", "--im0", "-1", "--im1", "1",
               "--nre", "5", "--nim", "3"},
              &out) == 0);
    const std::string csv = slurp(dir.file("r1") + "/region.csv");
    CHECK(csv.find("re,im,phi") == 0);
    // phi = re - 1 on every grid point
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) {
        double re = 0.0, im = 0.0, phi = 0.0;
        CHECK(std::sscanf(line.c_str(), "%lf,%lf,%lf", &re, &im, &phi) == 3);
        CHECK(phi == doctest::Approx(re - 1.0).epsilon(1e-12));
    }

    CHECK(run({"--out", dir.file("r2"), "region", "--A", dir.file("A.json"), "--D",
               dir.file("D.json"), "--re0", "-2", "--re1", "2", "--im0", "-1", "--im1", "1",
               "--nre", "5", "--nim", "3"}) == 0);
    CHECK(slurp(dir.file("r2") + "/region.csv") == csv);
}

TEST_CASE("byte-identical reruns of xi-max") {
    TempDir dir("determinism");
    write_paper_graphs(dir);
    const std::vector<std::string> base{"xi-max", dir.file("g1.json"), dir.file("g2.json"),
                                        dir.file("g3.json"), "--eps", "5e-3"};
    std::vector<std::string> run1 = base;
    run1.insert(run1.begin(), {"--out", dir.file("a")});
    std::vector<std::string> run2 = base;
    run2.insert(run2.begin(), {"--out", dir.file("b")});
    CHECK(run(run1) == 0);
    CHECK(run(run2) == 0);
    CHECK(slurp(dir.file("a") + "/ximax.json") == slurp(dir.file("b") + "/ximax.json"));
}

TEST_CASE("no partial outputs on validation failure") {
    TempDir dir("partial");
    write_file(dir.file("bad.json"), "{\"n\": 3, \"weights\": [[0,1],[1,0]]}");
    std::string err;
    CHECK(run({"--out", dir.file("res"), "xi-max", dir.file("bad.json")}, nullptr, &err) ==
          cli::kExitInputError);
    CHECK_FALSE(fs::exists(dir.file("res") + "/ximax.json"));
}

TEST_CASE("unknown flags are input errors") {
    std::string err;
    CHECK(run({"xi-max", "--no-such-flag"}, nullptr, &err) == cli::kExitInputError);
    CHECK_FALSE(err.empty());
}
