#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "nehari/run.hpp"

using namespace nehari;
namespace fs = std::filesystem;

namespace {

// small reference-flavoured problem so the CLI tests stay fast
const char* kConfig = R"(
seed = 42

[problem]
dim = 1
domain = 0 1
nodes = 32
p = 2
alpha = 0.5
theta = 1
kernel = fractional
q = 0.5
r = 3
lambda = auto
lambda_fraction = 0.5
h = "1"
b = "1"

[solver]
multistart = 4

[output]
formats = csv json
)";

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("nehari_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

RunConfig base_config() { return RunConfig::parse_text(kConfig); }

} // namespace

TEST_CASE("solve writes artifacts and exits 0 on both branches") {
    TempDir tmp;
    RunConfig cfg = base_config();
    cfg.out_dir = (tmp.path / "run").string();
    std::ostringstream log;
    const int code = cmd_solve(cfg, {}, log);
    CHECK(code == 0);

    REQUIRE(fs::exists(tmp.path / "run" / "u_plus.csv"));
    REQUIRE(fs::exists(tmp.path / "run" / "u_minus.csv"));
    REQUIRE(fs::exists(tmp.path / "run" / "result.json"));

    const auto j = nlohmann::json::parse(slurp(tmp.path / "run" / "result.json"));
    CHECK(j["status"] == "both_converged");
    CHECK(j["plus"]["energy"].get<double>() < 0.0);
    CHECK(j["minus"]["energy"].get<double>() > 0.0);
    CHECK(j["plus"]["residual"].get<double>() <= 1e-8);
    CHECK(j["distinctness"].get<double>() > 1e-3);
    CHECK(j["lambda0_estimate"]["ok"].get<bool>());
    // the echo is sufficient to re-run: raw text plus the resolved lambda
    CHECK(j["config"]["raw"].get<std::string>() == cfg.raw_text);
    CHECK(j["config"]["lambda"].get<double>() > 0.0);

    // CSV has a header plus one row per node
    std::istringstream csv(slurp(tmp.path / "run" / "u_plus.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(csv, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 33);  // header + 32 nodes
}

TEST_CASE("solve is byte-deterministic for a fixed config and seed") {
    TempDir tmp;
    RunConfig cfg = base_config();
    std::ostringstream log;

    cfg.out_dir = (tmp.path / "a").string();
    REQUIRE(cmd_solve(cfg, {}, log) == 0);
    cfg.out_dir = (tmp.path / "b").string();
    REQUIRE(cmd_solve(cfg, {}, log) == 0);

    CHECK(slurp(tmp.path / "a" / "result.json") == slurp(tmp.path / "b" / "result.json"));
    CHECK(slurp(tmp.path / "a" / "u_plus.csv") == slurp(tmp.path / "b" / "u_plus.csv"));
    CHECK(slurp(tmp.path / "a" / "u_minus.csv") == slurp(tmp.path / "b" / "u_minus.csv"));

    // a different seed changes the multistart draw but stays valid
    CommandOptions opts;
    opts.seed_override = 7;
    cfg.out_dir = (tmp.path / "c").string();
    REQUIRE(cmd_solve(cfg, opts, log) == 0);
}

TEST_CASE("invalid config exits 1 naming the inequality") {
    TempDir tmp;
    RunConfig cfg = base_config();
    cfg.q = 1.0;  // q = p-1
    cfg.out_dir = (tmp.path / "x").string();
    std::ostringstream log;
    CHECK(cmd_solve(cfg, {}, log) == 1);
    CHECK(log.str().find("q < p-1") != std::string::npos);
}

TEST_CASE("no-Nehari configuration exits 2 with explicit status") {
    TempDir tmp;
    RunConfig cfg = base_config();
    cfg.h_expr = "-1";
    cfg.b_expr = "-1";
    cfg.lambda_auto = false;
    cfg.lambda = 0.5;
    cfg.solver.multistart = 2;
    cfg.out_dir = (tmp.path / "n").string();
    std::ostringstream log;
    CHECK(cmd_solve(cfg, {}, log) == 2);
    const auto j = nlohmann::json::parse(slurp(tmp.path / "n" / "result.json"));
    CHECK(j["status"] == "no_nehari_points");
}

TEST_CASE("fibering report on a random field and on a converged solution") {
    TempDir tmp;
    RunConfig cfg = base_config();
    cfg.out_dir = (tmp.path / "solve").string();
    std::ostringstream solve_log;
    REQUIRE(cmd_solve(cfg, {}, solve_log) == 0);

    std::ostringstream out;
    REQUIRE(cmd_fibering(cfg, {}, "random:42", (tmp.path / "phi.csv").string(), out) == 0);
    CHECK(out.str().find("H+ cap B+") != std::string::npos);
    CHECK(out.str().find("roots: 2") != std::string::npos);
    CHECK(fs::exists(tmp.path / "phi.csv"));

    // a converged solution projects to t = 1
    std::ostringstream out2;
    const std::string src = "file:" + (tmp.path / "solve" / "u_plus.csv").string();
    REQUIRE(cmd_fibering(cfg, {}, src, "", out2) == 0);
    std::string text = out2.str();
    const auto json_pos = text.rfind("\n{");
    REQUIRE(json_pos != std::string::npos);
    const auto j = nlohmann::json::parse(text.substr(json_pos + 1));
    bool found_unit_root = false;
    for (const auto& root : j["roots"])
        if (root["kind"] == "Min" && std::fabs(root["t"].get<double>() - 1.0) <= 1e-8)
            found_unit_root = true;
    CHECK(found_unit_root);
}

TEST_CASE("fibering rejects the zero field") {
    TempDir tmp;
    RunConfig cfg = base_config();
    // all-zero field file
    std::ofstream csv(tmp.path / "zeros.csv");
    csv << "x,value\n";
    const Mesh mesh = build_mesh(0.0, 1.0, 32);
    for (std::size_t i = 0; i < mesh.node_count(); ++i)
        csv << mesh.node_x(i) << ",0\n";
    csv.close();
    std::ostringstream out;
    CHECK(cmd_fibering(cfg, {}, "file:" + (tmp.path / "zeros.csv").string(), "", out) == 1);
    CHECK(out.str().find("zero field") != std::string::npos);
}

TEST_CASE("lambda0 subcommand is deterministic and reports constants") {
    RunConfig cfg = base_config();
    std::ostringstream a, b;
    REQUIRE(cmd_lambda0(cfg, {}, a) == 0);
    REQUIRE(cmd_lambda0(cfg, {}, b) == 0);
    CHECK(a.str() == b.str());
    CHECK(a.str().find("lambda0") != std::string::npos);
    CHECK(a.str().find("\"S_r1\"") != std::string::npos);

    // degenerate weights: estimation failure is exit 2
    cfg.b_expr = "-1";
    std::ostringstream c;
    CHECK(cmd_lambda0(cfg, {}, c) == 2);
}

TEST_CASE("validate-kernel subcommand") {
    RunConfig cfg = base_config();
    std::ostringstream ok;
    CHECK(cmd_validate_kernel(cfg, {}, ok) == 0);
    CHECK(ok.str().find("\"admissible\":true") != std::string::npos);

    std::ostringstream again;
    CHECK(cmd_validate_kernel(cfg, {}, again) == 0);
    CHECK(again.str() == ok.str());  // same seed, bit-identical report

    // theta above the fractional kernel's own constant: condition (ii) fails
    cfg.theta = 2.0;
    std::ostringstream bad;
    CHECK(cmd_validate_kernel(cfg, {}, bad) == 2);
    CHECK(bad.str().find("lower_bound_ok = no") != std::string::npos);
}

TEST_CASE("format_double round-trips") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 12345.6789, -0.0, 2.718281828459045}) {
        const std::string s = format_double(x);
        CHECK(std::stod(s) == x);
        CHECK(s.size() <= 24);
    }
}
