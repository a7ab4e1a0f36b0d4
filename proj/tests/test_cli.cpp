// End-to-end tests of the command line front door: exit codes, artifact
// schemas, determinism of emitted files.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "json.hpp"
#include "schema_check.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli_path() {
    const char* p = std::getenv("KDVSPEC_CLI");
    REQUIRE_MESSAGE(p != nullptr, "KDVSPEC_CLI must point at the CLI binary");
    return p;
}

std::string source_dir() {
    const char* p = std::getenv("KDVSPEC_SOURCE_DIR");
    REQUIRE_MESSAGE(p != nullptr, "KDVSPEC_SOURCE_DIR must point at the repo root");
    return p;
}

int run_cli(const std::string& args) {
    std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE_MESSAGE(is.good(), "missing artifact: ", p.string());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void write_file(const fs::path& p, const std::string& data) {
    fs::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary);
    os << data;
}

json load_schema(const std::string& name) {
    return json::parse(slurp(fs::path(source_dir()) / "schemas" / name));
}

fs::path fresh_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / "kdvspec_cli_tests" / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

void check_schema(const fs::path& artifact, const std::string& schema_name) {
    std::string err;
    bool ok = kdvspec_test::validate_schema(json::parse(slurp(artifact)),
                                            load_schema(schema_name), &err);
    INFO("schema violation in ", artifact.string(), ": ", err);
    CHECK(ok);
}

}  // namespace

TEST_CASE("hierarchy mode emits the expected text") {
    auto dir = fresh_dir("hier");
    REQUIRE(run_cli("--out " + dir.string() + " --n 2 --latex hierarchy") == 0);
    std::string txt = slurp(dir / "hierarchy.txt");
    CHECK(txt.find("f_1 = 1/2*V + c1") != std::string::npos);
    CHECK(txt.find("s-KdV_0 = -V_x") != std::string::npos);
    CHECK(txt.find("s-KdV_2 = ") != std::string::npos);
    CHECK(txt.find("H_1 = z - V") != std::string::npos);
    CHECK(slurp(dir / "hierarchy.tex").find("\\begin{align*}") != std::string::npos);
    check_schema(dir / "manifest.json", "manifest.schema.json");
}

TEST_CASE("lame mode: full pipeline artifacts with valid schemas") {
    auto dir = fresh_dir("lame");
    fs::path cfg = dir / "cfg.json";
    write_file(cfg, R"({"mode": "lame", "lame": {"omega1": [1, 0], "omega3": [0, 1]}})");
    REQUIRE(run_cli("--config " + cfg.string() + " --out " + dir.string() + " lame") == 0);
    check_schema(dir / "curve.json", "curve.schema.json");
    check_schema(dir / "arcs.json", "arcs.schema.json");
    check_schema(dir / "manifest.json", "manifest.schema.json");
    auto arcs = json::parse(slurp(dir / "arcs.json"));
    CHECK(arcs["arcs"].size() == 2);
    int semi = 0;
    for (const auto& a : arcs["arcs"])
        if (a["arc_kind"] == "semi-infinite") ++semi;
    CHECK(semi == 1);
    auto curve = json::parse(slurp(dir / "curve.json"));
    double lam = curve["periods"]["lambda"][0][0].get<double>();
    CHECK(std::abs(lam - 0.7853981634) < 1e-8);
    CHECK(curve["periods"]["basis_verified"].get<bool>());
    std::string csv = slurp(dir / "arcs.csv");
    CHECK(csv.rfind("arc_id,re,im,residual\n", 0) == 0);
    CHECK(slurp(dir / "spectrum.svg").find("<svg") != std::string::npos);
}

TEST_CASE("determinism: identical JSON/CSV bytes, SVG equal after hashing rule") {
    auto d1 = fresh_dir("det1");
    auto d2 = fresh_dir("det2");
    fs::path cfg = d1 / "cfg.json";
    std::string cfg_text =
        R"({"lame": {"omega1": [1, 0], "omega3": [0.3, 0.8]}, "output": {"formats": ["json", "csv", "svg"]}})";
    write_file(cfg, cfg_text);
    REQUIRE(run_cli("--config " + cfg.string() + " --out " + d1.string() + " lame") == 0);
    REQUIRE(run_cli("--config " + cfg.string() + " --out " + d2.string() + " lame") == 0);
    for (std::string name : {"curve.json", "arcs.json", "arcs.csv", "scenario.json"})
        CHECK(slurp(d1 / name) == slurp(d2 / name));
    // SVG may differ only in the timestamp comment; the manifest hash strips it.
    auto m1 = json::parse(slurp(d1 / "manifest.json"));
    auto m2 = json::parse(slurp(d2 / "manifest.json"));
    REQUIRE(m1["artifacts"].size() == m2["artifacts"].size());
    for (size_t i = 0; i < m1["artifacts"].size(); ++i) {
        CHECK(m1["artifacts"][i]["name"] == m2["artifacts"][i]["name"]);
        CHECK(m1["artifacts"][i]["hash"] == m2["artifacts"][i]["hash"]);
    }
}

TEST_CASE("config errors exit with code 2") {
    auto dir = fresh_dir("err2");
    fs::path cfg = dir / "cfg.json";
    write_file(cfg, R"({"curve": {"branch_points": []}})");
    CHECK(run_cli("--config " + cfg.string() + " --out " + dir.string() + " curve") == 2);
    // Mode mismatch between config and subcommand.
    write_file(cfg, R"({"mode": "curve", "lame": {"omega1": [1, 0]}})");
    CHECK(run_cli("--config " + cfg.string() + " --out " + dir.string() + " lame") == 2);
    CHECK(run_cli("--out " + dir.string() + " --grid bogus floquet") == 2);
}

TEST_CASE("computation failures exit with code 1 and write a structured error") {
    auto dir = fresh_dir("err1");
    fs::path cfg = dir / "cfg.json";
    write_file(cfg, R"({"curve": {"branch_points": [[0, 0], [0, 0], [1, 0]]}})");
    CHECK(run_cli("--config " + cfg.string() + " --out " + dir.string() + " curve") == 1);
    auto err = json::parse(slurp(dir / "error.json"));
    CHECK(err.contains("error"));
}

TEST_CASE("spectrum mode from explicit branch points") {
    auto dir = fresh_dir("spec");
    fs::path cfg = dir / "cfg.json";
    write_file(cfg, R"({"curve": {"branch_points": [[-1, 0], [0, 0], [1, 0]]}})");
    REQUIRE(run_cli("--config " + cfg.string() + " --out " + dir.string() + " spectrum") == 0);
    check_schema(dir / "arcs.json", "arcs.schema.json");
    auto arcs = json::parse(slurp(dir / "arcs.json"));
    CHECK(arcs["arcs"].size() == 2);
}

TEST_CASE("floquet mode: free potential scan") {
    auto dir = fresh_dir("floq");
    fs::path cfg = dir / "cfg.json";
    write_file(cfg,
               R"({"floquet": {"period": 3.141592653589793},
                   "window": {"lo": [-1, -1], "hi": [6, 1]}, "grid": [29, 11]})");
    REQUIRE(run_cli("--config " + cfg.string() + " --out " + dir.string() + " floquet") == 0);
    check_schema(dir / "floquet_scan.json", "scan.schema.json");
    auto scan = json::parse(slurp(dir / "floquet_scan.json"));
    CHECK(!scan["arcs"].empty());
}

TEST_CASE("verify mode: default passes; tightened quadrature tolerance reports failures") {
    auto dir = fresh_dir("verify");
    REQUIRE(run_cli("--out " + dir.string() + " verify") == 0);
    check_schema(dir / "verify.json", "verify.schema.json");
    auto rep = json::parse(slurp(dir / "verify.json"));
    CHECK(rep["failures"].get<int>() == 0);

    auto dir2 = fresh_dir("verify_tight");
    REQUIRE(run_cli("--out " + dir2.string() + " --tol-quad 1e-14 verify") == 0);
    auto rep2 = json::parse(slurp(dir2 / "verify.json"));
    CHECK(rep2["failures"].get<int>() > 0);
    bool quad_failed = false;
    for (const auto& c : rep2["checks"])
        if (c["name"] == "curve.quadrature_converged" && !c["pass"].get<bool>())
            quad_failed = true;
    CHECK(quad_failed);
}

TEST_CASE("output directory override via environment") {
    auto dir = fresh_dir("envdir");
    std::string cmd = "KDVSPEC_OUT_DIR=" + dir.string() + " " + cli_path() +
                      " --out /nonexistent-ignored --n 1 hierarchy >/dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(dir / "hierarchy.txt"));
}
