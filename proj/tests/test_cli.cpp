#include "doctest.h"

#include "macelast/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace macelast;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("macelast_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

int invoke(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr)
{
    args.insert(args.begin(), "macelast");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

const char* kSmall = R"({
  // two quick studies
  "output_dir": "unused",
  "threads": 2,
  "studies": [
    {"name": "uni", "case": "example1", "lambda": 10, "base_cells": 4, "levels": 2},
    {"name": "pert", "case": "example1", "lambda": 10, "base_cells": 4, "levels": 2,
     "mesh": {"mode": "perturbed", "seed": 42, "amplitude": 0.3}}
  ]
})";

}  // namespace

TEST_CASE("config parsing")
{
    const auto cfg = cli::parse_config(kSmall);
    CHECK(cfg.threads == 2);
    REQUIRE(cfg.studies.size() == 2);
    CHECK(cfg.studies[0].mu == 1.0);
    CHECK(cfg.studies[0].mesh.kind == MeshMode::Kind::kUniform);
    CHECK(cfg.studies[0].solver.tol == 1e-10);
    CHECK(cfg.studies[0].solver.backend == SolverBackend::kAuto);
    CHECK(cfg.studies[1].mesh.kind == MeshMode::Kind::kPerturbed);
    CHECK(cfg.studies[1].mesh.seed == 42);

    const auto with_compare = cli::parse_config(R"({"studies": [{"name": "a", "case": "example3", "lambda": 1e7,
        "compare": ["table6_17", {"reference": "x.csv", "error_tol": 0.05, "allow_missing": true}]}]})");
    REQUIRE(with_compare.studies[0].compare.size() == 2);
    CHECK(with_compare.studies[0].compare[0].options.error_tol == 0.02);
    CHECK(with_compare.studies[0].compare[1].options.error_tol == 0.05);
    CHECK(with_compare.studies[0].compare[1].options.allow_missing);
    CHECK(with_compare.output_dir == "results");

    const char* bad[] = {
        "not json",
        "[]",
        R"({"studies": []})",
        R"({"studies": [{"name": "a", "case": "example1"}]})",
        R"({"studies": [{"name": "a", "case": "example9", "lambda": 1}]})",
        R"({"studies": [{"name": "a", "case": "example1", "lambda": 1, "colour": 1}]})",
        R"({"studies": [{"name": "a", "case": "example1", "lambda": -1}]})",
        R"({"studies": [{"name": "a", "case": "example1", "lambda": 1, "dims": 3}]})",
        R"({"studies": [{"name": "a", "case": "example1", "lambda": 1, "levels": 0}]})",
        R"({"studies": [{"name": "a", "case": "example1", "lambda": 1, "mesh": {"mode": "graded"}}]})",
        R"({"studies": [{"name": "a", "case": "example1", "lambda": 1, "mesh": {"mode": "perturbed", "amplitude": 0.6}}]})",
        R"({"studies": [{"name": "a", "case": "example1", "lambda": 1, "solver": {"backend": "lu"}}]})",
        R"({"studies": [{"name": "a", "case": "example1", "lambda": "ten"}]})",
        R"({"studies": [{"name": "../a", "case": "example1", "lambda": 1}]})",
        R"({"studies": [{"name": "a", "case": "example1", "lambda": 1}, {"name": "a", "case": "example1", "lambda": 2}]})",
        R"({"threads": 0, "studies": [{"name": "a", "case": "example1", "lambda": 1}]})",
    };
    for (const char* text : bad) CHECK_THROWS_AS_MESSAGE(cli::parse_config(text), cli::ConfigError, text);
    CHECK_THROWS_AS(cli::load_config("/nonexistent/config.json"), cli::ConfigError);
}

TEST_CASE("thread override")
{
    ::unsetenv("MACELAST_THREADS");
    CHECK(cli::thread_override(3) == 3);
    ::setenv("MACELAST_THREADS", "5", 1);
    CHECK(cli::thread_override(3) == 5);
    ::setenv("MACELAST_THREADS", "zero", 1);
    CHECK_THROWS_AS(cli::thread_override(3), cli::ConfigError);
    ::unsetenv("MACELAST_THREADS");
}

TEST_CASE("run writes deterministic tables")
{
    const auto dir = scratch_dir("run");
    spit(dir / "cfg.json", kSmall);
    std::string out;
    CHECK(invoke({"run", (dir / "cfg.json").string(), "-o", (dir / "a").string()}, &out) == cli::kOk);
    CHECK(invoke({"run", (dir / "cfg.json").string(), "-o", (dir / "b").string()}) == cli::kOk);
    for (const char* f : {"uni.csv", "uni_interpolant.csv", "uni.md", "pert.csv", "pert_interpolant.csv", "pert.md"}) {
        REQUIRE(fs::exists(dir / "a" / f));
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }
    CHECK(slurp(dir / "a" / "uni.csv") != slurp(dir / "a" / "pert.csv"));
    CHECK(slurp(dir / "a" / "uni.md").find("| 8x8 |") != std::string::npos);
    CHECK(out.find("uni") != std::string::npos);
}

TEST_CASE("single level table has no rates")
{
    const auto dir = scratch_dir("single");
    cli::RunConfig cfg = cli::parse_config(R"({"studies": [{"name": "one", "case": "example2", "lambda": 10}]})");
    cfg.output_dir = (dir / "out").string();
    std::ostringstream out, err;
    CHECK(cli::run(cfg, out, err) == cli::kOk);
    const auto t = ResultTable::load((dir / "out" / "one.csv").string());
    CHECK(t.rows().size() == 5);
    for (const auto& row : t.rows()) CHECK(row[t.column("rate")].empty());
}

TEST_CASE("exit codes")
{
    const auto dir = scratch_dir("codes");
    CHECK(invoke({}) == cli::kUsage);
    CHECK(invoke({"frobnicate"}) == cli::kUsage);
    CHECK(invoke({"run", (dir / "missing.json").string()}) == cli::kUsage);
    spit(dir / "bad.json", "{\"studies\": 3}");
    CHECK(invoke({"run", (dir / "bad.json").string()}) == cli::kUsage);

    spit(dir / "fail.json", R"({"studies": [{"name": "f", "case": "example1", "lambda": 1e7, "base_cells": 8,
        "solver": {"backend": "iterative", "max_iterations": 2}}]})");
    std::string err;
    CHECK(invoke({"run", (dir / "fail.json").string(), "-o", (dir / "f").string()}, nullptr, &err) ==
          cli::kSolverFailure);

    // Example 1 at lambda = 10 on 8x8 against the published first row
    spit(dir / "cmp.json", R"({"studies": [{"name": "c", "case": "example1", "lambda": 10, "base_cells": 8,
        "compare": [{"reference": "table6_3", "allow_missing": true}]}]})");
    std::string out;
    CHECK(invoke({"run", (dir / "cmp.json").string(), "-o", (dir / "c").string()}, &out) == cli::kCompareFailure);
    CHECK(fs::exists(dir / "c" / "c_compare_table6_3.csv"));
    CHECK(out.find("nx=8,ny=8 Wx error") != std::string::npos);

    // a produced table used as its own reference passes through the config path
    fs::copy_file(dir / "c" / "c.csv", dir / "own.csv");
    spit(dir / "self.json", R"({"studies": [{"name": "s", "case": "example1", "lambda": 10, "base_cells": 8,
        "compare": [")" + (dir / "own.csv").string() + R"("]}]})");
    CHECK(invoke({"run", (dir / "self.json").string(), "-o", (dir / "s").string()}) == cli::kOk);
    CHECK(fs::exists(dir / "s" / "s_compare_own.csv"));
}

TEST_CASE("compare subcommand")
{
    const auto dir = scratch_dir("compare");
    const auto ref = reference_table("table6_3");
    {
        std::ofstream os(dir / "same.csv");
        ref.write(os);
    }
    auto changed = ref;
    changed.rows()[2][5] = "1.0E-04";
    {
        std::ofstream os(dir / "changed.csv");
        changed.write(os);
    }
    std::string out;
    CHECK(invoke({"compare", (dir / "same.csv").string(), "table6_3"}, &out) == cli::kOk);
    CHECK(invoke({"compare", (dir / "changed.csv").string(), "table6_3"}, &out) == cli::kCompareFailure);
    CHECK(out.find("nx=16,ny=16 Wx error") != std::string::npos);
    CHECK(invoke({"compare", (dir / "changed.csv").string(), "table6_3", "--error-tol", "2"}) == cli::kOk);
    CHECK(invoke({"compare", (dir / "same.csv").string(), (dir / "same.csv").string()}) == cli::kOk);
    CHECK(invoke({"compare", (dir / "same.csv").string(), "table6_17"}) == cli::kUsage);
    CHECK(invoke({"compare", (dir / "nope.csv").string(), "table6_3"}) == cli::kUsage);

    CHECK(invoke({"references"}, &out) == cli::kOk);
    CHECK(out.find("table6_22") != std::string::npos);
}
