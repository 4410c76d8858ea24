//
// Copyright 2026 The dptopk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// End-to-end tests of the installed binary: each case shells out to the
// real executable and checks exit codes, output, and written files.

#include <doctest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr merged
};

CliResult run_cli(const std::string& args) {
  const std::string command = std::string(DPTOPK_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buffer[4096];
  size_t n = 0;
  while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
    result.output.append(buffer, n);
  }
  const int status = pclose(pipe);
  REQUIRE(WIFEXITED(status));
  result.exit_code = WEXITSTATUS(status);
  return result;
}

std::string data_path(const std::string& name) {
  return std::string(DPTOPK_TEST_DATA_DIR) + "/" + name;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dptopk_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

std::map<std::string, std::string> dir_contents(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    files[entry.path().filename().string()] = read_file(entry.path());
  }
  return files;
}

std::string fixture_report_args(const fs::path& out_dir) {
  return "report --hires " + data_path("hires.csv") + " --skills " +
         data_path("skills.csv") + " --geography " + data_path("geography.csv") +
         " --out " + out_dir.string() +
         " --seed 42 --date 2026-06 --date 2025-01 --country us --region ca"
         " --industry tech --granularity all"
         " --metric employers --metric jobs --metric skills";
}

}  // namespace

TEST_CASE("help exits zero and usage errors exit three") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("report --help").exit_code == 0);
  CHECK(run_cli("--bogus-flag").exit_code == 3);
  CHECK(run_cli("").exit_code == 3);          // a subcommand is required
  CHECK(run_cli("frobnicate").exit_code == 3);
}

TEST_CASE("report rejects incomplete or inconsistent configuration") {
  const fs::path out = fresh_dir("cfgerr");
  const std::string base = "report --hires " + data_path("hires.csv");

  const CliResult no_out = run_cli(base + " --date 2026-06 --country us");
  CHECK(no_out.exit_code == 3);
  CHECK(no_out.output.find("config error:") != std::string::npos);

  CHECK(run_cli(base + " --out " + out.string() + " --country us").exit_code == 3);
  CHECK(run_cli(base + " --out " + out.string() + " --date 2026-06").exit_code == 3);
  CHECK(run_cli(base + " --out " + out.string() +
                " --date 2026-13 --country us")
            .exit_code == 3);
  // Region slices without a geography table to validate against.
  CHECK(run_cli(base + " --out " + out.string() +
                " --date 2026-06 --country us --region ca")
            .exit_code == 3);
  // Skills without a jobs report in the same run.
  CHECK(run_cli(base + " --skills " + data_path("skills.csv") + " --out " +
                out.string() + " --date 2026-06 --country us --metric skills")
            .exit_code == 3);
  // Unknown granularity value.
  CHECK(run_cli(base + " --out " + out.string() +
                " --date 2026-06 --country us --granularity some")
            .exit_code == 3);
}

TEST_CASE("missing and malformed inputs exit two") {
  const fs::path out = fresh_dir("inputerr");
  const CliResult missing =
      run_cli("report --hires /nonexistent/hires.csv --out " + out.string() +
              " --date 2026-06 --country us");
  CHECK(missing.exit_code == 2);
  CHECK(missing.output.find("input error:") != std::string::npos);

  const CliResult strict =
      run_cli("ingest --hires " + data_path("hires_malformed.csv"));
  CHECK(strict.exit_code == 2);
  CHECK(strict.output.find("hires_malformed.csv:3") != std::string::npos);

  CHECK(run_cli("budget --ledger /nonexistent/ledger.jsonl").exit_code == 2);
}

TEST_CASE("ingest reports parse and contribution diagnostics as JSON") {
  const CliResult healthy = run_cli("ingest --hires " + data_path("hires.csv") +
                                    " --skills " + data_path("skills.csv"));
  REQUIRE(healthy.exit_code == 0);
  const json h = json::parse(healthy.output);
  CHECK(h["hires"]["rows"] == 2458);
  CHECK(h["hires"]["skipped"] == 0);
  CHECK(h["hires"]["events"] == 2458);
  CHECK(h["hires"]["members_with_multiple_hires"] == 10);
  CHECK(h["hires"]["max_hires_per_member"] == 2);
  CHECK(h["hires"]["share_single_hire"].get<double>() > 0.99);
  CHECK(h["skills"]["rows"] == 2714);
  CHECK(h["skills"]["skipped"] == 0);

  const CliResult lenient = run_cli(
      "ingest --lenient --hires " + data_path("hires_malformed.csv"));
  REQUIRE(lenient.exit_code == 0);
  const json m = json::parse(lenient.output);
  CHECK(m["hires"]["rows"] == 8);
  CHECK(m["hires"]["skipped"] == 5);
  CHECK(m["hires"]["events"] == 3);

  CHECK(run_cli("ingest").exit_code == 3);
}

TEST_CASE("a full report run is reproducible byte for byte") {
  const fs::path dir_a = fresh_dir("run_a");
  const fs::path dir_b = fresh_dir("run_b");

  const CliResult first = run_cli(fixture_report_args(dir_a));
  REQUIRE_MESSAGE(first.exit_code == 0, first.output);
  // 2 dates x (4 slices x employers/jobs + 2 industry-free slices x skills)
  // = 20 reports, each written as JSON + CSV.
  CHECK(first.output.find("wrote 40 report files") != std::string::npos);
  // A fixed --seed must not trigger the generated-seed notice.
  CHECK(first.output.find("generated root seed") == std::string::npos);

  const CliResult second = run_cli(fixture_report_args(dir_b));
  REQUIRE_MESSAGE(second.exit_code == 0, second.output);

  std::map<std::string, std::string> a = dir_contents(dir_a);
  std::map<std::string, std::string> b = dir_contents(dir_b);
  CHECK(a.size() == 42);  // 40 reports + manifest.json + ledger.jsonl
  REQUIRE(a.count("manifest.json") == 1);
  REQUIRE(a.count("ledger.jsonl") == 1);
  // created_at makes the manifest the one file allowed to differ.
  a.erase("manifest.json");
  b.erase("manifest.json");
  REQUIRE(a.size() == b.size());
  for (const auto& [name, content] : a) {
    REQUIRE_MESSAGE(b.count(name) == 1, name);
    CHECK_MESSAGE(content == b.at(name), name);
  }

  SUBCASE("the budget command recovers the per-date per-metric totals") {
    const CliResult filtered =
        run_cli("budget --ledger " + (dir_a / "ledger.jsonl").string() +
                " --date 2026-06 --metric employers");
    REQUIRE(filtered.exit_code == 0);
    const json fj = json::parse(filtered.output);
    REQUIRE(fj.size() == 1);
    CHECK(fj[0]["date"] == "2026-06");
    CHECK(fj[0]["metric"] == "employers");
    CHECK(fj[0]["epsilon"].get<double>() == 4.8);
    CHECK(fj[0]["delta"].get<double>() == 4e-10);

    const CliResult full =
        run_cli("budget --ledger " + (dir_a / "ledger.jsonl").string());
    REQUIRE(full.exit_code == 0);
    const json all = json::parse(full.output);
    // Employers and jobs debit on both dates; skills reports only debit
    // when the jobs list they condition on released anything, which the
    // empty 2025-01 window did not.
    REQUIRE(all.size() == 5);
    bool saw_skills = false;
    for (const json& entry : all) {
      if (entry["metric"] == "skills") {
        saw_skills = true;
        CHECK(entry["date"] == "2026-06");
        CHECK(entry["epsilon"].get<double>() == doctest::Approx(0.2));
        CHECK(entry["delta"].get<double>() == doctest::Approx(2e-10));
      }
    }
    CHECK(saw_skills);
  }
}

TEST_CASE("a config file drives the same run as the equivalent flags") {
  const fs::path cfg_out = fresh_dir("cfg_run");
  const fs::path flag_out = fresh_dir("flag_run");
  const fs::path cfg_file = fresh_dir("cfg_files") / "run.conf";
  write_file(cfg_file,
             "# employers report over the test fixtures\n"
             "seed = 42\n"
             "hires = " + data_path("hires.csv") + "\n"
             "out = " + cfg_out.string() + "\n"
             "dates = 2026-06\n"
             "country = us\n"
             "metrics = employers\n");

  REQUIRE(run_cli("report --config " + cfg_file.string()).exit_code == 0);
  REQUIRE(run_cli("report --hires " + data_path("hires.csv") + " --out " +
                  flag_out.string() +
                  " --seed 42 --date 2026-06 --country us --metric employers")
              .exit_code == 0);

  for (const std::string name :
       {"2026-06_us_employers.json", "2026-06_us_employers.csv",
        "ledger.jsonl"}) {
    CHECK_MESSAGE(read_file(cfg_out / name) == read_file(flag_out / name), name);
  }

  SUBCASE("flags override config file values") {
    const fs::path override_out = fresh_dir("cfg_override");
    REQUIRE(run_cli("report --config " + cfg_file.string() + " --out " +
                    override_out.string())
                .exit_code == 0);
    CHECK(read_file(override_out / "2026-06_us_employers.json") ==
          read_file(cfg_out / "2026-06_us_employers.json"));
  }

  SUBCASE("unknown keys and bad syntax are config errors") {
    const fs::path bad_key = fresh_dir("cfg_bad") / "bad.conf";
    write_file(bad_key, "seed = 42\nfrobnicate = 7\n");
    const CliResult unknown = run_cli("report --config " + bad_key.string());
    CHECK(unknown.exit_code == 3);
    CHECK(unknown.output.find("unknown config key") != std::string::npos);
    CHECK(unknown.output.find("bad.conf:2") != std::string::npos);

    write_file(bad_key, "just some words\n");
    CHECK(run_cli("report --config " + bad_key.string()).exit_code == 3);
  }
}

TEST_CASE("the audit subcommand emits verdicts and gates on them") {
  const CliResult ok =
      run_cli("audit --mechanism known_gumbel_topk --trials 10000");
  REQUIRE_MESSAGE(ok.exit_code == 0, ok.output);
  const json verdicts = json::parse(ok.output);
  REQUIRE(verdicts.is_array());
  REQUIRE_FALSE(verdicts.empty());
  for (const json& v : verdicts) {
    CHECK(v.contains("event"));
    CHECK(v.contains("epsilon_hat"));
    CHECK(v["declared_epsilon"].get<double>() == 2.0);
    if (v["conclusive"].get<bool>()) CHECK(v["passes"].get<bool>());
  }

  // The declared parameters configure the mechanism under audit, so the
  // subcommand checks self-consistency at any requested strength.
  const CliResult strong =
      run_cli("audit --mechanism unknown_gumbel_topk --trials 10000 "
              "--declared-epsilon 0.2 --declared-delta 1e-9");
  REQUIRE_MESSAGE(strong.exit_code == 0, strong.output);
  const json strong_verdicts = json::parse(strong.output);
  for (const json& v : strong_verdicts) {
    CHECK(v["declared_epsilon"].get<double>() == 0.2);
  }

  CHECK(run_cli("audit --mechanism bogus --trials 10000").exit_code == 3);
  CHECK(run_cli("audit --mechanism known_laplace --trials 500").exit_code == 3);
  CHECK(run_cli("audit --trials 10000").exit_code == 3);  // --mechanism required
}

TEST_CASE("selftest passes healthy and fails under an injected fault") {
  const std::string fast = " --samples 100000 --trials 10000";
  const CliResult healthy = run_cli("selftest" + fast);
  REQUIRE_MESSAGE(healthy.exit_code == 0, healthy.output);
  CHECK(healthy.output.find("[PASS] release_boundary_audit") != std::string::npos);
  CHECK(healthy.output.find("[FAIL]") == std::string::npos);

  const CliResult faulty = run_cli("selftest --inject-noise-fault 0.5" + fast);
  CHECK(faulty.exit_code == 1);
  CHECK(faulty.output.find("[FAIL] release_boundary_audit") != std::string::npos);
}
