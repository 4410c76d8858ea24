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

// dptopk: differentially private top-k reports over hiring event data.
// Exit codes: 0 success, 1 internal error or failed verification,
// 2 input data error, 3 configuration error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dptopk/accountant.hpp"
#include "dptopk/audit.hpp"
#include "dptopk/ingest.hpp"
#include "dptopk/json_io.hpp"
#include "dptopk/reports.hpp"
#include "dptopk/run.hpp"
#include "dptopk/selftest.hpp"
#include "dptopk/types.hpp"

namespace {

using dptopk::ConfigError;
using dptopk::InputError;
using dptopk::ojson;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;

// Options assembled from the config file and command-line flags; flags
// win. Absent optionals fall back to built-in defaults at manifest time.
struct ReportOptions {
  std::optional<uint64_t> seed;
  std::optional<std::string> hires;
  std::optional<std::string> skills;
  std::optional<std::string> geography;
  std::optional<std::string> out;
  std::vector<std::string> dates;
  std::optional<std::string> country;
  std::optional<std::string> region;
  std::optional<std::string> industry;
  std::vector<std::string> metrics;
  std::optional<std::string> granularity;
  std::optional<int> months_back;
  std::optional<int> skill_years_back;
  std::optional<double> tfidf_threshold;
  std::optional<bool> strict;
  std::optional<bool> enforce_single_hire;
};

std::string trim(const std::string& text) {
  const size_t begin = text.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const size_t end = text.find_last_not_of(" \t");
  return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t comma = text.find(',', start);
    const std::string item = trim(
        comma == std::string::npos ? text.substr(start)
                                   : text.substr(start, comma - start));
    if (!item.empty()) items.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return items;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" +
                    value + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  try {
    if constexpr (std::is_same_v<T, uint64_t>) {
      return std::stoull(value);
    } else if constexpr (std::is_same_v<T, int>) {
      return std::stoi(value);
    } else {
      return std::stod(value);
    }
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse number '" +
                      value + "'");
  }
}

// Config file format: one "key = value" per line, '#' starts a comment,
// blank lines ignored. Keys match the long flag names with underscores.
void apply_config_file(const std::string& path, ReportOptions& options) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(path + ": cannot open config file");
  }
  std::string line;
  long line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t equals = line.find('=');
    if (equals == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_number) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, equals));
    const std::string value = trim(line.substr(equals + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(path + ":" + std::to_string(line_number) +
                        ": expected 'key = value'");
    }
    if (key == "seed") {
      options.seed = parse_number<uint64_t>(key, value);
    } else if (key == "hires") {
      options.hires = value;
    } else if (key == "skills") {
      options.skills = value;
    } else if (key == "geography") {
      options.geography = value;
    } else if (key == "out") {
      options.out = value;
    } else if (key == "dates") {
      options.dates = split_list(value);
    } else if (key == "country") {
      options.country = value;
    } else if (key == "region") {
      options.region = value;
    } else if (key == "industry") {
      options.industry = value;
    } else if (key == "metrics") {
      options.metrics = split_list(value);
    } else if (key == "granularity") {
      options.granularity = value;
    } else if (key == "months_back") {
      options.months_back = parse_number<int>(key, value);
    } else if (key == "skill_years_back") {
      options.skill_years_back = parse_number<int>(key, value);
    } else if (key == "tfidf_threshold") {
      options.tfidf_threshold = parse_number<double>(key, value);
    } else if (key == "strict") {
      options.strict = parse_bool(key, value);
    } else if (key == "enforce_single_hire") {
      options.enforce_single_hire = parse_bool(key, value);
    } else {
      throw ConfigError(path + ":" + std::to_string(line_number) +
                        ": unknown config key '" + key + "'");
    }
  }
}

dptopk::YearMonth parse_report_date(const std::string& text) {
  try {
    return dptopk::parse_year_month(text);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("--date: ") + ex.what());
  }
}

dptopk::Metric parse_metric_option(const std::string& text) {
  try {
    return dptopk::parse_metric(text);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("--metric: ") + ex.what());
  }
}

uint64_t entropy_seed() {
  std::random_device device;
  return (static_cast<uint64_t>(device()) << 32) ^ device();
}

dptopk::RunManifest build_manifest(const ReportOptions& options) {
  dptopk::RunManifest manifest;
  if (options.seed) {
    manifest.root_seed = *options.seed;
    manifest.seed_generated = false;
  } else {
    manifest.root_seed = entropy_seed();
    manifest.seed_generated = true;
  }
  manifest.inputs.hires = options.hires.value_or("");
  manifest.inputs.skills = options.skills.value_or("");
  manifest.inputs.geography = options.geography.value_or("");
  if (!options.out || options.out->empty()) {
    throw ConfigError("--out: output directory is required");
  }
  manifest.output_dir = *options.out;
  manifest.created_at = dptopk::utc_timestamp();
  manifest.strict_parse = options.strict.value_or(true);

  if (options.dates.empty()) {
    throw ConfigError("--date: at least one report date is required");
  }
  if (!options.country || options.country->empty()) {
    throw ConfigError("--country: a country is required");
  }
  const std::string granularity = options.granularity.value_or("exact");
  if (granularity != "exact" && granularity != "all") {
    throw ConfigError("--granularity: expected 'exact' or 'all'");
  }

  std::vector<dptopk::Metric> metrics;
  if (options.metrics.empty()) {
    metrics = {dptopk::Metric::Employers, dptopk::Metric::Jobs};
    if (options.skills && !options.skills->empty()) {
      metrics.push_back(dptopk::Metric::Skills);
    }
  } else {
    for (const std::string& name : options.metrics) {
      metrics.push_back(parse_metric_option(name));
    }
  }

  for (const std::string& date_text : options.dates) {
    const dptopk::YearMonth date = parse_report_date(date_text);
    std::vector<dptopk::SliceKey> slices;
    if (granularity == "all") {
      slices = dptopk::expand_slices(date, *options.country, options.region,
                                     options.industry);
    } else {
      slices.push_back(
          {date, *options.country, options.region, options.industry});
    }
    for (const dptopk::SliceKey& slice : slices) {
      for (const dptopk::Metric metric : metrics) {
        // Skill data has no industry attribute; in fan-out mode the
        // industry-refined slices simply get no skills report.
        if (metric == dptopk::Metric::Skills && slice.industry &&
            granularity == "all") {
          continue;
        }
        dptopk::ReportConfig config =
            dptopk::default_report_config(metric, slice);
        if (options.months_back) config.months_back = *options.months_back;
        if (options.skill_years_back) {
          config.skill_years_back = *options.skill_years_back;
        }
        config.tfidf_threshold = options.tfidf_threshold;
        config.enforce_single_hire =
            options.enforce_single_hire.value_or(false);
        manifest.configs.push_back(std::move(config));
      }
    }
  }
  return manifest;
}

int cmd_report(const ReportOptions& options) {
  const dptopk::RunManifest manifest = build_manifest(options);
  const dptopk::RunSummary summary = dptopk::run_reports(manifest);

  std::printf("%-8s %-22s %-10s %-18s %5s %8s %9s\n", "date", "slice", "metric",
              "status", "rows", "epsilon", "delta");
  for (const dptopk::RankedReport& report : summary.reports) {
    std::string slice = report.slice.country;
    if (report.slice.region) slice += "/" + *report.slice.region;
    if (report.slice.industry) slice += "/" + *report.slice.industry;
    std::printf("%-8s %-22s %-10s %-18s %5zu %8.2f %9.2e\n",
                dptopk::to_string(report.slice.report_date).c_str(),
                slice.c_str(), dptopk::to_string(report.metric).c_str(),
                dptopk::to_string(report.status).c_str(), report.rows.size(),
                report.cost.epsilon, report.cost.delta);
  }
  std::printf("wrote %zu report files, manifest, and ledger to %s\n",
              summary.report_files.size(), manifest.output_dir.c_str());
  if (manifest.seed_generated) {
    std::printf("generated root seed %llu (recorded in the manifest)\n",
                static_cast<unsigned long long>(manifest.root_seed));
  }
  return kExitOk;
}

int cmd_ingest(const std::string& hires_path, const std::string& skills_path,
               bool strict) {
  if (hires_path.empty() && skills_path.empty()) {
    throw ConfigError("ingest: give --hires and/or --skills");
  }
  ojson out;
  if (!hires_path.empty()) {
    dptopk::ParseStats stats;
    const std::vector<dptopk::HireEvent> events =
        dptopk::read_hires_csv(hires_path, strict, &stats);
    const dptopk::HireDiagnostics diagnostics = dptopk::diagnose_hires(events);
    ojson j;
    j["rows"] = stats.rows;
    j["skipped"] = stats.skipped.size();
    j["events"] = diagnostics.events;
    j["members"] = diagnostics.members;
    j["members_with_multiple_hires"] = diagnostics.members_with_multiple_hires;
    j["max_hires_per_member"] = diagnostics.max_hires_per_member;
    // Observability for the one-hire-per-member modeling assumption.
    j["share_single_hire"] =
        diagnostics.members == 0
            ? 1.0
            : 1.0 - static_cast<double>(diagnostics.members_with_multiple_hires) /
                        static_cast<double>(diagnostics.members);
    out["hires"] = std::move(j);
  }
  if (!skills_path.empty()) {
    dptopk::ParseStats stats;
    dptopk::read_skills_csv(skills_path, strict, &stats);
    ojson j;
    j["rows"] = stats.rows;
    j["skipped"] = stats.skipped.size();
    out["skills"] = std::move(j);
  }
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int cmd_budget(const std::string& ledger_path, const std::string& date_filter,
               const std::string& metric_filter) {
  const std::vector<dptopk::BudgetEntry> entries =
      dptopk::read_ledger_file(ledger_path);
  std::set<std::pair<std::string, dptopk::Metric>> keys;
  for (const dptopk::BudgetEntry& entry : entries) {
    keys.insert({dptopk::to_string(entry.slice.report_date), entry.metric});
  }
  ojson out = ojson::array();
  for (const auto& [date_text, metric] : keys) {
    if (!date_filter.empty() && date_text != date_filter) continue;
    if (!metric_filter.empty() && dptopk::to_string(metric) != metric_filter) {
      continue;
    }
    const dptopk::Cost cost = dptopk::date_cost(
        entries, dptopk::parse_year_month(date_text), metric);
    ojson j;
    j["date"] = date_text;
    j["metric"] = dptopk::to_string(metric);
    j["epsilon"] = cost.epsilon;
    j["delta"] = cost.delta;
    out.push_back(std::move(j));
  }
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int cmd_audit(const std::string& mechanism_name, int64_t trials, uint64_t seed,
              std::optional<double> declared_epsilon,
              std::optional<double> declared_delta) {
  dptopk::MechanismKind kind;
  try {
    kind = dptopk::parse_mechanism_kind(mechanism_name);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("--mechanism: ") + ex.what());
  }
  if (trials < 10000) {
    throw ConfigError("--trials: at least 10000 trials required");
  }
  double epsilon = 0.0;
  double delta = 0.0;
  switch (kind) {
    case dptopk::MechanismKind::UnknownLaplaceTopK:
      epsilon = 0.6;
      delta = 1e-10;
      break;
    case dptopk::MechanismKind::UnknownGumbelTopK:
      epsilon = 0.1;
      delta = 1e-10;
      break;
    case dptopk::MechanismKind::KnownLaplace:
      epsilon = 0.6;
      delta = 0.0;
      break;
    case dptopk::MechanismKind::KnownGumbelTopK:
      epsilon = 2.0;
      delta = 0.0;
      break;
  }
  if (declared_epsilon) epsilon = *declared_epsilon;
  if (declared_delta) delta = *declared_delta;

  const std::vector<dptopk::AuditVerdict> verdicts =
      dptopk::builtin_mechanism_audit(kind, trials, seed, epsilon, delta);
  ojson out = ojson::array();
  bool failed = false;
  for (const dptopk::AuditVerdict& verdict : verdicts) {
    out.push_back(dptopk::audit_verdict_json(verdict));
    if (verdict.conclusive && !verdict.passes) failed = true;
  }
  std::cout << out.dump(2) << "\n";
  // A conclusive violation means the shipped mechanism breaks its
  // declared guarantee; that is an internal defect, not a usage error.
  return failed ? kExitInternal : kExitOk;
}

int cmd_selftest(const dptopk::SelftestOptions& options) {
  const std::vector<dptopk::CheckResult> results = dptopk::run_selftest(options);
  bool failed = false;
  for (const dptopk::CheckResult& result : results) {
    std::printf("[%s] %s: %s\n", result.passed ? "PASS" : "FAIL",
                result.id.c_str(), result.detail.c_str());
    if (!result.passed) failed = true;
  }
  return failed ? kExitInternal : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"differentially private top-k hiring reports"};
  app.require_subcommand(1);

  // report
  auto* report = app.add_subcommand("report", "generate reports for dates and slices");
  ReportOptions options;
  std::string config_path;
  uint64_t seed_value = 0;
  std::string hires_path;
  std::string skills_path;
  std::string geography_path;
  std::string out_dir;
  std::vector<std::string> dates;
  std::string country;
  std::string region;
  std::string industry;
  std::vector<std::string> metrics;
  std::string granularity;
  int months_back = 0;
  int skill_years_back = 0;
  double tfidf_threshold = 0.0;
  bool strict_flag = false;
  bool lenient_flag = false;
  bool enforce_flag = false;
  report->add_option("--config", config_path,
                     "key = value config file; flags override it");
  auto* opt_seed =
      report->add_option("--seed", seed_value, "root seed for all noise");
  auto* opt_hires = report->add_option("--hires", hires_path, "hires CSV path");
  auto* opt_skills =
      report->add_option("--skills", skills_path, "skills CSV path");
  auto* opt_geography = report->add_option("--geography", geography_path,
                                           "country,region reference CSV");
  auto* opt_out = report->add_option("--out", out_dir, "output directory");
  auto* opt_dates =
      report->add_option("--date", dates, "report month YYYY-MM, repeatable");
  auto* opt_country = report->add_option("--country", country, "country code");
  auto* opt_region = report->add_option("--region", region, "region code");
  auto* opt_industry =
      report->add_option("--industry", industry, "industry code");
  auto* opt_metrics = report->add_option(
      "--metric", metrics, "employers, jobs, or skills; repeatable");
  auto* opt_granularity = report->add_option(
      "--granularity", granularity,
      "'exact' for the one requested slice, 'all' to fan out over the four "
      "slice granularities");
  auto* opt_months =
      report->add_option("--months-back", months_back, "hire window length");
  auto* opt_years = report->add_option("--skill-years-back", skill_years_back,
                                       "skill window length in years");
  auto* opt_tfidf = report->add_option(
      "--tfidf-threshold", tfidf_threshold,
      "drop skills below this idf (non-private preprocessing)");
  auto* opt_strict =
      report->add_flag("--strict", strict_flag, "fail on malformed rows");
  auto* opt_lenient =
      report->add_flag("--lenient", lenient_flag, "skip malformed rows");
  auto* opt_enforce = report->add_flag(
      "--enforce-single-hire", enforce_flag,
      "keep only each member's earliest hire inside every window");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "parse inputs and print diagnostics");
  std::string ingest_hires;
  std::string ingest_skills;
  bool ingest_lenient = false;
  ingest->add_option("--hires", ingest_hires, "hires CSV path");
  ingest->add_option("--skills", ingest_skills, "skills CSV path");
  ingest->add_flag("--lenient", ingest_lenient, "skip malformed rows");

  // budget
  auto* budget = app.add_subcommand("budget", "per-date per-metric privacy totals");
  std::string ledger_path;
  std::string budget_date;
  std::string budget_metric;
  budget->add_option("--ledger", ledger_path, "ledger.jsonl path")->required();
  budget->add_option("--date", budget_date, "only this report month");
  budget->add_option("--metric", budget_metric, "only this metric");

  // audit
  auto* audit = app.add_subcommand("audit", "empirical privacy audit of a mechanism");
  std::string mechanism_name;
  int64_t audit_trials = 200000;
  uint64_t audit_seed = 20260816;
  double audit_epsilon = 0.0;
  double audit_delta = 0.0;
  audit->add_option("--mechanism", mechanism_name,
                    "known_laplace, known_gumbel_topk, unknown_laplace_topk, "
                    "or unknown_gumbel_topk")
      ->required();
  audit->add_option("--trials", audit_trials, "Monte Carlo trials per side");
  audit->add_option("--seed", audit_seed, "audit seed");
  auto* opt_audit_eps = audit->add_option("--declared-epsilon", audit_epsilon,
                                          "epsilon to audit against");
  auto* opt_audit_delta = audit->add_option("--declared-delta", audit_delta,
                                            "delta to audit against");

  // selftest
  auto* selftest = app.add_subcommand("selftest", "built-in health checks");
  dptopk::SelftestOptions selftest_options;
  selftest->add_option("--seed", selftest_options.seed, "selftest seed");
  selftest->add_option("--samples", selftest_options.sampler_samples,
                       "sampler fit draws");
  selftest->add_option("--trials", selftest_options.audit_trials,
                       "audit trials per side");
  selftest->add_option("--inject-noise-fault",
                       selftest_options.noise_scale_multiplier,
                       "scale noise draws by this factor to prove the checks "
                       "catch a broken build (1.0 = healthy)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    // Help and version are successes; anything else is bad usage.
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (report->parsed()) {
      if (!config_path.empty()) apply_config_file(config_path, options);
      if (opt_seed->count()) options.seed = seed_value;
      if (opt_hires->count()) options.hires = hires_path;
      if (opt_skills->count()) options.skills = skills_path;
      if (opt_geography->count()) options.geography = geography_path;
      if (opt_out->count()) options.out = out_dir;
      if (opt_dates->count()) options.dates = dates;
      if (opt_country->count()) options.country = country;
      if (opt_region->count()) options.region = region;
      if (opt_industry->count()) options.industry = industry;
      if (opt_metrics->count()) options.metrics = metrics;
      if (opt_granularity->count()) options.granularity = granularity;
      if (opt_months->count()) options.months_back = months_back;
      if (opt_years->count()) options.skill_years_back = skill_years_back;
      if (opt_tfidf->count()) options.tfidf_threshold = tfidf_threshold;
      if (opt_strict->count()) options.strict = true;
      if (opt_lenient->count()) options.strict = false;
      if (opt_enforce->count()) options.enforce_single_hire = true;
      return cmd_report(options);
    }
    if (ingest->parsed()) {
      return cmd_ingest(ingest_hires, ingest_skills, !ingest_lenient);
    }
    if (budget->parsed()) {
      return cmd_budget(ledger_path, budget_date, budget_metric);
    }
    if (audit->parsed()) {
      return cmd_audit(mechanism_name, audit_trials, audit_seed,
                       opt_audit_eps->count()
                           ? std::optional<double>(audit_epsilon)
                           : std::nullopt,
                       opt_audit_delta->count()
                           ? std::optional<double>(audit_delta)
                           : std::nullopt);
    }
    if (selftest->parsed()) {
      return cmd_selftest(selftest_options);
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitConfig;
}
