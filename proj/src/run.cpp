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

#include "dptopk/run.hpp"

#include <ctime>
#include <fstream>
#include <future>
#include <set>
#include <utility>

namespace dptopk {

namespace {

namespace fs = std::filesystem;

void require_config(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

// Manifest consistency checks that need no input data. Fails before any
// file is opened so config mistakes never cost a read.
void validate_manifest(const RunManifest& manifest) {
  require_config(!manifest.output_dir.empty(), "output_dir must be set");
  require_config(!manifest.configs.empty(), "no reports requested");

  bool needs_hires = false;
  bool needs_skills = false;
  std::set<std::pair<std::string, Metric>> seen;
  for (const ReportConfig& config : manifest.configs) {
    const std::string label =
        to_string(config.metric) + " report for slice " + config.slice.tag();
    for (const std::string& v : validate_params(config.params_topk)) {
      throw ConfigError(label + ": params_topk: " + v);
    }
    require_config(config.months_back >= 1,
                   label + ": months_back must be at least 1");
    require_config(config.skill_years_back >= 1,
                   label + ": skill_years_back must be at least 1");
    require_config(seen.insert({config.slice.tag(), config.metric}).second,
                   label + ": duplicate report in the same run");
    switch (config.metric) {
      case Metric::Employers:
      case Metric::Jobs:
        needs_hires = true;
        require_config(config.params_denominator.has_value(),
                       label + ": params_denominator is required");
        for (const std::string& v :
             validate_params(*config.params_denominator)) {
          throw ConfigError(label + ": params_denominator: " + v);
        }
        break;
      case Metric::Skills: {
        needs_skills = true;
        require_config(!config.slice.industry.has_value(),
                       label + ": skill data carries no industry, drop the "
                               "industry refinement");
        // The released jobs list is the skills candidate source; demand it
        // from the same run so the dependency is explicit.
        bool has_jobs = false;
        for (const ReportConfig& other : manifest.configs) {
          if (other.metric == Metric::Jobs && other.slice == config.slice) {
            has_jobs = true;
            break;
          }
        }
        require_config(has_jobs,
                       label + ": requires a jobs report for the same slice "
                               "in the same run");
        break;
      }
    }
  }
  require_config(!needs_hires || !manifest.inputs.hires.empty(),
                 "employers/jobs reports requested but no hires file given");
  require_config(!needs_skills || !manifest.inputs.skills.empty(),
                 "skills reports requested but no skills file given");
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error(path.string() + ": cannot open for writing");
  }
  out << content;
  if (!out) {
    throw std::runtime_error(path.string() + ": write failed");
  }
}

}  // namespace

std::vector<SliceKey> expand_slices(YearMonth date, const std::string& country,
                                    const std::optional<std::string>& region,
                                    const std::optional<std::string>& industry) {
  std::vector<SliceKey> slices;
  slices.push_back({date, country, std::nullopt, std::nullopt});
  if (region) slices.push_back({date, country, region, std::nullopt});
  if (industry) slices.push_back({date, country, std::nullopt, industry});
  if (region && industry) slices.push_back({date, country, region, industry});
  return slices;
}

RunSummary run_reports(const RunManifest& manifest) {
  validate_manifest(manifest);

  RunSummary summary;
  std::vector<HireEvent> hires;
  if (!manifest.inputs.hires.empty()) {
    hires = read_hires_csv(manifest.inputs.hires, manifest.strict_parse,
                           &summary.hire_stats);
  }
  std::vector<SkillRecord> skills;
  if (!manifest.inputs.skills.empty()) {
    skills = read_skills_csv(manifest.inputs.skills, manifest.strict_parse,
                             &summary.skill_stats);
  }

  if (!manifest.inputs.geography.empty()) {
    const Geography geo = read_geography_csv(manifest.inputs.geography);
    for (const ReportConfig& config : manifest.configs) {
      for (const std::string& v : validate_slice(config.slice, geo)) {
        throw ConfigError("slice " + config.slice.tag() + ": " + v);
      }
    }
  } else {
    for (const ReportConfig& config : manifest.configs) {
      require_config(!config.slice.region.has_value(),
                     "slice " + config.slice.tag() +
                         ": region slices need a geography table to validate "
                         "against");
    }
  }

  // Phase one: employers and jobs, independent of each other. Each task
  // records into a private ledger; merging in config order keeps the
  // ledger file deterministic under any scheduling.
  const size_t count = manifest.configs.size();
  std::vector<RankedReport> reports(count);
  std::vector<std::vector<BudgetEntry>> entries(count);
  using TaskResult = std::pair<RankedReport, std::vector<BudgetEntry>>;
  std::vector<std::future<TaskResult>> tasks(count);

  for (size_t i = 0; i < count; ++i) {
    const ReportConfig& config = manifest.configs[i];
    if (config.metric == Metric::Skills) continue;
    tasks[i] = std::async(std::launch::async, [&manifest, &hires, &config] {
      BudgetLedger local;
      RankedReport report =
          config.metric == Metric::Employers
              ? who_is_hiring(hires, config, manifest.root_seed, local)
              : jobs_available(hires, config, manifest.root_seed, local);
      return TaskResult{std::move(report), local.snapshot()};
    });
  }
  for (size_t i = 0; i < count; ++i) {
    if (!tasks[i].valid()) continue;
    TaskResult result = tasks[i].get();
    reports[i] = std::move(result.first);
    entries[i] = std::move(result.second);
  }

  // Phase two: skills, each consuming the released job list of its slice's
  // jobs report.
  for (size_t i = 0; i < count; ++i) {
    const ReportConfig& config = manifest.configs[i];
    if (config.metric != Metric::Skills) continue;
    const RankedReport* jobs_report = nullptr;
    for (size_t j = 0; j < count; ++j) {
      if (manifest.configs[j].metric == Metric::Jobs &&
          manifest.configs[j].slice == config.slice) {
        jobs_report = &reports[j];
        break;
      }
    }
    // validate_manifest guaranteed the jobs report exists.
    tasks[i] = std::async(std::launch::async,
                          [&manifest, &skills, &config, jobs_report] {
                            BudgetLedger local;
                            RankedReport report =
                                skills_needed(skills, *jobs_report, config,
                                              manifest.root_seed, local);
                            return TaskResult{std::move(report), local.snapshot()};
                          });
  }
  for (size_t i = 0; i < count; ++i) {
    if (manifest.configs[i].metric != Metric::Skills) continue;
    TaskResult result = tasks[i].get();
    reports[i] = std::move(result.first);
    entries[i] = std::move(result.second);
  }

  summary.reports = std::move(reports);
  for (std::vector<BudgetEntry>& batch : entries) {
    summary.entries.insert(summary.entries.end(), batch.begin(), batch.end());
  }

  const fs::path out_dir(manifest.output_dir);
  fs::create_directories(out_dir);
  for (const RankedReport& report : summary.reports) {
    const std::string base = report_basename(report);
    const fs::path json_path = out_dir / (base + ".json");
    write_text_file(json_path, report_json(report).dump(2) + "\n");
    summary.report_files.push_back(json_path);
    const fs::path csv_path = out_dir / (base + ".csv");
    write_text_file(csv_path, report_csv(report));
    summary.report_files.push_back(csv_path);
  }

  summary.manifest_file = out_dir / "manifest.json";
  write_text_file(summary.manifest_file, manifest_json(manifest).dump(2) + "\n");

  summary.ledger_file = out_dir / "ledger.jsonl";
  append_ledger_file(summary.ledger_file, summary.entries);
  return summary;
}

ojson report_config_json(const ReportConfig& config) {
  ojson j;
  j["metric"] = to_string(config.metric);
  j["slice"] = slice_json(config.slice);
  j["params_topk"] = privacy_params_json(config.params_topk);
  if (config.params_denominator) {
    j["params_denominator"] = privacy_params_json(*config.params_denominator);
  }
  j["months_back"] = config.months_back;
  j["skill_years_back"] = config.skill_years_back;
  if (config.tfidf_threshold) j["tfidf_threshold"] = *config.tfidf_threshold;
  j["enforce_single_hire"] = config.enforce_single_hire;
  return j;
}

ojson manifest_json(const RunManifest& manifest) {
  ojson j;
  j["root_seed"] = manifest.root_seed;
  j["seed_generated"] = manifest.seed_generated;
  ojson inputs;
  inputs["hires"] = manifest.inputs.hires;
  if (!manifest.inputs.skills.empty()) inputs["skills"] = manifest.inputs.skills;
  if (!manifest.inputs.geography.empty()) {
    inputs["geography"] = manifest.inputs.geography;
  }
  j["inputs"] = std::move(inputs);
  j["output_dir"] = manifest.output_dir;
  j["created_at"] = manifest.created_at;
  j["strict_parse"] = manifest.strict_parse;
  ojson configs = ojson::array();
  for (const ReportConfig& config : manifest.configs) {
    configs.push_back(report_config_json(config));
  }
  j["configs"] = std::move(configs);
  return j;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm parts{};
  gmtime_r(&now, &parts);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &parts);
  return buffer;
}

}  // namespace dptopk
