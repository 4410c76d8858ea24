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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dptopk/accountant.hpp"
#include "dptopk/json_io.hpp"
#include "dptopk/reports.hpp"
#include "dptopk/types.hpp"

namespace dptopk {

// Invalid configuration (bad flags, inconsistent manifest, unknown slice).
// Distinct from InputError so the CLI can map the two to different exit
// codes.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InputPaths {
  std::string hires;
  std::string skills;     // empty when no skills report is requested
  std::string geography;  // empty when no region slices are requested
};

// Everything a run needs; written beside the outputs as manifest.json so
// any report is reproducible from (manifest, input files). created_at is
// provenance only and is the one field excluded from the reproducibility
// contract.
struct RunManifest {
  uint64_t root_seed = 0;
  // True when the seed came from local entropy rather than --seed; the
  // value is echoed so the run stays reproducible after the fact.
  bool seed_generated = false;
  InputPaths inputs;
  std::string output_dir;
  std::string created_at;
  bool strict_parse = true;
  std::vector<ReportConfig> configs;
};

// The four slice granularities one report date fans out to: country,
// country+region, country+industry, country+region+industry, limited to
// the refinements provided.
std::vector<SliceKey> expand_slices(YearMonth date, const std::string& country,
                                    const std::optional<std::string>& region,
                                    const std::optional<std::string>& industry);

struct RunSummary {
  std::vector<RankedReport> reports;
  std::vector<BudgetEntry> entries;
  std::vector<std::filesystem::path> report_files;
  std::filesystem::path manifest_file;
  std::filesystem::path ledger_file;
  ParseStats hire_stats;
  ParseStats skill_stats;
};

// Executes every config in the manifest and writes per-report JSON + CSV,
// manifest.json, and an append-only ledger.jsonl into output_dir.
// Employers/jobs reports run as parallel tasks; skills reports run after
// them because each consumes the released job list of the jobs report
// with the same slice (missing one is a ConfigError). Outputs and ledger
// order are deterministic functions of (manifest, inputs) regardless of
// scheduling. Throws ConfigError for manifest problems and InputError for
// unreadable or malformed input files.
RunSummary run_reports(const RunManifest& manifest);

ojson manifest_json(const RunManifest& manifest);
ojson report_config_json(const ReportConfig& config);

// Current time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace dptopk
