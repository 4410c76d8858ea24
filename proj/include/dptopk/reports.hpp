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
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "dptopk/accountant.hpp"
#include "dptopk/ingest.hpp"
#include "dptopk/mechanisms.hpp"
#include "dptopk/types.hpp"

namespace dptopk {

// Full recipe for one report. Defaults mirror the production
// configuration: employers and jobs run the unknown-domain Laplace top-k
// at (0.6, 1e-10) with a (0.6, 0) known-domain Laplace companion, skills
// run the unknown-domain Gumbel top-k at (0.1, 1e-10); all use a
// 1000-candidate cap and k = 20.
struct ReportConfig {
  Metric metric = Metric::Employers;
  SliceKey slice;
  PrivacyParams params_topk;
  // Second release of an employers/jobs report: previous-window companion
  // counts resp. the noisy total. Ignored by skills.
  std::optional<PrivacyParams> params_denominator;
  int months_back = 3;
  int skill_years_back = 5;
  // Non-private skill relevance prefilter; absent or <= 0 disables it.
  // When it runs, the report is flagged non_dp_preprocessing.
  std::optional<double> tfidf_threshold;
  // Keep only each member's earliest hire inside every window, making the
  // one-hire-per-member assumption a guarantee instead of a measurement.
  bool enforce_single_hire = false;
};

ReportConfig default_report_config(Metric metric, SliceKey slice);

// Stream id for one mechanism invocation:
//   fnv1a64("slice:" + slice.tag() + ";metric:" + metric + ";purpose:" + p)
// Purposes in use: "topk", "companion", "denominator". Every draw in a run
// is replayable from (root_seed, this id, element tag); the derivation is
// documented in the README and must not change shape.
uint64_t derive_stream_id(const SliceKey& slice, Metric metric,
                          std::string_view purpose);

// Post-processing helpers, pure in their inputs.
//
// growth_rows: value_i = 100 * noisy_count_i / max(noisy_previous[e_i], 1).
// Requires released counts and a previous value for every released
// element. Row order is the top-k order, not ratio order.
std::vector<ReportRow> growth_rows(const TopKResult& topk,
                                   const std::map<std::string, double>& noisy_previous);

// share_rows: value_i = 100 * noisy_count_i / max(noisy_total, 1).
std::vector<ReportRow> share_rows(const TopKResult& topk, double noisy_total);

// Top employers by recent hires. Pipeline: current window -> employer
// histogram -> candidate cap -> unknown-domain Laplace top-k (with
// counts); then previous window counts for exactly the released employers
// via the known-domain Laplace companion; row value = growth index
// (current/previous ratio times 100). Appends the two budget entries
// regardless of how many rows survive; empty output reports
// InsufficientData. Throws std::invalid_argument when config.metric is
// not Employers or params_denominator is missing.
RankedReport who_is_hiring(const std::vector<HireEvent>& events,
                           const ReportConfig& config, uint64_t root_seed,
                           BudgetLedger& ledger);

// Top jobs by recent hires. Same top-k pipeline over titles; the
// denominator is the slice's distinct-member total plus Laplace noise at
// the same scale (first draw of the "denominator" stream); row value =
// percentage of all hires. Budget entries as for employers.
RankedReport jobs_available(const std::vector<HireEvent>& events,
                            const ReportConfig& config, uint64_t root_seed,
                            BudgetLedger& ledger);

// Top skills for the jobs a jobs report released. The released job list
// is already privatized, so reading it costs nothing; the skill histogram
// (max over those jobs of per-job distinct members, 5-year window) has
// unrestricted sensitivity and goes through the unknown-domain Gumbel
// top-k, rank-only. An empty jobs report short-circuits to
// InsufficientData without running the mechanism or spending budget. The
// single budget entry is flagged conditional: the guarantee is scoped to
// the released-jobs input. Throws std::invalid_argument when the jobs
// report's metric or slice does not match.
RankedReport skills_needed(const std::vector<SkillRecord>& skill_records,
                           const RankedReport& jobs_report,
                           const ReportConfig& config, uint64_t root_seed,
                           BudgetLedger& ledger);

}  // namespace dptopk
