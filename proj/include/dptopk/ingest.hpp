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
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dptopk/dates.hpp"
#include "dptopk/types.hpp"

namespace dptopk {

// Bad input data (unreadable file, schema mismatch, malformed row in
// strict mode). Distinct from configuration errors so the CLI can map the
// two to different exit codes.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One member starting one job. member_id is the privacy unit everywhere.
struct HireEvent {
  std::string member_id;
  std::string employer_id;
  std::string title_id;
  std::string country;
  std::string region;
  std::string industry;
  Date hire_date;
};

// One member observed holding one skill in one job. Carries no industry;
// skill slices refine by geography only.
struct SkillRecord {
  std::string member_id;
  std::string country;
  std::string region;
  std::string title_id;
  std::string skill_id;
  Date observed_date;
};

struct SkippedRow {
  long line = 0;
  std::string reason;
};

struct ParseStats {
  long rows = 0;  // data rows seen, header excluded
  std::vector<SkippedRow> skipped;
};

// CSV readers. The format is plain comma-separated fields with no quoting;
// the first line must be exactly the expected header. A row is malformed
// when the field count is wrong, any field is empty, or the date does not
// parse. strict: first malformed row throws InputError with "path:line:".
// Lenient: malformed rows are skipped and recorded in stats.
// Expected headers:
//   hires.csv:  member_id,employer_id,title_id,country,region,industry,hire_date
//   skills.csv: member_id,country,region,title_id,skill_id,observed_date
std::vector<HireEvent> read_hires_csv(const std::string& path, bool strict,
                                      ParseStats* stats = nullptr);
std::vector<SkillRecord> read_skills_csv(const std::string& path, bool strict,
                                         ParseStats* stats = nullptr);

// Reference table of valid (country, region) pairs, used to reject
// mistyped slice requests before any budget is spent. A row with an empty
// region registers the country alone.
struct Geography {
  std::map<std::string, std::set<std::string>> regions_by_country;

  bool known_country(const std::string& country) const;
  bool known_region(const std::string& country, const std::string& region) const;
};

// Header "country,region". Always strict: geography is configuration.
Geography read_geography_csv(const std::string& path);

// Violations for a requested slice against the reference table; empty
// means the slice is servable.
std::vector<std::string> validate_slice(const SliceKey& slice,
                                        const Geography& geo);

// Slice membership. Absent slice fields match everything; skill records
// never match an industry-refined slice description by industry because
// they carry none, so industry-refined slices are rejected upstream for
// the skills metric.
bool in_slice(const HireEvent& event, const SliceKey& slice);
bool in_slice(const SkillRecord& record, const SliceKey& slice);

// Events whose month falls in the months_back-month window ending at
// report_date inclusive. months_back must be at least 1.
std::vector<HireEvent> window(const std::vector<HireEvent>& events,
                              YearMonth report_date, int months_back);
std::vector<SkillRecord> window(const std::vector<SkillRecord>& records,
                                YearMonth report_date, int months_back);

// Distinct members per employer (resp. per title) among the events in the
// slice. Callers window first. Unknown domain; one hire per member is the
// upstream contract, recorded as l0_bound = 1.
Histogram employer_histogram(const std::vector<HireEvent>& events,
                             const SliceKey& slice);
Histogram job_histogram(const std::vector<HireEvent>& events,
                        const SliceKey& slice);

// Known-domain companion histogram: distinct members per employer for
// exactly the declared domain, zero-filled, events outside the domain
// ignored.
Histogram employer_histogram_for_domain(const std::vector<HireEvent>& events,
                                        const SliceKey& slice,
                                        const std::vector<std::string>& domain);

// Distinct members contributing any event in the slice.
int64_t distinct_members(const std::vector<HireEvent>& events,
                         const SliceKey& slice);

// Per-skill score over a years_back-year window ending at the slice month:
// distinct members per (title, skill) within the slice, then the maximum
// over the given titles per skill. Titles outside top_jobs are ignored. A
// member may contribute to many skills, so no l0_bound is set.
Histogram skill_histogram(const std::vector<SkillRecord>& records,
                          const SliceKey& slice,
                          const std::vector<std::string>& top_jobs,
                          int years_back = 5);

// Candidate cap before an unknown-domain mechanism: keep the max_elements
// largest counts, ties by element id ascending.
Histogram truncate_top_dbar(const Histogram& hist, int64_t max_elements);

// Non-private relevance prefilter over a record corpus. Treating each
// title as a document, idf(skill) = ln(distinct titles in the corpus /
// titles containing the skill); records whose skill's idf falls below
// stopskill_threshold are dropped (a skill present under every title has
// idf 0). A threshold of 0 or below keeps everything. Reports fed from a
// filtered corpus must be flagged as non-DP-preprocessed.
std::vector<SkillRecord> tfidf_prefilter(const std::vector<SkillRecord>& records,
                                         double stopskill_threshold);

struct HireDiagnostics {
  int64_t events = 0;
  int64_t members = 0;
  int64_t members_with_multiple_hires = 0;
  int64_t max_hires_per_member = 0;
};

// Contribution profile of a hire set. The privacy analysis assumes one
// hire per member per window; members_with_multiple_hires > 0 in a window
// means that assumption fails and callers should either trim or widen the
// declared sensitivity.
HireDiagnostics diagnose_hires(const std::vector<HireEvent>& events);

// Keeps each member's earliest hire, ties by (date, employer, title).
// Restores the one-hire-per-member contract when raw data violates it.
std::vector<HireEvent> enforce_single_hire(const std::vector<HireEvent>& events);

}  // namespace dptopk
