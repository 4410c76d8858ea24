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

#include "dptopk/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <tuple>
#include <utility>

namespace dptopk {

namespace {

constexpr const char* kHiresHeader =
    "member_id,employer_id,title_id,country,region,industry,hire_date";
constexpr const char* kSkillsHeader =
    "member_id,country,region,title_id,skill_id,observed_date";
constexpr const char* kGeographyHeader = "country,region";

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

// Streams lines to on_row(line_number, fields) after checking the header.
// on_row returns an error description for a malformed row, empty on
// success. Blank lines are ignored.
template <typename RowFn>
void read_csv(const std::string& path, const char* expected_header,
              bool strict, ParseStats* stats, RowFn on_row) {
  std::ifstream in(path);
  if (!in) {
    throw InputError(path + ": cannot open file");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw InputError(path + ": file is empty, expected header '" +
                     expected_header + "'");
  }
  if (strip_cr(line) != expected_header) {
    throw InputError(path + ":1: header mismatch, expected '" +
                     expected_header + "'");
  }
  long line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    line = strip_cr(line);
    if (line.empty()) continue;
    if (stats) ++stats->rows;
    const std::string error = on_row(line_number, split_fields(line));
    if (error.empty()) continue;
    if (strict) {
      throw InputError(path + ":" + std::to_string(line_number) + ": " + error);
    }
    if (stats) stats->skipped.push_back({line_number, error});
  }
}

// Field-count and emptiness check shared by the row parsers.
std::string check_fields(const std::vector<std::string>& fields,
                         size_t expected) {
  if (fields.size() != expected) {
    return "expected " + std::to_string(expected) + " fields, got " +
           std::to_string(fields.size());
  }
  for (size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].empty()) {
      return "field " + std::to_string(i + 1) + " is empty";
    }
  }
  return "";
}

long window_floor(YearMonth report_date, int months_back) {
  if (months_back < 1) {
    throw std::invalid_argument("window: months_back must be at least 1");
  }
  return month_index(report_date) - months_back;
}

std::map<std::string, int64_t> distinct_counts(
    const std::map<std::string, std::set<std::string>>& members_by_element) {
  std::map<std::string, int64_t> counts;
  for (const auto& [element, members] : members_by_element) {
    counts[element] = static_cast<int64_t>(members.size());
  }
  return counts;
}

}  // namespace

std::vector<HireEvent> read_hires_csv(const std::string& path, bool strict,
                                      ParseStats* stats) {
  std::vector<HireEvent> events;
  read_csv(path, kHiresHeader, strict, stats,
           [&](long, std::vector<std::string> f) -> std::string {
             if (std::string err = check_fields(f, 7); !err.empty()) return err;
             HireEvent e;
             e.member_id = std::move(f[0]);
             e.employer_id = std::move(f[1]);
             e.title_id = std::move(f[2]);
             e.country = std::move(f[3]);
             e.region = std::move(f[4]);
             e.industry = std::move(f[5]);
             try {
               e.hire_date = parse_date(f[6]);
             } catch (const std::invalid_argument& ex) {
               return std::string("hire_date: ") + ex.what();
             }
             events.push_back(std::move(e));
             return "";
           });
  return events;
}

std::vector<SkillRecord> read_skills_csv(const std::string& path, bool strict,
                                         ParseStats* stats) {
  std::vector<SkillRecord> records;
  read_csv(path, kSkillsHeader, strict, stats,
           [&](long, std::vector<std::string> f) -> std::string {
             if (std::string err = check_fields(f, 6); !err.empty()) return err;
             SkillRecord r;
             r.member_id = std::move(f[0]);
             r.country = std::move(f[1]);
             r.region = std::move(f[2]);
             r.title_id = std::move(f[3]);
             r.skill_id = std::move(f[4]);
             try {
               r.observed_date = parse_date(f[5]);
             } catch (const std::invalid_argument& ex) {
               return std::string("observed_date: ") + ex.what();
             }
             records.push_back(std::move(r));
             return "";
           });
  return records;
}

bool Geography::known_country(const std::string& country) const {
  return regions_by_country.count(country) > 0;
}

bool Geography::known_region(const std::string& country,
                             const std::string& region) const {
  auto it = regions_by_country.find(country);
  return it != regions_by_country.end() && it->second.count(region) > 0;
}

Geography read_geography_csv(const std::string& path) {
  Geography geo;
  read_csv(path, kGeographyHeader, /*strict=*/true, nullptr,
           [&](long, std::vector<std::string> f) -> std::string {
             if (f.size() != 2) {
               return "expected 2 fields, got " + std::to_string(f.size());
             }
             if (f[0].empty()) return "field 1 is empty";
             auto& regions = geo.regions_by_country[f[0]];
             if (!f[1].empty()) regions.insert(std::move(f[1]));
             return "";
           });
  return geo;
}

std::vector<std::string> validate_slice(const SliceKey& slice,
                                        const Geography& geo) {
  std::vector<std::string> violations;
  if (!is_valid_year_month(slice.report_date)) {
    violations.push_back("report_date is not a valid year-month");
  }
  if (slice.country.empty()) {
    violations.push_back("country must be non-empty");
  } else if (!geo.known_country(slice.country)) {
    violations.push_back("unknown country '" + slice.country + "'");
  }
  if (slice.region) {
    if (slice.region->empty()) {
      violations.push_back("region must be non-empty when present");
    } else if (!geo.known_region(slice.country, *slice.region)) {
      violations.push_back("unknown region '" + *slice.region +
                           "' for country '" + slice.country + "'");
    }
  }
  if (slice.industry && slice.industry->empty()) {
    violations.push_back("industry must be non-empty when present");
  }
  return violations;
}

bool in_slice(const HireEvent& event, const SliceKey& slice) {
  if (event.country != slice.country) return false;
  if (slice.region && event.region != *slice.region) return false;
  if (slice.industry && event.industry != *slice.industry) return false;
  return true;
}

bool in_slice(const SkillRecord& record, const SliceKey& slice) {
  if (record.country != slice.country) return false;
  if (slice.region && record.region != *slice.region) return false;
  return true;
}

std::vector<HireEvent> window(const std::vector<HireEvent>& events,
                              YearMonth report_date, int months_back) {
  const long floor = window_floor(report_date, months_back);
  const long ceil = month_index(report_date);
  std::vector<HireEvent> kept;
  for (const HireEvent& e : events) {
    const long idx = month_index(month_of(e.hire_date));
    if (idx > floor && idx <= ceil) kept.push_back(e);
  }
  return kept;
}

std::vector<SkillRecord> window(const std::vector<SkillRecord>& records,
                                YearMonth report_date, int months_back) {
  const long floor = window_floor(report_date, months_back);
  const long ceil = month_index(report_date);
  std::vector<SkillRecord> kept;
  for (const SkillRecord& r : records) {
    const long idx = month_index(month_of(r.observed_date));
    if (idx > floor && idx <= ceil) kept.push_back(r);
  }
  return kept;
}

Histogram employer_histogram(const std::vector<HireEvent>& events,
                             const SliceKey& slice) {
  std::map<std::string, std::set<std::string>> members_by_employer;
  for (const HireEvent& e : events) {
    if (in_slice(e, slice)) members_by_employer[e.employer_id].insert(e.member_id);
  }
  Histogram h;
  h.slice = slice;
  h.elements = distinct_counts(members_by_employer);
  h.domain_kind = DomainKind::Unknown;
  h.l0_bound = 1;
  return h;
}

Histogram job_histogram(const std::vector<HireEvent>& events,
                        const SliceKey& slice) {
  std::map<std::string, std::set<std::string>> members_by_title;
  for (const HireEvent& e : events) {
    if (in_slice(e, slice)) members_by_title[e.title_id].insert(e.member_id);
  }
  Histogram h;
  h.slice = slice;
  h.elements = distinct_counts(members_by_title);
  h.domain_kind = DomainKind::Unknown;
  h.l0_bound = 1;
  return h;
}

Histogram employer_histogram_for_domain(const std::vector<HireEvent>& events,
                                        const SliceKey& slice,
                                        const std::vector<std::string>& domain) {
  Histogram h;
  h.slice = slice;
  h.domain_kind = DomainKind::Known;
  h.l0_bound = 1;
  for (const std::string& employer : domain) {
    h.elements[employer] = 0;
  }
  std::map<std::string, std::set<std::string>> members_by_employer;
  for (const HireEvent& e : events) {
    if (!in_slice(e, slice)) continue;
    if (h.elements.count(e.employer_id) == 0) continue;
    members_by_employer[e.employer_id].insert(e.member_id);
  }
  for (const auto& [employer, members] : members_by_employer) {
    h.elements[employer] = static_cast<int64_t>(members.size());
  }
  return h;
}

int64_t distinct_members(const std::vector<HireEvent>& events,
                         const SliceKey& slice) {
  std::set<std::string> members;
  for (const HireEvent& e : events) {
    if (in_slice(e, slice)) members.insert(e.member_id);
  }
  return static_cast<int64_t>(members.size());
}

Histogram skill_histogram(const std::vector<SkillRecord>& records,
                          const SliceKey& slice,
                          const std::vector<std::string>& top_jobs,
                          int years_back) {
  if (years_back < 1) {
    throw std::invalid_argument("skill_histogram: years_back must be at least 1");
  }
  const std::set<std::string> titles(top_jobs.begin(), top_jobs.end());
  const std::vector<SkillRecord> windowed =
      window(records, slice.report_date, years_back * 12);
  // Distinct members per (title, skill), then max over titles per skill.
  // The max keeps one title's popularity from drowning out skills that are
  // defining for a smaller title.
  std::map<std::pair<std::string, std::string>, std::set<std::string>>
      members_by_title_skill;
  for (const SkillRecord& r : windowed) {
    if (!in_slice(r, slice)) continue;
    if (titles.count(r.title_id) == 0) continue;
    members_by_title_skill[{r.title_id, r.skill_id}].insert(r.member_id);
  }
  Histogram h;
  h.slice = slice;
  h.domain_kind = DomainKind::Unknown;
  for (const auto& [title_skill, members] : members_by_title_skill) {
    int64_t& score = h.elements[title_skill.second];
    score = std::max(score, static_cast<int64_t>(members.size()));
  }
  return h;
}

Histogram truncate_top_dbar(const Histogram& hist, int64_t max_elements) {
  if (max_elements < 1) {
    throw std::invalid_argument(
        "truncate_top_dbar: max_elements must be at least 1");
  }
  if (static_cast<int64_t>(hist.elements.size()) <= max_elements) return hist;
  std::vector<std::pair<std::string, int64_t>> ranked(hist.elements.begin(),
                                                      hist.elements.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Histogram out = hist;
  out.elements.clear();
  for (int64_t i = 0; i < max_elements; ++i) {
    out.elements.insert(ranked[static_cast<size_t>(i)]);
  }
  return out;
}

std::vector<SkillRecord> tfidf_prefilter(const std::vector<SkillRecord>& records,
                                         double stopskill_threshold) {
  if (stopskill_threshold <= 0.0) return records;
  std::set<std::string> all_titles;
  std::map<std::string, std::set<std::string>> titles_by_skill;
  for (const SkillRecord& r : records) {
    all_titles.insert(r.title_id);
    titles_by_skill[r.skill_id].insert(r.title_id);
  }
  if (all_titles.empty()) return records;
  const double total = static_cast<double>(all_titles.size());
  std::vector<SkillRecord> kept;
  kept.reserve(records.size());
  for (const SkillRecord& r : records) {
    const double idf = std::log(
        total / static_cast<double>(titles_by_skill.at(r.skill_id).size()));
    if (idf >= stopskill_threshold) kept.push_back(r);
  }
  return kept;
}

HireDiagnostics diagnose_hires(const std::vector<HireEvent>& events) {
  std::map<std::string, int64_t> hires_per_member;
  for (const HireEvent& e : events) ++hires_per_member[e.member_id];
  HireDiagnostics d;
  d.events = static_cast<int64_t>(events.size());
  d.members = static_cast<int64_t>(hires_per_member.size());
  for (const auto& [member, count] : hires_per_member) {
    (void)member;
    if (count > 1) ++d.members_with_multiple_hires;
    d.max_hires_per_member = std::max(d.max_hires_per_member, count);
  }
  return d;
}

std::vector<HireEvent> enforce_single_hire(const std::vector<HireEvent>& events) {
  std::map<std::string, const HireEvent*> chosen;
  for (const HireEvent& e : events) {
    auto [it, inserted] = chosen.try_emplace(e.member_id, &e);
    if (inserted) continue;
    const HireEvent& current = *it->second;
    const auto key = [](const HireEvent& h) {
      return std::tie(h.hire_date, h.employer_id, h.title_id);
    };
    if (key(e) < key(current)) it->second = &e;
  }
  std::vector<HireEvent> kept;
  kept.reserve(chosen.size());
  for (const auto& [member, event] : chosen) {
    (void)member;
    kept.push_back(*event);
  }
  return kept;
}

}  // namespace dptopk
