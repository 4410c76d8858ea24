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

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dptopk/accountant.hpp"
#include "dptopk/ingest.hpp"
#include "dptopk/mechanisms.hpp"
#include "dptopk/noise.hpp"
#include "dptopk/reports.hpp"

using namespace dptopk;

namespace {

const YearMonth kJune{2026, 6};
const SliceKey kUs{kJune, "us", std::nullopt, std::nullopt};

HireEvent hire(std::string member, std::string employer, std::string title,
               std::string date) {
  HireEvent e;
  e.member_id = std::move(member);
  e.employer_id = std::move(employer);
  e.title_id = std::move(title);
  e.country = "us";
  e.region = "ca";
  e.industry = "tech";
  e.hire_date = parse_date(date);
  return e;
}

SkillRecord skill(std::string member, std::string title, std::string sk,
                  std::string date) {
  SkillRecord r;
  r.member_id = std::move(member);
  r.country = "us";
  r.region = "ca";
  r.title_id = std::move(title);
  r.skill_id = std::move(sk);
  r.observed_date = parse_date(date);
  return r;
}

// current/previous: distinct members hired per employer (or title) in the
// two adjacent three-month windows ending at the report date.
std::vector<HireEvent> synthetic_hires(
    const std::map<std::string, std::pair<int, int>>& blocks) {
  std::vector<HireEvent> events;
  int member = 0;
  for (const auto& [element, counts] : blocks) {
    for (int i = 0; i < counts.first; ++i) {
      events.push_back(hire("m" + std::to_string(++member), element,
                            "t_" + element, i % 2 ? "2026-05-15" : "2026-06-10"));
    }
    for (int i = 0; i < counts.second; ++i) {
      events.push_back(hire("m" + std::to_string(++member), element,
                            "t_" + element, i % 2 ? "2026-01-20" : "2026-03-05"));
    }
  }
  return events;
}

}  // namespace

TEST_CASE("default configs carry the production parameters") {
  const ReportConfig employers = default_report_config(Metric::Employers, kUs);
  CHECK(employers.params_topk.epsilon == 0.6);
  CHECK(employers.params_topk.delta == 1e-10);
  CHECK(employers.params_topk.l0_sensitivity == 1);
  CHECK(employers.params_topk.fetch_limit == 1000);
  CHECK(employers.params_topk.k == 20);
  REQUIRE(employers.params_denominator.has_value());
  CHECK(employers.params_denominator->epsilon == 0.6);
  CHECK(employers.params_denominator->delta == 0.0);
  CHECK(employers.months_back == 3);

  const ReportConfig skills = default_report_config(Metric::Skills, kUs);
  CHECK(skills.params_topk.epsilon == 0.1);
  CHECK(skills.params_topk.delta == 1e-10);
  CHECK_FALSE(skills.params_topk.l0_sensitivity.has_value());
  CHECK_FALSE(skills.params_denominator.has_value());
  CHECK(skills.skill_years_back == 5);
}

TEST_CASE("stream ids are the documented hash of slice, metric, purpose") {
  const SliceKey slice{kJune, "us", "ca", std::nullopt};
  CHECK(derive_stream_id(slice, Metric::Employers, "topk") ==
        fnv1a64("slice:2026-06|us|ca|;metric:employers;purpose:topk"));
  CHECK(derive_stream_id(slice, Metric::Employers, "topk") !=
        derive_stream_id(slice, Metric::Employers, "companion"));
  CHECK(derive_stream_id(slice, Metric::Employers, "topk") !=
        derive_stream_id(slice, Metric::Jobs, "topk"));
  CHECK(derive_stream_id(slice, Metric::Jobs, "denominator") ==
        fnv1a64("slice:2026-06|us|ca|;metric:jobs;purpose:denominator"));
}

TEST_CASE("growth and share rows are pure ratio post-processing") {
  TopKResult topk;
  topk.released_counts = true;
  topk.rows = {{"a", 52.5}, {"b", 40.0}};

  const std::vector<ReportRow> growth =
      growth_rows(topk, {{"a", 21.0}, {"b", 0.25}, {"c", 9.0}});
  REQUIRE(growth.size() == 2);
  CHECK(growth[0].rank == 1);
  CHECK(growth[0].element == "a");
  CHECK(*growth[0].value == doctest::Approx(100.0 * 52.5 / 21.0));
  // Denominators below one are clamped to one.
  CHECK(*growth[1].value == doctest::Approx(100.0 * 40.0));

  CHECK_THROWS_AS(growth_rows(topk, {{"a", 21.0}}), std::invalid_argument);

  const std::vector<ReportRow> share = share_rows(topk, 200.0);
  CHECK(*share[0].value == doctest::Approx(26.25));
  CHECK(*share[1].value == doctest::Approx(20.0));
  CHECK(*share_rows(topk, -5.0)[0].value == doctest::Approx(5250.0));

  TopKResult rank_only;
  rank_only.released_counts = false;
  rank_only.rows = {{"a", std::nullopt}};
  CHECK_THROWS_AS(growth_rows(rank_only, {{"a", 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(share_rows(rank_only, 10.0), std::invalid_argument);
}

TEST_CASE("the employers report replays exactly from its stream tree") {
  const std::vector<HireEvent> events = synthetic_hires({
      {"e_big", {300, 150}},
      {"e_mid", {200, 250}},
      {"e_small", {8, 4}},
  });
  const uint64_t seed = 20260816;
  ReportConfig config = default_report_config(Metric::Employers, kUs);

  BudgetLedger ledger;
  const RankedReport report = who_is_hiring(events, config, seed, ledger);

  // Independent replay with explicit plumbing.
  const std::vector<HireEvent> current = window(events, kJune, 3);
  const Histogram hist =
      truncate_top_dbar(employer_histogram(current, kUs), 1000);
  const TopKResult topk = unknown_domain_laplace_topk(
      hist, config.params_topk,
      RandomStream(seed, derive_stream_id(kUs, Metric::Employers, "topk")));
  std::vector<std::string> released;
  for (const TopKRow& row : topk.rows) released.push_back(row.element);
  const std::vector<HireEvent> previous =
      window(events, add_months(kJune, -3), 3);
  const std::map<std::string, double> noisy_previous = known_domain_laplace(
      employer_histogram_for_domain(previous, kUs, released),
      *config.params_denominator,
      RandomStream(seed, derive_stream_id(kUs, Metric::Employers, "companion")));
  const std::vector<ReportRow> expected = growth_rows(topk, noisy_previous);

  CHECK(report.metric == Metric::Employers);
  CHECK(report.slice == kUs);
  CHECK(report.status == ReportStatus::Ok);
  REQUIRE(report.rows.size() == expected.size());
  for (size_t i = 0; i < expected.size(); ++i) {
    CHECK(report.rows[i].rank == expected[i].rank);
    CHECK(report.rows[i].element == expected[i].element);
    CHECK(report.rows[i].value == expected[i].value);
  }

  // e_big and e_mid clear the threshold by hundreds; e_small cannot.
  std::set<std::string> names;
  for (const ReportRow& row : report.rows) names.insert(row.element);
  CHECK(names == std::set<std::string>{"e_big", "e_mid"});

  // Growth indexes: ~100 * 300/150 and ~100 * 200/250 up to noise. The
  // loosest useful bound at scale 5/3 noise is +-10 points.
  for (const ReportRow& row : report.rows) {
    if (row.element == "e_big") CHECK(std::abs(*row.value - 200.0) < 10.0);
    if (row.element == "e_mid") CHECK(std::abs(*row.value - 80.0) < 10.0);
  }

  CHECK(report.cost.epsilon == 1.2);
  CHECK(report.cost.delta == 1e-10);
  const std::vector<BudgetEntry> entries = ledger.snapshot();
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].mechanism == MechanismKind::UnknownLaplaceTopK);
  CHECK(entries[0].epsilon == 0.6);
  CHECK(entries[0].delta == 1e-10);
  CHECK_FALSE(entries[0].conditional);
  CHECK(entries[1].mechanism == MechanismKind::KnownLaplace);
  CHECK(entries[1].delta == 0.0);
}

TEST_CASE("an empty window still debits the budget and reports honestly") {
  BudgetLedger ledger;
  const ReportConfig config = default_report_config(Metric::Employers, kUs);
  const RankedReport report = who_is_hiring({}, config, 1, ledger);
  CHECK(report.status == ReportStatus::InsufficientData);
  CHECK(report.rows.empty());
  CHECK(report.cost.epsilon == 1.2);
  CHECK(ledger.snapshot().size() == 2);
}

TEST_CASE("report functions reject mismatched configs") {
  BudgetLedger ledger;
  ReportConfig wrong_metric = default_report_config(Metric::Jobs, kUs);
  CHECK_THROWS_AS(who_is_hiring({}, wrong_metric, 1, ledger),
                  std::invalid_argument);
  ReportConfig no_denominator = default_report_config(Metric::Employers, kUs);
  no_denominator.params_denominator.reset();
  CHECK_THROWS_AS(who_is_hiring({}, no_denominator, 1, ledger),
                  std::invalid_argument);
  ReportConfig employers = default_report_config(Metric::Employers, kUs);
  CHECK_THROWS_AS(jobs_available({}, employers, 1, ledger),
                  std::invalid_argument);
  CHECK(ledger.snapshot().empty());
}

TEST_CASE("single-hire enforcement changes which employers survive") {
  // Every member is hired at e_first and then at e_second inside the same
  // window; enforcement credits only the earlier hire.
  std::vector<HireEvent> events;
  for (int i = 0; i < 300; ++i) {
    const std::string m = "m" + std::to_string(i);
    events.push_back(hire(m, "e_first", "t1", "2026-04-10"));
    events.push_back(hire(m, "e_second", "t1", "2026-06-20"));
  }
  // Previous-window volume so growth denominators exist.
  for (int i = 0; i < 100; ++i) {
    const std::string m = "p" + std::to_string(i);
    events.push_back(hire(m, "e_first", "t1", "2026-02-10"));
    events.push_back(hire(m, "e_second", "t1", "2026-03-10"));
  }

  ReportConfig config = default_report_config(Metric::Employers, kUs);
  BudgetLedger ledger;
  const RankedReport both = who_is_hiring(events, config, 7, ledger);
  std::set<std::string> names;
  for (const ReportRow& row : both.rows) names.insert(row.element);
  CHECK(names == std::set<std::string>{"e_first", "e_second"});

  config.enforce_single_hire = true;
  const RankedReport first_only = who_is_hiring(events, config, 7, ledger);
  REQUIRE(first_only.rows.size() == 1);
  CHECK(first_only.rows[0].element == "e_first");
}

TEST_CASE("the jobs report replays exactly and shares sum sensibly") {
  const std::vector<HireEvent> events = synthetic_hires({
      {"e1", {220, 200}},
      {"e2", {180, 160}},
      {"e3", {100, 90}},
  });
  // synthetic_hires derives one title per employer block, so titles have
  // the same distinct-member counts as their employers.
  const uint64_t seed = 424242;
  const ReportConfig config = default_report_config(Metric::Jobs, kUs);
  BudgetLedger ledger;
  const RankedReport report = jobs_available(events, config, seed, ledger);

  const std::vector<HireEvent> current = window(events, kJune, 3);
  const Histogram hist = truncate_top_dbar(job_histogram(current, kUs), 1000);
  const TopKResult topk = unknown_domain_laplace_topk(
      hist, config.params_topk,
      RandomStream(seed, derive_stream_id(kUs, Metric::Jobs, "topk")));
  RandomStream denominator_stream(
      seed, derive_stream_id(kUs, Metric::Jobs, "denominator"));
  const double noisy_total =
      static_cast<double>(distinct_members(current, kUs)) +
      laplace_sample(denominator_stream, 1.0 / 0.6);
  const std::vector<ReportRow> expected = share_rows(topk, noisy_total);

  REQUIRE(report.rows.size() == expected.size());
  for (size_t i = 0; i < expected.size(); ++i) {
    CHECK(report.rows[i].rank == expected[i].rank);
    CHECK(report.rows[i].element == expected[i].element);
    CHECK(report.rows[i].value == expected[i].value);
  }

  // 500 distinct current members; all three titles released; shares track
  // 44%, 36%, 20% within noise (|noise| < 10 counts with overwhelming
  // probability, so shares move by under two points).
  REQUIRE(report.rows.size() == 3);
  double total_share = 0.0;
  for (const ReportRow& row : report.rows) total_share += *row.value;
  CHECK(std::abs(total_share - 100.0) < 5.0);

  const std::vector<BudgetEntry> entries = ledger.snapshot();
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].metric == Metric::Jobs);
  CHECK(entries[1].mechanism == MechanismKind::KnownLaplace);
  CHECK(report.cost.epsilon == 1.2);
}

TEST_CASE("the skills report replays exactly and stays rank-only") {
  std::vector<SkillRecord> records;
  int member = 0;
  auto add = [&](const std::string& title, const std::string& sk, int count) {
    for (int i = 0; i < count; ++i) {
      records.push_back(skill("m" + std::to_string(++member), title, sk,
                              i % 2 ? "2024-06-15" : "2025-11-01"));
    }
  };
  add("t_eng", "s_dominant", 600);
  add("t_eng", "s_mid", 400);
  add("t_ops", "s_mid", 150);
  add("t_eng", "s_rare", 3);
  add("t_other", "s_elsewhere", 500);  // title the jobs report did not release

  RankedReport jobs;
  jobs.metric = Metric::Jobs;
  jobs.slice = kUs;
  jobs.rows = {{1, "t_eng", 60.0}, {2, "t_ops", 25.0}};
  jobs.status = ReportStatus::Ok;
  jobs.cost = {1.2, 1e-10};

  const uint64_t seed = 20260816;
  const ReportConfig config = default_report_config(Metric::Skills, kUs);
  BudgetLedger ledger;
  const RankedReport report =
      skills_needed(records, jobs, config, seed, ledger);

  // Replay.
  std::vector<SkillRecord> corpus;
  for (const SkillRecord& r : window(records, kJune, 60)) {
    if (in_slice(r, kUs)) corpus.push_back(r);
  }
  const Histogram hist = truncate_top_dbar(
      skill_histogram(corpus, kUs, {"t_eng", "t_ops"}, 5), 1000);
  const TopKResult topk = unknown_domain_gumbel_topk(
      hist, config.params_topk,
      RandomStream(seed, derive_stream_id(kUs, Metric::Skills, "topk")));
  REQUIRE(report.rows.size() == topk.rows.size());
  for (size_t i = 0; i < topk.rows.size(); ++i) {
    CHECK(report.rows[i].element == topk.rows[i].element);
    CHECK(report.rows[i].rank == static_cast<int>(i) + 1);
    CHECK_FALSE(report.rows[i].value.has_value());
  }

  // 600 clears the ~261 threshold comfortably; the dominant skill leads.
  REQUIRE_FALSE(report.rows.empty());
  CHECK(report.rows[0].element == "s_dominant");
  for (const ReportRow& row : report.rows) {
    CHECK(row.element != "s_elsewhere");
    CHECK(row.element != "s_rare");
  }

  CHECK(report.status == ReportStatus::Ok);
  CHECK_FALSE(report.non_dp_preprocessing);
  CHECK(report.cost.epsilon == 0.1);
  CHECK(report.cost.delta == 1e-10);
  const std::vector<BudgetEntry> entries = ledger.snapshot();
  REQUIRE(entries.size() == 1);
  CHECK(entries[0].mechanism == MechanismKind::UnknownGumbelTopK);
  CHECK(entries[0].conditional);
}

TEST_CASE("the dominant skill wins rank one across many seeds") {
  std::vector<SkillRecord> records;
  int member = 0;
  for (int i = 0; i < 600; ++i) {
    records.push_back(
        skill("m" + std::to_string(++member), "t1", "s_dominant", "2025-03-01"));
  }
  for (int i = 0; i < 400; ++i) {
    records.push_back(
        skill("m" + std::to_string(++member), "t1", "s_mid", "2025-03-01"));
  }
  RankedReport jobs;
  jobs.metric = Metric::Jobs;
  jobs.slice = kUs;
  jobs.rows = {{1, "t1", 50.0}};
  jobs.status = ReportStatus::Ok;

  const ReportConfig config = default_report_config(Metric::Skills, kUs);
  for (uint64_t seed = 0; seed < 200; ++seed) {
    BudgetLedger ledger;
    const RankedReport report =
        skills_needed(records, jobs, config, seed, ledger);
    REQUIRE_FALSE(report.rows.empty());
    CHECK(report.rows[0].element == "s_dominant");
  }
}

TEST_CASE("the idf prefilter flags the report and filters the corpus") {
  std::vector<SkillRecord> records;
  int member = 0;
  auto add = [&](const std::string& title, const std::string& sk, int count) {
    for (int i = 0; i < count; ++i) {
      records.push_back(
          skill("m" + std::to_string(++member), title, sk, "2025-05-01"));
    }
  };
  // s_everywhere appears under all three titles (idf 0); s_special under
  // one (idf ln 3).
  add("t1", "s_everywhere", 400);
  add("t2", "s_everywhere", 350);
  add("t3", "s_everywhere", 300);
  add("t1", "s_special", 320);

  RankedReport jobs;
  jobs.metric = Metric::Jobs;
  jobs.slice = kUs;
  jobs.rows = {{1, "t1", 40.0}, {2, "t2", 30.0}, {3, "t3", 20.0}};
  jobs.status = ReportStatus::Ok;

  ReportConfig config = default_report_config(Metric::Skills, kUs);
  BudgetLedger ledger;
  const RankedReport unfiltered =
      skills_needed(records, jobs, config, 5, ledger);
  CHECK_FALSE(unfiltered.non_dp_preprocessing);
  std::set<std::string> names;
  for (const ReportRow& row : unfiltered.rows) names.insert(row.element);
  CHECK(names == std::set<std::string>{"s_everywhere", "s_special"});

  config.tfidf_threshold = 0.5;
  const RankedReport filtered = skills_needed(records, jobs, config, 5, ledger);
  CHECK(filtered.non_dp_preprocessing);
  names.clear();
  for (const ReportRow& row : filtered.rows) names.insert(row.element);
  CHECK(names == std::set<std::string>{"s_special"});

  // A threshold of zero (or below) is ignored entirely.
  config.tfidf_threshold = 0.0;
  CHECK_FALSE(skills_needed(records, jobs, config, 5, ledger)
                  .non_dp_preprocessing);
}

TEST_CASE("an empty jobs report short-circuits the skills report for free") {
  RankedReport jobs;
  jobs.metric = Metric::Jobs;
  jobs.slice = kUs;
  jobs.status = ReportStatus::InsufficientData;

  BudgetLedger ledger;
  const ReportConfig config = default_report_config(Metric::Skills, kUs);
  const RankedReport report = skills_needed({}, jobs, config, 1, ledger);
  CHECK(report.status == ReportStatus::InsufficientData);
  CHECK(report.rows.empty());
  CHECK(report.cost.epsilon == 0.0);
  CHECK(report.cost.delta == 0.0);
  CHECK(ledger.snapshot().empty());
}

TEST_CASE("skills reject mismatched jobs reports") {
  BudgetLedger ledger;
  const ReportConfig config = default_report_config(Metric::Skills, kUs);

  RankedReport not_jobs;
  not_jobs.metric = Metric::Employers;
  not_jobs.slice = kUs;
  not_jobs.rows = {{1, "e1", 100.0}};
  CHECK_THROWS_AS(skills_needed({}, not_jobs, config, 1, ledger),
                  std::invalid_argument);

  RankedReport other_slice;
  other_slice.metric = Metric::Jobs;
  other_slice.slice = {kJune, "us", "ca", std::nullopt};
  other_slice.rows = {{1, "t1", 100.0}};
  CHECK_THROWS_AS(skills_needed({}, other_slice, config, 1, ledger),
                  std::invalid_argument);
  CHECK(ledger.snapshot().empty());
}
