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

#include "dptopk/reports.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "dptopk/noise.hpp"

namespace dptopk {

namespace {

constexpr double kEmployersJobsEpsilon = 0.6;
constexpr double kEmployersJobsDelta = 1e-10;
constexpr double kSkillsEpsilon = 0.1;
constexpr double kSkillsDelta = 1e-10;
constexpr int64_t kFetchLimit = 1000;
constexpr int64_t kTopK = 20;

// Denominators are clamped here before division; a noisy total can come
// out nonpositive and the clamp keeps values finite. Post-processing only,
// so no privacy cost.
double floored(double denominator) { return std::max(denominator, 1.0); }

void require_metric(const ReportConfig& config, Metric expected,
                    const char* fn) {
  if (config.metric != expected) {
    throw std::invalid_argument(std::string(fn) + ": config.metric must be " +
                                to_string(expected));
  }
}

std::vector<std::string> released_elements(const TopKResult& topk) {
  std::vector<std::string> elements;
  elements.reserve(topk.rows.size());
  for (const TopKRow& row : topk.rows) elements.push_back(row.element);
  return elements;
}

std::vector<HireEvent> windowed_events(const std::vector<HireEvent>& events,
                                       YearMonth report_date,
                                       const ReportConfig& config) {
  std::vector<HireEvent> current =
      window(events, report_date, config.months_back);
  if (config.enforce_single_hire) current = enforce_single_hire(current);
  return current;
}

}  // namespace

ReportConfig default_report_config(Metric metric, SliceKey slice) {
  ReportConfig config;
  config.metric = metric;
  config.slice = std::move(slice);
  config.params_topk.fetch_limit = kFetchLimit;
  config.params_topk.k = kTopK;
  switch (metric) {
    case Metric::Employers:
    case Metric::Jobs: {
      config.params_topk.epsilon = kEmployersJobsEpsilon;
      config.params_topk.delta = kEmployersJobsDelta;
      config.params_topk.l0_sensitivity = 1;
      PrivacyParams denominator;
      denominator.epsilon = kEmployersJobsEpsilon;
      denominator.delta = 0.0;
      denominator.l0_sensitivity = 1;
      denominator.fetch_limit = kFetchLimit;
      denominator.k = kTopK;
      config.params_denominator = denominator;
      break;
    }
    case Metric::Skills: {
      config.params_topk.epsilon = kSkillsEpsilon;
      config.params_topk.delta = kSkillsDelta;
      break;
    }
  }
  return config;
}

uint64_t derive_stream_id(const SliceKey& slice, Metric metric,
                          std::string_view purpose) {
  std::string material = "slice:";
  material += slice.tag();
  material += ";metric:";
  material += to_string(metric);
  material += ";purpose:";
  material += purpose;
  return fnv1a64(material);
}

std::vector<ReportRow> growth_rows(
    const TopKResult& topk, const std::map<std::string, double>& noisy_previous) {
  if (!topk.released_counts) {
    throw std::invalid_argument(
        "growth_rows: top-k result must carry noisy counts");
  }
  std::vector<ReportRow> rows;
  rows.reserve(topk.rows.size());
  int rank = 0;
  for (const TopKRow& row : topk.rows) {
    auto previous = noisy_previous.find(row.element);
    if (previous == noisy_previous.end()) {
      throw std::invalid_argument(
          "growth_rows: no previous-window value for element '" + row.element +
          "'");
    }
    rows.push_back(
        {++rank, row.element, 100.0 * *row.noisy_count / floored(previous->second)});
  }
  return rows;
}

std::vector<ReportRow> share_rows(const TopKResult& topk, double noisy_total) {
  if (!topk.released_counts) {
    throw std::invalid_argument(
        "share_rows: top-k result must carry noisy counts");
  }
  std::vector<ReportRow> rows;
  rows.reserve(topk.rows.size());
  int rank = 0;
  for (const TopKRow& row : topk.rows) {
    rows.push_back(
        {++rank, row.element, 100.0 * *row.noisy_count / floored(noisy_total)});
  }
  return rows;
}

RankedReport who_is_hiring(const std::vector<HireEvent>& events,
                           const ReportConfig& config, uint64_t root_seed,
                           BudgetLedger& ledger) {
  require_metric(config, Metric::Employers, "who_is_hiring");
  if (!config.params_denominator) {
    throw std::invalid_argument(
        "who_is_hiring: params_denominator is required for the companion "
        "release");
  }

  const std::vector<HireEvent> current =
      windowed_events(events, config.slice.report_date, config);
  const Histogram hist = truncate_top_dbar(
      employer_histogram(current, config.slice), config.params_topk.fetch_limit);
  RandomStream topk_stream(
      root_seed, derive_stream_id(config.slice, config.metric, "topk"));
  const TopKResult topk =
      unknown_domain_laplace_topk(hist, config.params_topk, topk_stream);

  // Companion release: previous-window counts for exactly the employers
  // the top-k released. The released list is privatized output, so it is a
  // legitimate known domain.
  const YearMonth previous_date =
      add_months(config.slice.report_date, -config.months_back);
  const std::vector<HireEvent> previous =
      windowed_events(events, previous_date, config);
  const Histogram previous_hist = employer_histogram_for_domain(
      previous, config.slice, released_elements(topk));
  RandomStream companion_stream(
      root_seed, derive_stream_id(config.slice, config.metric, "companion"));
  const std::map<std::string, double> noisy_previous = known_domain_laplace(
      previous_hist, *config.params_denominator, companion_stream);

  RankedReport report;
  report.metric = config.metric;
  report.slice = config.slice;
  report.rows = growth_rows(topk, noisy_previous);
  report.status =
      report.rows.empty() ? ReportStatus::InsufficientData : ReportStatus::Ok;

  // Both releases ran, so both are debited even when nothing survived the
  // threshold.
  const BudgetEntry topk_entry{config.slice,
                               config.metric,
                               MechanismKind::UnknownLaplaceTopK,
                               config.params_topk.epsilon,
                               config.params_topk.delta,
                               false};
  const BudgetEntry companion_entry{config.slice,
                                    config.metric,
                                    MechanismKind::KnownLaplace,
                                    config.params_denominator->epsilon,
                                    config.params_denominator->delta,
                                    false};
  ledger.record(topk_entry);
  ledger.record(companion_entry);
  report.cost = compose_sequential({{topk_entry.epsilon, topk_entry.delta},
                                    {companion_entry.epsilon, companion_entry.delta}});
  return report;
}

RankedReport jobs_available(const std::vector<HireEvent>& events,
                            const ReportConfig& config, uint64_t root_seed,
                            BudgetLedger& ledger) {
  require_metric(config, Metric::Jobs, "jobs_available");
  if (!config.params_denominator) {
    throw std::invalid_argument(
        "jobs_available: params_denominator is required for the total "
        "release");
  }

  const std::vector<HireEvent> current =
      windowed_events(events, config.slice.report_date, config);
  const Histogram hist = truncate_top_dbar(job_histogram(current, config.slice),
                                           config.params_topk.fetch_limit);
  RandomStream topk_stream(
      root_seed, derive_stream_id(config.slice, config.metric, "topk"));
  const TopKResult topk =
      unknown_domain_laplace_topk(hist, config.params_topk, topk_stream);

  // Noisy denominator: distinct members in the window get Laplace noise at
  // the same scale as the numerators, then the share division is pure
  // post-processing.
  const PrivacyParams& denom = *config.params_denominator;
  if (!denom.l0_sensitivity) {
    throw std::invalid_argument(
        "jobs_available: params_denominator.l0_sensitivity is required");
  }
  RandomStream denominator_stream(
      root_seed, derive_stream_id(config.slice, config.metric, "denominator"));
  const double noisy_total =
      static_cast<double>(distinct_members(current, config.slice)) +
      laplace_sample(denominator_stream,
                     static_cast<double>(*denom.l0_sensitivity) / denom.epsilon);

  RankedReport report;
  report.metric = config.metric;
  report.slice = config.slice;
  report.rows = share_rows(topk, noisy_total);
  report.status =
      report.rows.empty() ? ReportStatus::InsufficientData : ReportStatus::Ok;

  const BudgetEntry topk_entry{config.slice,
                               config.metric,
                               MechanismKind::UnknownLaplaceTopK,
                               config.params_topk.epsilon,
                               config.params_topk.delta,
                               false};
  const BudgetEntry total_entry{config.slice,
                                config.metric,
                                MechanismKind::KnownLaplace,
                                denom.epsilon,
                                denom.delta,
                                false};
  ledger.record(topk_entry);
  ledger.record(total_entry);
  report.cost = compose_sequential({{topk_entry.epsilon, topk_entry.delta},
                                    {total_entry.epsilon, total_entry.delta}});
  return report;
}

RankedReport skills_needed(const std::vector<SkillRecord>& skill_records,
                           const RankedReport& jobs_report,
                           const ReportConfig& config, uint64_t root_seed,
                           BudgetLedger& ledger) {
  require_metric(config, Metric::Skills, "skills_needed");
  if (jobs_report.metric != Metric::Jobs) {
    throw std::invalid_argument(
        "skills_needed: jobs_report must be a jobs report");
  }
  if (jobs_report.slice != config.slice) {
    throw std::invalid_argument(
        "skills_needed: jobs_report slice does not match the requested slice");
  }

  RankedReport report;
  report.metric = config.metric;
  report.slice = config.slice;

  // No released jobs means no safe candidate set; bail out before any
  // budget is spent.
  if (jobs_report.rows.empty()) {
    report.status = ReportStatus::InsufficientData;
    return report;
  }

  std::vector<std::string> top_jobs;
  top_jobs.reserve(jobs_report.rows.size());
  for (const ReportRow& row : jobs_report.rows) top_jobs.push_back(row.element);

  // The prefilter corpus is the data this report reads: the slice's
  // records over the skill window.
  std::vector<SkillRecord> corpus;
  for (const SkillRecord& r :
       window(skill_records, config.slice.report_date,
              config.skill_years_back * 12)) {
    if (in_slice(r, config.slice)) corpus.push_back(r);
  }
  if (config.tfidf_threshold && *config.tfidf_threshold > 0.0) {
    corpus = tfidf_prefilter(corpus, *config.tfidf_threshold);
    report.non_dp_preprocessing = true;
  }
  Histogram hist = truncate_top_dbar(
      skill_histogram(corpus, config.slice, top_jobs, config.skill_years_back),
      config.params_topk.fetch_limit);

  RandomStream topk_stream(
      root_seed, derive_stream_id(config.slice, config.metric, "topk"));
  const TopKResult topk =
      unknown_domain_gumbel_topk(hist, config.params_topk, topk_stream);

  int rank = 0;
  for (const TopKRow& row : topk.rows) {
    report.rows.push_back({++rank, row.element, std::nullopt});
  }
  report.status =
      report.rows.empty() ? ReportStatus::InsufficientData : ReportStatus::Ok;

  // Conditional: the guarantee is scoped to the privatized jobs input, per
  // the accounting policy for this pipeline.
  const BudgetEntry entry{config.slice,
                          config.metric,
                          MechanismKind::UnknownGumbelTopK,
                          config.params_topk.epsilon,
                          config.params_topk.delta,
                          true};
  ledger.record(entry);
  report.cost = {entry.epsilon, entry.delta};
  return report;
}

}  // namespace dptopk
