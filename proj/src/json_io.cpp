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

#include "dptopk/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace dptopk {

namespace {

std::string format2(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.2f", value);
  return buffer;
}

ReportStatus parse_status(const std::string& name) {
  if (name == "ok") return ReportStatus::Ok;
  if (name == "insufficient_data") return ReportStatus::InsufficientData;
  throw InputError("unknown report status '" + name + "'");
}

// Wraps nlohmann's type errors into InputError so callers see one
// exception family for malformed inputs.
template <typename T>
T get_field(const ojson& j, const char* key) {
  if (!j.contains(key)) {
    throw InputError(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("field '") + key + "': " + ex.what());
  }
}

}  // namespace

double round2(double value) { return std::round(value * 100.0) / 100.0; }

ojson slice_json(const SliceKey& slice) {
  ojson j;
  j["date"] = to_string(slice.report_date);
  j["country"] = slice.country;
  if (slice.region) j["region"] = *slice.region;
  if (slice.industry) j["industry"] = *slice.industry;
  return j;
}

SliceKey slice_from_json(const ojson& j) {
  SliceKey slice;
  try {
    slice.report_date = parse_year_month(get_field<std::string>(j, "date"));
  } catch (const std::invalid_argument& ex) {
    throw InputError(std::string("field 'date': ") + ex.what());
  }
  slice.country = get_field<std::string>(j, "country");
  if (j.contains("region")) slice.region = get_field<std::string>(j, "region");
  if (j.contains("industry")) {
    slice.industry = get_field<std::string>(j, "industry");
  }
  return slice;
}

ojson report_json(const RankedReport& report) {
  ojson j;
  j["metric"] = to_string(report.metric);
  j["slice"] = slice_json(report.slice);
  ojson rows = ojson::array();
  for (const ReportRow& row : report.rows) {
    ojson r;
    r["rank"] = row.rank;
    r["element"] = row.element;
    if (row.value) r["value"] = round2(*row.value);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  j["status"] = to_string(report.status);
  j["epsilon"] = report.cost.epsilon;
  j["delta"] = report.cost.delta;
  if (report.non_dp_preprocessing) j["non_dp_preprocessing"] = true;
  return j;
}

RankedReport report_from_json(const ojson& j) {
  RankedReport report;
  try {
    report.metric = parse_metric(get_field<std::string>(j, "metric"));
  } catch (const std::invalid_argument& ex) {
    throw InputError(ex.what());
  }
  if (!j.contains("slice")) throw InputError("missing field 'slice'");
  report.slice = slice_from_json(j.at("slice"));
  if (!j.contains("rows") || !j.at("rows").is_array()) {
    throw InputError("missing or non-array field 'rows'");
  }
  for (const ojson& r : j.at("rows")) {
    ReportRow row;
    row.rank = get_field<int>(r, "rank");
    row.element = get_field<std::string>(r, "element");
    if (r.contains("value")) row.value = get_field<double>(r, "value");
    report.rows.push_back(std::move(row));
  }
  report.status = parse_status(get_field<std::string>(j, "status"));
  report.cost.epsilon = get_field<double>(j, "epsilon");
  report.cost.delta = get_field<double>(j, "delta");
  if (j.contains("non_dp_preprocessing")) {
    report.non_dp_preprocessing = get_field<bool>(j, "non_dp_preprocessing");
  }
  return report;
}

std::string report_csv(const RankedReport& report) {
  std::string out = "rank,element,value\n";
  for (const ReportRow& row : report.rows) {
    out += std::to_string(row.rank);
    out += ',';
    out += row.element;
    out += ',';
    if (row.value) out += format2(round2(*row.value));
    out += '\n';
  }
  return out;
}

std::string report_basename(const RankedReport& report) {
  std::string name = to_string(report.slice.report_date);
  name += '_';
  name += report.slice.country;
  if (report.slice.region) {
    name += '_';
    name += *report.slice.region;
  }
  if (report.slice.industry) {
    name += '_';
    name += *report.slice.industry;
  }
  name += '_';
  name += to_string(report.metric);
  return name;
}

ojson histogram_json(const Histogram& hist) {
  ojson j;
  j["slice"] = slice_json(hist.slice);
  ojson elements = ojson::object();
  for (const auto& [element, count] : hist.elements) {
    elements[element] = count;
  }
  j["elements"] = std::move(elements);
  j["domain_kind"] = hist.domain_kind == DomainKind::Known ? "known" : "unknown";
  if (hist.l0_bound) j["l0_bound"] = *hist.l0_bound;
  return j;
}

Histogram histogram_from_json(const ojson& j) {
  Histogram hist;
  if (!j.contains("slice")) throw InputError("missing field 'slice'");
  hist.slice = slice_from_json(j.at("slice"));
  if (!j.contains("elements") || !j.at("elements").is_object()) {
    throw InputError("missing or non-object field 'elements'");
  }
  for (const auto& [element, count] : j.at("elements").items()) {
    if (!count.is_number_integer()) {
      throw InputError("element '" + element + "' has a non-integer count");
    }
    hist.elements[element] = count.get<int64_t>();
  }
  const std::string kind = get_field<std::string>(j, "domain_kind");
  if (kind == "known") {
    hist.domain_kind = DomainKind::Known;
  } else if (kind == "unknown") {
    hist.domain_kind = DomainKind::Unknown;
  } else {
    throw InputError("unknown domain_kind '" + kind + "'");
  }
  if (j.contains("l0_bound")) hist.l0_bound = get_field<int64_t>(j, "l0_bound");
  return hist;
}

ojson budget_entry_json(const BudgetEntry& entry) {
  ojson j;
  j["slice"] = slice_json(entry.slice);
  j["metric"] = to_string(entry.metric);
  j["mechanism"] = to_string(entry.mechanism);
  j["epsilon"] = entry.epsilon;
  j["delta"] = entry.delta;
  j["conditional"] = entry.conditional;
  return j;
}

BudgetEntry budget_entry_from_json(const ojson& j) {
  BudgetEntry entry;
  if (!j.contains("slice")) throw InputError("missing field 'slice'");
  entry.slice = slice_from_json(j.at("slice"));
  try {
    entry.metric = parse_metric(get_field<std::string>(j, "metric"));
    entry.mechanism = parse_mechanism_kind(get_field<std::string>(j, "mechanism"));
  } catch (const std::invalid_argument& ex) {
    throw InputError(ex.what());
  }
  entry.epsilon = get_field<double>(j, "epsilon");
  entry.delta = get_field<double>(j, "delta");
  entry.conditional = get_field<bool>(j, "conditional");
  return entry;
}

void append_ledger_file(const std::filesystem::path& path,
                        const std::vector<BudgetEntry>& entries) {
  std::ofstream out(path, std::ios::app);
  if (!out) {
    throw InputError(path.string() + ": cannot open ledger for append");
  }
  for (const BudgetEntry& entry : entries) {
    out << budget_entry_json(entry).dump() << '\n';
  }
  if (!out) {
    throw InputError(path.string() + ": ledger write failed");
  }
}

std::vector<BudgetEntry> read_ledger_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError(path.string() + ": cannot open ledger");
  }
  std::vector<BudgetEntry> entries;
  std::string line;
  long line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    ojson j;
    try {
      j = ojson::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw InputError(path.string() + ":" + std::to_string(line_number) +
                       ": " + ex.what());
    }
    try {
      entries.push_back(budget_entry_from_json(j));
    } catch (const InputError& ex) {
      throw InputError(path.string() + ":" + std::to_string(line_number) +
                       ": " + ex.what());
    }
  }
  return entries;
}

ojson audit_verdict_json(const AuditVerdict& verdict) {
  const auto interval = [](const IntervalEstimate& e) {
    ojson j;
    j["successes"] = e.successes;
    j["trials"] = e.trials;
    j["point"] = e.point;
    j["lo"] = e.lo;
    j["hi"] = e.hi;
    return j;
  };
  ojson j;
  j["event"] = verdict.event_description;
  j["p_base"] = interval(verdict.p_base);
  j["p_neighbor"] = interval(verdict.p_neighbor);
  if (verdict.epsilon_hat) {
    j["epsilon_hat"] = *verdict.epsilon_hat;
  } else {
    j["epsilon_hat"] = nullptr;
  }
  j["declared_epsilon"] = verdict.declared_epsilon;
  j["declared_delta"] = verdict.declared_delta;
  j["conclusive"] = verdict.conclusive;
  j["passes"] = verdict.passes;
  return j;
}

ojson sampler_verdict_json(const SamplerVerdict& verdict) {
  ojson j;
  j["kind"] = verdict.kind == NoiseKind::Laplace ? "laplace" : "gumbel";
  j["scale"] = verdict.scale;
  j["samples"] = verdict.samples;
  j["ks_statistic"] = verdict.ks_statistic;
  j["ks_critical"] = verdict.ks_critical;
  j["sample_mean"] = verdict.sample_mean;
  j["sample_std"] = verdict.sample_std;
  j["expected_mean"] = verdict.expected_mean;
  j["expected_std"] = verdict.expected_std;
  j["mean_tolerance"] = verdict.mean_tolerance;
  j["std_tolerance"] = verdict.std_tolerance;
  j["passes"] = verdict.passes;
  return j;
}

ojson fabrication_verdict_json(const FabricationVerdict& verdict) {
  ojson j;
  j["trials"] = verdict.trials;
  j["fabricating_trials"] = verdict.fabricating_trials;
  j["passes"] = verdict.passes;
  return j;
}

ojson privacy_params_json(const PrivacyParams& params) {
  ojson j;
  j["epsilon"] = params.epsilon;
  j["delta"] = params.delta;
  if (params.l0_sensitivity) j["l0_sensitivity"] = *params.l0_sensitivity;
  j["fetch_limit"] = params.fetch_limit;
  j["k"] = params.k;
  return j;
}

}  // namespace dptopk
