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

#include "dptopk/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dptopk {

std::string to_string(Metric m) {
  switch (m) {
    case Metric::Employers:
      return "employers";
    case Metric::Jobs:
      return "jobs";
    case Metric::Skills:
      return "skills";
  }
  throw std::invalid_argument("unknown metric value");
}

Metric parse_metric(const std::string& name) {
  if (name == "employers") return Metric::Employers;
  if (name == "jobs") return Metric::Jobs;
  if (name == "skills") return Metric::Skills;
  throw std::invalid_argument("unknown metric '" + name +
                              "' (expected employers, jobs, or skills)");
}

std::string to_string(ReportStatus s) {
  switch (s) {
    case ReportStatus::Ok:
      return "ok";
    case ReportStatus::InsufficientData:
      return "insufficient_data";
  }
  throw std::invalid_argument("unknown report status value");
}

std::string SliceKey::tag() const {
  std::string out = to_string(report_date);
  out += '|';
  out += country;
  out += '|';
  if (region) out += *region;
  out += '|';
  if (industry) out += *industry;
  return out;
}

std::vector<std::string> validate_params(const PrivacyParams& p) {
  std::vector<std::string> violations;
  if (!(p.epsilon > 0.0) || !std::isfinite(p.epsilon)) {
    violations.push_back("epsilon must be finite and positive");
  }
  if (!(p.delta >= 0.0) || p.delta >= 1.0) {
    violations.push_back("delta must lie in [0,1)");
  }
  if (p.l0_sensitivity && *p.l0_sensitivity < 1) {
    violations.push_back("l0_sensitivity must be at least 1 when present");
  }
  if (p.fetch_limit < 1) {
    violations.push_back("fetch_limit must be at least 1");
  }
  if (p.k < 1) {
    violations.push_back("k must be at least 1");
  } else if (p.k > p.fetch_limit) {
    violations.push_back("k must not exceed fetch_limit");
  }
  return violations;
}

std::vector<std::string> validate_histogram(const Histogram& h) {
  std::vector<std::string> violations;
  if (h.slice.country.empty()) {
    violations.push_back("slice country must be non-empty");
  }
  if (!is_valid_year_month(h.slice.report_date)) {
    violations.push_back("slice report_date is not a valid year-month");
  }
  for (const auto& [element, count] : h.elements) {
    if (element.empty()) {
      violations.push_back("histogram contains an empty element id");
    }
    if (count < 0) {
      violations.push_back("element '" + element + "' has negative count " +
                           std::to_string(count));
    } else if (count == 0 && h.domain_kind == DomainKind::Unknown) {
      // An unknown domain is read off the data; a zero-count element
      // claims presence without evidence.
      violations.push_back("zero count in unknown domain for element '" +
                           element + "'");
    }
  }
  if (h.l0_bound && *h.l0_bound < 1) {
    violations.push_back("l0_bound must be at least 1 when present");
  }
  return violations;
}

std::vector<std::string> validate_histogram(
    const Histogram& h, const std::vector<std::string>& declared_domain) {
  std::vector<std::string> violations = validate_histogram(h);
  if (h.domain_kind != DomainKind::Known) {
    violations.push_back("declared domain given but histogram is not known-domain");
  }
  // A known-domain histogram must carry exactly the declared domain,
  // zero-count elements included.
  for (const auto& [element, count] : h.elements) {
    (void)count;
    if (std::find(declared_domain.begin(), declared_domain.end(), element) ==
        declared_domain.end()) {
      violations.push_back("element '" + element +
                           "' is not in the declared domain");
    }
  }
  for (const std::string& element : declared_domain) {
    if (h.elements.count(element) == 0) {
      violations.push_back("declared domain element '" + element +
                           "' is missing from the histogram");
    }
  }
  return violations;
}

}  // namespace dptopk
