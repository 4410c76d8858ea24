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

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dptopk/dates.hpp"

namespace dptopk {

enum class Metric { Employers, Jobs, Skills };

std::string to_string(Metric m);
Metric parse_metric(const std::string& name);  // throws std::invalid_argument

// One report cell: a month plus a geographic/industry slice. Region and
// industry are optional refinements; an absent field means the slice
// aggregates over it.
struct SliceKey {
  YearMonth report_date;
  std::string country;
  std::optional<std::string> region;
  std::optional<std::string> industry;

  // Canonical form "YYYY-MM|country|region|industry" with absent fields
  // rendered empty. Used for stream-id derivation and map keys, so it must
  // never change shape.
  std::string tag() const;

  auto operator<=>(const SliceKey&) const = default;
};

enum class DomainKind {
  // Element universe fixed in advance and independent of the data; every
  // domain element may appear in the output, including zero-count ones.
  Known,
  // Element universe read off the data itself; releasing an element name
  // leaks its presence, so mechanisms must threshold.
  Unknown,
};

// Aggregated per-element contributor counts for one slice.
// elements maps element id to the number of distinct contributors, so the
// per-element sensitivity to one contributor's change is 1 (kLinfBound).
// l0_bound, when set, promises one contributor touches at most that many
// elements; unknown-domain inputs without a bound are treated as
// unrestricted.
struct Histogram {
  SliceKey slice;
  std::map<std::string, int64_t> elements;
  DomainKind domain_kind = DomainKind::Unknown;
  std::optional<int64_t> l0_bound;

  static constexpr int64_t kLinfBound = 1;
};

// Parameters one mechanism invocation consumes.
struct PrivacyParams {
  double epsilon = 0.0;
  double delta = 0.0;
  // Per-contributor element bound the noise scale divides by. Required by
  // the Laplace-noise mechanisms; the Gumbel ones calibrate to epsilon
  // alone and ignore it.
  std::optional<int64_t> l0_sensitivity;
  // Candidate cap applied upstream of unknown-domain mechanisms.
  int64_t fetch_limit = 1000;
  int64_t k = 20;
};

struct Cost {
  double epsilon = 0.0;
  double delta = 0.0;
};

enum class ReportStatus { Ok, InsufficientData };

std::string to_string(ReportStatus s);

struct ReportRow {
  int rank = 0;
  std::string element;
  // Published numeric column. Absent when the mechanism releases ranks
  // only (rank-only outputs carry no counts).
  std::optional<double> value;
};

struct RankedReport {
  Metric metric = Metric::Employers;
  SliceKey slice;
  std::vector<ReportRow> rows;
  ReportStatus status = ReportStatus::Ok;
  Cost cost;
  // True when a non-private heuristic filter ran before the mechanism.
  // Flagged on the report because such preprocessing sits outside the
  // stated privacy guarantee.
  bool non_dp_preprocessing = false;
};

// Each validator returns human-readable violations; empty means valid.
std::vector<std::string> validate_params(const PrivacyParams& p);
std::vector<std::string> validate_histogram(const Histogram& h);
// Known-domain variant: additionally checks every histogram element is a
// member of the declared domain.
std::vector<std::string> validate_histogram(
    const Histogram& h, const std::vector<std::string>& declared_domain);

}  // namespace dptopk
