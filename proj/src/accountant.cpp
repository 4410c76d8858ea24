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

#include "dptopk/accountant.hpp"

#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>

namespace dptopk {

std::string to_string(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::KnownLaplace:
      return "known_laplace";
    case MechanismKind::KnownGumbelTopK:
      return "known_gumbel_topk";
    case MechanismKind::UnknownLaplaceTopK:
      return "unknown_laplace_topk";
    case MechanismKind::UnknownGumbelTopK:
      return "unknown_gumbel_topk";
  }
  throw std::invalid_argument("unknown mechanism kind value");
}

MechanismKind parse_mechanism_kind(const std::string& name) {
  if (name == "known_laplace") return MechanismKind::KnownLaplace;
  if (name == "known_gumbel_topk") return MechanismKind::KnownGumbelTopK;
  if (name == "unknown_laplace_topk") return MechanismKind::UnknownLaplaceTopK;
  if (name == "unknown_gumbel_topk") return MechanismKind::UnknownGumbelTopK;
  throw std::invalid_argument("unknown mechanism kind '" + name + "'");
}

void BudgetLedger::record(BudgetEntry entry) {
  std::lock_guard<std::mutex> lock(mutex_);
  entries_.push_back(std::move(entry));
}

void BudgetLedger::append(const std::vector<BudgetEntry>& entries) {
  std::lock_guard<std::mutex> lock(mutex_);
  entries_.insert(entries_.end(), entries.begin(), entries.end());
}

std::vector<BudgetEntry> BudgetLedger::snapshot() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_;
}

Cost compose_sequential(const std::vector<Cost>& costs) {
  if (costs.empty()) {
    throw std::invalid_argument(
        "compose_sequential: cost list must be non-empty");
  }
  Cost total;
  for (const Cost& c : costs) {
    if (!(c.epsilon > 0.0) || !std::isfinite(c.epsilon)) {
      throw std::invalid_argument(
          "compose_sequential: each epsilon must be finite and positive");
    }
    if (!(c.delta >= 0.0) || c.delta >= 1.0) {
      throw std::invalid_argument(
          "compose_sequential: each delta must lie in [0,1)");
    }
    total.epsilon += c.epsilon;
    total.delta += c.delta;
  }
  return total;
}

namespace {

// A concrete point in (country, region, industry) space; absent means the
// contributor genuinely lacks the attribute, not "any".
struct Locus {
  std::string country;
  std::optional<std::string> region;
  std::optional<std::string> industry;

  auto operator<=>(const Locus&) const = default;
};

bool covers(const SliceKey& slice, const Locus& locus) {
  if (slice.country != locus.country) return false;
  if (slice.region && slice.region != locus.region) return false;
  if (slice.industry && slice.industry != locus.industry) return false;
  return true;
}

}  // namespace

Cost date_cost(const std::vector<BudgetEntry>& entries, YearMonth date,
               Metric metric) {
  std::vector<const BudgetEntry*> dated;
  for (const BudgetEntry& e : entries) {
    if (e.slice.report_date == date && e.metric == metric) dated.push_back(&e);
  }
  if (dated.empty()) return {0.0, 0.0};

  // The worst locus agrees with some entry on every present field, so
  // combinations of observed values per country exhaust the candidates.
  std::set<std::string> countries;
  for (const BudgetEntry* e : dated) countries.insert(e->slice.country);

  Cost worst{0.0, 0.0};
  for (const std::string& country : countries) {
    std::set<std::optional<std::string>> regions{std::nullopt};
    std::set<std::optional<std::string>> industries{std::nullopt};
    for (const BudgetEntry* e : dated) {
      if (e->slice.country != country) continue;
      if (e->slice.region) regions.insert(e->slice.region);
      if (e->slice.industry) industries.insert(e->slice.industry);
    }
    for (const auto& region : regions) {
      for (const auto& industry : industries) {
        const Locus locus{country, region, industry};
        Cost at_locus{0.0, 0.0};
        for (const BudgetEntry* e : dated) {
          if (!covers(e->slice, locus)) continue;
          at_locus.epsilon += e->epsilon;
          at_locus.delta += e->delta;
        }
        if (at_locus.epsilon > worst.epsilon ||
            (at_locus.epsilon == worst.epsilon &&
             at_locus.delta > worst.delta)) {
          worst = at_locus;
        }
      }
    }
  }
  return worst;
}

}  // namespace dptopk
