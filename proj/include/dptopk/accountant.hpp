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

#include <mutex>
#include <string>
#include <vector>

#include "dptopk/types.hpp"

namespace dptopk {

enum class MechanismKind {
  KnownLaplace,
  KnownGumbelTopK,
  UnknownLaplaceTopK,
  UnknownGumbelTopK,
};

std::string to_string(MechanismKind kind);
MechanismKind parse_mechanism_kind(const std::string& name);

// One recorded mechanism invocation. conditional marks a release that only
// runs when an upstream release succeeded; its cost still counts whenever
// the entry exists, the flag is bookkeeping for review.
struct BudgetEntry {
  SliceKey slice;
  Metric metric = Metric::Employers;
  MechanismKind mechanism = MechanismKind::UnknownLaplaceTopK;
  double epsilon = 0.0;
  double delta = 0.0;
  bool conditional = false;
};

// Append-only record of every mechanism invocation in a run. Threads
// record concurrently; reads go through snapshot().
class BudgetLedger {
 public:
  void record(BudgetEntry entry);
  void append(const std::vector<BudgetEntry>& entries);
  std::vector<BudgetEntry> snapshot() const;

 private:
  mutable std::mutex mutex_;
  std::vector<BudgetEntry> entries_;
};

// Sequential composition: (eps, delta) pairs add. Throws
// std::invalid_argument on an empty list or on any invalid pair.
Cost compose_sequential(const std::vector<Cost>& costs);

// Worst-case cost any single contributor's data pays across a date's
// releases of one metric. A contributor's events sit at one concrete
// (country, region, industry) locus and are touched by every slice that
// covers the locus (slice fields each absent or equal), so the cost is
// the maximum over loci of the covering entries' composed total.
// Candidate loci are enumerated from the entries themselves. Returns
// (0, 0) when the date has no entries for the metric.
Cost date_cost(const std::vector<BudgetEntry>& entries, YearMonth date,
               Metric metric);

}  // namespace dptopk
