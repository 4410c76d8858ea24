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

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dptopk/accountant.hpp"
#include "dptopk/audit.hpp"
#include "dptopk/ingest.hpp"
#include "dptopk/types.hpp"

namespace dptopk {

// Ordered JSON keeps field order stable, which the byte-identical
// reproducibility contract depends on.
using ojson = nlohmann::ordered_json;

// Percentages are rounded to 2 decimals at this boundary only; internal
// math always runs on unrounded values.
double round2(double value);

ojson slice_json(const SliceKey& slice);
SliceKey slice_from_json(const ojson& j);

// Report JSON schema (top-level field names are a published contract):
// metric, slice, rows, status, epsilon, delta. A non_dp_preprocessing
// flag is appended only when true. Rank-only rows omit "value".
ojson report_json(const RankedReport& report);
RankedReport report_from_json(const ojson& j);

// CSV rendering: header "rank,element,value", one row per rank, value
// blank for rank-only rows.
std::string report_csv(const RankedReport& report);

// {date}_{country}[_{region}][_{industry}]_{metric}, extension added by
// the caller.
std::string report_basename(const RankedReport& report);

ojson histogram_json(const Histogram& hist);
Histogram histogram_from_json(const ojson& j);

ojson budget_entry_json(const BudgetEntry& entry);
BudgetEntry budget_entry_from_json(const ojson& j);

// Ledger persistence: one JSON object per line, append-only.
void append_ledger_file(const std::filesystem::path& path,
                        const std::vector<BudgetEntry>& entries);
std::vector<BudgetEntry> read_ledger_file(const std::filesystem::path& path);

ojson audit_verdict_json(const AuditVerdict& verdict);
ojson sampler_verdict_json(const SamplerVerdict& verdict);
ojson fabrication_verdict_json(const FabricationVerdict& verdict);

ojson privacy_params_json(const PrivacyParams& params);

}  // namespace dptopk
