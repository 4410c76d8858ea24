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
#include <string>
#include <vector>

namespace dptopk {

struct SelftestOptions {
  uint64_t seed = 20260816;
  int64_t sampler_samples = 1000000;
  int64_t audit_trials = 50000;
  // Fault-injection hook: every noise draw inside the checked release path
  // and the sampler fits is scaled by this factor while declared scales
  // stay put. 1.0 exercises the production code; anything else must make
  // named checks fail, demonstrating the harness has teeth.
  double noise_scale_multiplier = 1.0;
};

struct CheckResult {
  std::string id;
  bool passed = false;
  std::string detail;
};

// Deterministic health checks: release-threshold constants, sampler
// goodness of fit, a boundary privacy audit, fabrication safety,
// composition arithmetic, and empty-input behavior. No file or network
// access.
std::vector<CheckResult> run_selftest(const SelftestOptions& options);

}  // namespace dptopk
