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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dptopk/noise.hpp"
#include "dptopk/types.hpp"

namespace dptopk {

// Release threshold for an unknown-domain mechanism, kept in two parts so
// callers can inspect the deterministic component without sampling.
// The realized threshold is deterministic_part plus one noise draw at
// noise_scale from the mechanism's noise family.
struct ThresholdSpec {
  double deterministic_part = 0.0;
  double noise_scale = 0.0;
};

// Laplace-noise variant: deterministic part 1 + (l0/eps) * ln(l0/delta),
// noise scale l0/eps. Requires l0_sensitivity and delta > 0.
ThresholdSpec laplace_release_threshold(const PrivacyParams& params);

// Gumbel-noise variant: deterministic part 1 + (1/eps) * ln(k/delta),
// noise scale 1/eps. Requires delta > 0.
ThresholdSpec gumbel_release_threshold(const PrivacyParams& params);

struct TopKRow {
  std::string element;
  // Noisy count; absent when the mechanism is rank-only.
  std::optional<double> noisy_count;
};

struct TopKResult {
  std::vector<TopKRow> rows;
  bool released_counts = false;
};

// Every mechanism draws element noise from stream.child("e:" + element)
// and, where a threshold exists, threshold noise from stream.child("t:").
// Draws therefore depend only on (seed, stream id, element id), never on
// counts or on iteration order, and any single draw can be replayed.
// Ties in noisy score break by element id ascending.
//
// All four throw std::invalid_argument when the histogram or parameters
// fail validation or the histogram does not match the mechanism's domain
// contract.

// Known domain, pure DP (delta must be 0). Adds Laplace(l0/eps) to every
// element of the histogram, including zero counts, and returns all noisy
// values. Consumes (eps, 0) under the histogram's contribution bounds.
std::map<std::string, double> known_domain_laplace(const Histogram& hist,
                                                   const PrivacyParams& params,
                                                   RandomStream stream);

// Known domain, pure DP (delta must be 0), rank-only. One-shot top-k:
// adds Gumbel(k/eps) to every count and keeps the k largest noisy scores.
// Equivalent to k sequential exponential-mechanism picks at eps/k each,
// so a single pass consumes (eps, 0). Requires k <= domain size.
TopKResult known_domain_gumbel_topk(const Histogram& hist,
                                    const PrivacyParams& params,
                                    RandomStream stream);

// Unknown domain with noisy counts. Adds Laplace(l0/eps) per element,
// compares against the laplace_release_threshold realization (strict >),
// and returns at most k surviving elements by noisy count, counts
// included. Requires l0_sensitivity, delta > 0, and histogram size within
// fetch_limit. Consumes (eps, delta).
TopKResult unknown_domain_laplace_topk(const Histogram& hist,
                                       const PrivacyParams& params,
                                       RandomStream stream);

// Unknown domain, rank-only, no contribution bound required. Adds
// Gumbel(1/eps) per element, compares against the gumbel_release_threshold
// realization (strict >), and returns at most k surviving elements by
// noisy score with counts withheld. Requires delta > 0 and histogram size
// within fetch_limit. Consumes (eps, delta).
TopKResult unknown_domain_gumbel_topk(const Histogram& hist,
                                      const PrivacyParams& params,
                                      RandomStream stream);

}  // namespace dptopk
