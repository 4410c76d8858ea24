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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dptopk/accountant.hpp"
#include "dptopk/mechanisms.hpp"
#include "dptopk/noise.hpp"
#include "dptopk/types.hpp"

namespace dptopk {

// Everything here treats mechanisms as black boxes behind MechanismFn, so
// the harness stays valid across reimplementations. Monte Carlo auditing
// can refute a privacy claim, never prove it; verdicts are therefore
// conservative (wide intervals, worst-case endpoints).

using MechanismFn = std::function<TopKResult(const Histogram&, RandomStream)>;
using EventPredicate = std::function<bool(const TopKResult&)>;

// Two histograms differing by one event's contribution: every bin moves by
// at most 1, and when a contribution bound is declared, at most that many
// bins move.
struct NeighborPair {
  Histogram base;
  Histogram neighbor;
  std::string description;
};

// Violations of the neighbor relation; empty means valid. Identical
// histograms are a valid (degenerate) pair.
std::vector<std::string> validate_neighbor_pair(const NeighborPair& pair);

// Exact binomial (Clopper-Pearson) two-sided interval at the given
// confidence level.
struct IntervalEstimate {
  int64_t successes = 0;
  int64_t trials = 0;
  double point = 0.0;
  double lo = 0.0;
  double hi = 1.0;
};

IntervalEstimate clopper_pearson(int64_t successes, int64_t trials,
                                 double confidence);

struct AuditVerdict {
  std::string event_description;
  IntervalEstimate p_base;
  IntervalEstimate p_neighbor;
  // Interval-worst-case lower bound on the realized privacy loss:
  // the larger of ln((p_base.lo - delta)/p_neighbor.hi) and the same with
  // the sides swapped, each direction defined only when its numerator is
  // positive. Absent when neither direction is defined.
  std::optional<double> epsilon_hat;
  double declared_epsilon = 0.0;
  double declared_delta = 0.0;
  // False when the event occurred on neither side often enough to bound
  // anything; an inconclusive verdict never counts as a pass.
  bool conclusive = false;
  bool passes = false;
};

// Runs the mechanism `trials` times on each of the pair's histograms
// (trial i uses stream.child("b:" + i) resp. child("n:" + i)), estimates
// both event probabilities with Clopper-Pearson intervals at 99%
// confidence, and checks the worst-case interval endpoints against the
// declared (epsilon, delta) in both directions. Requires trials >= 10^4
// and a valid pair; throws std::invalid_argument otherwise.
AuditVerdict estimate_privacy_loss(const MechanismFn& mechanism,
                                   const NeighborPair& pair,
                                   const EventPredicate& event,
                                   const std::string& event_description,
                                   int64_t trials, double declared_epsilon,
                                   double declared_delta, RandomStream stream);

// Goodness of fit of the noise samplers against the analytic
// distributions: Kolmogorov-Smirnov at the 0.1% level plus mean/std
// within 3 standard errors.
struct SamplerVerdict {
  NoiseKind kind = NoiseKind::Laplace;
  double scale = 0.0;
  int64_t samples = 0;
  double ks_statistic = 0.0;
  double ks_critical = 0.0;
  double sample_mean = 0.0;
  double sample_std = 0.0;
  double expected_mean = 0.0;
  double expected_std = 0.0;
  double mean_tolerance = 0.0;
  double std_tolerance = 0.0;
  bool passes = false;
};

// Draws `samples` values (>= 10^5, throws below) and fits them.
SamplerVerdict check_sampler(NoiseKind kind, double scale, int64_t samples,
                             RandomStream stream);

// Fits externally produced draws against the declared scale. Lets callers
// check draws from a tampered source against the scale the source claims.
SamplerVerdict check_samples(NoiseKind kind, double scale,
                             const std::vector<double>& draws);

struct FabricationVerdict {
  int64_t trials = 0;
  // Trials whose output contained any element outside the input support.
  int64_t fabricating_trials = 0;
  bool passes = false;
};

// Safety check: across `trials` runs (>= 10^4), no output element may fall
// outside the histogram's support. On an empty histogram this asserts
// every output is empty.
FabricationVerdict check_never_fabricates(const MechanismFn& mechanism,
                                          const Histogram& hist,
                                          int64_t trials, RandomStream stream);

// Production mechanisms wrapped behind the black-box signature. The
// known-domain Laplace release is presented as a TopKResult holding the
// full domain sorted by noisy count.
MechanismFn topk_mechanism(MechanismKind kind, const PrivacyParams& params);

// Deliberately broken variant of the unknown-domain Laplace top-k for
// fault-injection tests: element and threshold noise are drawn at
// multiplier times the correct scale while the deterministic threshold
// stays put. A multiplier of 1 reproduces the production mechanism bit
// for bit; 0.5 under-noises enough that a boundary audit must catch it.
MechanismFn faulty_unknown_laplace_topk(const PrivacyParams& params,
                                        double noise_scale_multiplier);

// Canned boundary audit for one mechanism kind: a near-threshold neighbor
// pair and the default events ("element released", "element at rank 1",
// plus "output empty" where the mechanism can suppress, or a noisy-count
// exceedance for the known-domain Laplace release). Used by the CLI audit
// subcommand and the selftest.
std::vector<AuditVerdict> builtin_mechanism_audit(MechanismKind kind,
                                                  int64_t trials,
                                                  uint64_t seed,
                                                  double declared_epsilon,
                                                  double declared_delta);

// The neighbor pair builtin_mechanism_audit uses, exposed for tests and
// for fault-injection runs.
NeighborPair builtin_neighbor_pair(MechanismKind kind);

}  // namespace dptopk
