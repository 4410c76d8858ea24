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

#include "dptopk/selftest.hpp"

#include <cmath>
#include <sstream>

#include "dptopk/accountant.hpp"
#include "dptopk/audit.hpp"
#include "dptopk/mechanisms.hpp"
#include "dptopk/noise.hpp"
#include "dptopk/types.hpp"

namespace dptopk {

namespace {

PrivacyParams boundary_params() {
  PrivacyParams params;
  params.epsilon = 0.6;
  params.delta = 1e-10;
  params.l0_sensitivity = 1;
  params.fetch_limit = 1000;
  params.k = 20;
  return params;
}

PrivacyParams rank_only_params() {
  PrivacyParams params;
  params.epsilon = 0.1;
  params.delta = 1e-10;
  params.fetch_limit = 1000;
  params.k = 20;
  return params;
}

std::string describe_sampler(const SamplerVerdict& v) {
  std::ostringstream out;
  out << "ks " << v.ks_statistic << " (critical " << v.ks_critical << "), mean "
      << v.sample_mean << " vs " << v.expected_mean << " (tol "
      << v.mean_tolerance << "), std " << v.sample_std << " vs "
      << v.expected_std << " (tol " << v.std_tolerance << ")";
  return out.str();
}

}  // namespace

std::vector<CheckResult> run_selftest(const SelftestOptions& options) {
  std::vector<CheckResult> results;
  const double multiplier = options.noise_scale_multiplier;

  {
    // The two release-threshold constants the default configuration pins.
    const ThresholdSpec spec = laplace_release_threshold(boundary_params());
    std::ostringstream detail;
    detail << "deterministic part " << spec.deterministic_part
           << ", expected 39.4 +/- 0.5";
    results.push_back({"laplace_threshold_constant",
                       std::abs(spec.deterministic_part - 39.4) <= 0.5,
                       detail.str()});
  }
  {
    const ThresholdSpec spec = gumbel_release_threshold(rank_only_params());
    std::ostringstream detail;
    detail << "deterministic part " << spec.deterministic_part
           << ", expected 261.2 +/- 2";
    results.push_back({"gumbel_threshold_constant",
                       std::abs(spec.deterministic_part - 261.2) <= 2.0,
                       detail.str()});
  }
  {
    const ThresholdSpec spec = gumbel_release_threshold(rank_only_params());
    std::ostringstream detail;
    detail << "noise scale " << spec.noise_scale << ", expected 10";
    results.push_back(
        {"gumbel_noise_scale", spec.noise_scale == 10.0, detail.str()});
  }

  {
    // Sampler fits. Draws are taken at multiplier * scale but checked
    // against the declared scale, so a tampered noise source fails here.
    const double declared = 1.0 / 0.6;
    RandomStream stream(options.seed, fnv1a64("selftest:laplace"));
    std::vector<double> draws;
    draws.reserve(static_cast<size_t>(options.sampler_samples));
    for (int64_t i = 0; i < options.sampler_samples; ++i) {
      draws.push_back(laplace_sample(stream, declared) * multiplier);
    }
    const SamplerVerdict verdict =
        check_samples(NoiseKind::Laplace, declared, draws);
    results.push_back(
        {"laplace_sampler_fit", verdict.passes, describe_sampler(verdict)});
  }
  {
    const double declared = 10.0;
    RandomStream stream(options.seed, fnv1a64("selftest:gumbel"));
    std::vector<double> draws;
    draws.reserve(static_cast<size_t>(options.sampler_samples));
    for (int64_t i = 0; i < options.sampler_samples; ++i) {
      draws.push_back(gumbel_sample(stream, declared) * multiplier);
    }
    const SamplerVerdict verdict =
        check_samples(NoiseKind::Gumbel, declared, draws);
    results.push_back(
        {"gumbel_sampler_fit", verdict.passes, describe_sampler(verdict)});
  }

  {
    // Boundary privacy audit of the thresholded Laplace release. With
    // multiplier 1 this runs the production noise layout; an under-noised
    // variant concentrates the release event and the verdict must flip.
    const PrivacyParams params = boundary_params();
    const MechanismFn mechanism =
        faulty_unknown_laplace_topk(params, multiplier);
    const NeighborPair pair =
        builtin_neighbor_pair(MechanismKind::UnknownLaplaceTopK);
    RandomStream stream(options.seed, fnv1a64("selftest:boundary-audit"));
    const AuditVerdict verdict = estimate_privacy_loss(
        mechanism, pair,
        [](const TopKResult& r) { return !r.rows.empty(); },
        "element e released", options.audit_trials, params.epsilon,
        params.delta, stream);
    std::ostringstream detail;
    detail << "p_base " << verdict.p_base.point << ", p_neighbor "
           << verdict.p_neighbor.point << ", epsilon_hat "
           << (verdict.epsilon_hat ? std::to_string(*verdict.epsilon_hat)
                                   : std::string("none"))
           << " vs declared " << params.epsilon;
    results.push_back(
        {"release_boundary_audit", verdict.passes, detail.str()});
  }

  {
    const PrivacyParams params = boundary_params();
    const MechanismFn mechanism =
        topk_mechanism(MechanismKind::UnknownLaplaceTopK, params);
    const NeighborPair pair =
        builtin_neighbor_pair(MechanismKind::UnknownLaplaceTopK);
    RandomStream stream(options.seed, fnv1a64("selftest:fabrication"));
    const FabricationVerdict populated =
        check_never_fabricates(mechanism, pair.base, 10000, stream);
    Histogram empty;
    empty.slice = pair.base.slice;
    empty.domain_kind = DomainKind::Unknown;
    const FabricationVerdict vacuous = check_never_fabricates(
        mechanism, empty, 10000, stream.child("empty"));
    std::ostringstream detail;
    detail << populated.fabricating_trials << " fabricating trials of "
           << populated.trials << "; empty input fabricated in "
           << vacuous.fabricating_trials;
    results.push_back({"fabrication_safety",
                       populated.passes && vacuous.passes, detail.str()});
  }

  {
    const Cost per_report = compose_sequential({{0.6, 1e-10}, {0.6, 0.0}});
    const Cost per_date = compose_sequential({{per_report.epsilon, per_report.delta},
                                              {per_report.epsilon, per_report.delta},
                                              {per_report.epsilon, per_report.delta},
                                              {per_report.epsilon, per_report.delta}});
    const bool ok = per_report.epsilon == 1.2 && per_report.delta == 1e-10 &&
                    per_date.epsilon == 4.8 && per_date.delta == 4e-10;
    std::ostringstream detail;
    detail << "per report (" << per_report.epsilon << ", " << per_report.delta
           << "), per date (" << per_date.epsilon << ", " << per_date.delta
           << ")";
    results.push_back({"composition_arithmetic", ok, detail.str()});
  }

  {
    Histogram empty;
    empty.slice = builtin_neighbor_pair(MechanismKind::UnknownLaplaceTopK)
                      .base.slice;
    empty.domain_kind = DomainKind::Unknown;
    RandomStream stream(options.seed, fnv1a64("selftest:empty-release"));
    const TopKResult laplace_out = unknown_domain_laplace_topk(
        empty, boundary_params(), stream.child("laplace"));
    const TopKResult gumbel_out = unknown_domain_gumbel_topk(
        empty, rank_only_params(), stream.child("gumbel"));
    const bool ok = laplace_out.rows.empty() && gumbel_out.rows.empty();
    results.push_back({"empty_input_release", ok,
                       ok ? "empty input releases nothing"
                          : "empty input produced rows"});
  }

  return results;
}

}  // namespace dptopk
