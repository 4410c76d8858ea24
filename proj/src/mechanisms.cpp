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

#include "dptopk/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dptopk {

namespace {

void require_valid(const Histogram& hist, const PrivacyParams& params,
                   const char* mechanism) {
  std::string message;
  for (const std::string& v : validate_params(params)) {
    message += std::string(mechanism) + ": " + v + "; ";
  }
  for (const std::string& v : validate_histogram(hist)) {
    message += std::string(mechanism) + ": " + v + "; ";
  }
  if (!message.empty()) {
    message.resize(message.size() - 2);
    throw std::invalid_argument(message);
  }
}

void require_domain(const Histogram& hist, DomainKind expected,
                    const char* mechanism) {
  if (hist.domain_kind != expected) {
    throw std::invalid_argument(
        std::string(mechanism) + ": histogram domain kind does not match (" +
        (expected == DomainKind::Known ? "known" : "unknown") +
        " domain required)");
  }
}

void require_l0(const PrivacyParams& params, const char* mechanism) {
  if (!params.l0_sensitivity) {
    throw std::invalid_argument(std::string(mechanism) +
                                ": l0_sensitivity is required");
  }
}

void require_pure_dp(const PrivacyParams& params, const char* mechanism) {
  if (params.delta != 0.0) {
    throw std::invalid_argument(std::string(mechanism) +
                                ": delta must be 0 for a pure-DP mechanism");
  }
}

void require_positive_delta(const PrivacyParams& params,
                            const char* mechanism) {
  if (!(params.delta > 0.0)) {
    throw std::invalid_argument(
        std::string(mechanism) +
        ": delta must be positive for an unknown-domain release");
  }
}

void require_within_fetch_limit(const Histogram& hist,
                                const PrivacyParams& params,
                                const char* mechanism) {
  if (static_cast<int64_t>(hist.elements.size()) > params.fetch_limit) {
    throw std::invalid_argument(
        std::string(mechanism) + ": histogram has " +
        std::to_string(hist.elements.size()) +
        " elements, above the fetch limit of " +
        std::to_string(params.fetch_limit) +
        " (truncate candidates before invoking the mechanism)");
  }
}

struct Scored {
  double score;
  std::string element;
};

// Noisy score per element, sorted by score descending with ties broken by
// element id ascending. Noise comes from per-element child streams, so the
// draw for an element is independent of every other element's presence.
std::vector<Scored> noisy_scores(const Histogram& hist,
                                 const RandomStream& stream, NoiseKind kind,
                                 double scale) {
  std::vector<Scored> scored;
  scored.reserve(hist.elements.size());
  for (const auto& [element, count] : hist.elements) {
    RandomStream element_stream = stream.child("e:" + element);
    const double noise = kind == NoiseKind::Laplace
                             ? laplace_sample(element_stream, scale)
                             : gumbel_sample(element_stream, scale);
    scored.push_back({static_cast<double>(count) + noise, element});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.element < b.element;
  });
  return scored;
}

}  // namespace

ThresholdSpec laplace_release_threshold(const PrivacyParams& params) {
  std::string message;
  for (const std::string& v : validate_params(params)) {
    message += "laplace_release_threshold: " + v + "; ";
  }
  if (!message.empty()) {
    message.resize(message.size() - 2);
    throw std::invalid_argument(message);
  }
  require_l0(params, "laplace_release_threshold");
  require_positive_delta(params, "laplace_release_threshold");
  const double l0 = static_cast<double>(*params.l0_sensitivity);
  const double scale = l0 / params.epsilon;
  return {1.0 + scale * std::log(l0 / params.delta), scale};
}

ThresholdSpec gumbel_release_threshold(const PrivacyParams& params) {
  std::string message;
  for (const std::string& v : validate_params(params)) {
    message += "gumbel_release_threshold: " + v + "; ";
  }
  if (!message.empty()) {
    message.resize(message.size() - 2);
    throw std::invalid_argument(message);
  }
  require_positive_delta(params, "gumbel_release_threshold");
  const double scale = 1.0 / params.epsilon;
  return {1.0 + scale * std::log(static_cast<double>(params.k) / params.delta),
          scale};
}

std::map<std::string, double> known_domain_laplace(const Histogram& hist,
                                                   const PrivacyParams& params,
                                                   RandomStream stream) {
  require_valid(hist, params, "known_domain_laplace");
  require_domain(hist, DomainKind::Known, "known_domain_laplace");
  require_l0(params, "known_domain_laplace");
  require_pure_dp(params, "known_domain_laplace");
  const double scale =
      static_cast<double>(*params.l0_sensitivity) / params.epsilon;
  std::map<std::string, double> noisy;
  for (const auto& [element, count] : hist.elements) {
    RandomStream element_stream = stream.child("e:" + element);
    noisy[element] =
        static_cast<double>(count) + laplace_sample(element_stream, scale);
  }
  return noisy;
}

TopKResult known_domain_gumbel_topk(const Histogram& hist,
                                    const PrivacyParams& params,
                                    RandomStream stream) {
  require_valid(hist, params, "known_domain_gumbel_topk");
  require_domain(hist, DomainKind::Known, "known_domain_gumbel_topk");
  require_pure_dp(params, "known_domain_gumbel_topk");
  if (params.k > static_cast<int64_t>(hist.elements.size())) {
    throw std::invalid_argument(
        "known_domain_gumbel_topk: k exceeds the domain size");
  }
  // One Gumbel(k/eps) draw per element plays k exponential-mechanism
  // rounds at eps/k each in a single pass.
  const double scale = static_cast<double>(params.k) / params.epsilon;
  const std::vector<Scored> scored =
      noisy_scores(hist, stream, NoiseKind::Gumbel, scale);
  TopKResult result;
  result.released_counts = false;
  for (int64_t i = 0; i < params.k; ++i) {
    result.rows.push_back({scored[static_cast<size_t>(i)].element, std::nullopt});
  }
  return result;
}

TopKResult unknown_domain_laplace_topk(const Histogram& hist,
                                       const PrivacyParams& params,
                                       RandomStream stream) {
  require_valid(hist, params, "unknown_domain_laplace_topk");
  require_domain(hist, DomainKind::Unknown, "unknown_domain_laplace_topk");
  require_l0(params, "unknown_domain_laplace_topk");
  require_positive_delta(params, "unknown_domain_laplace_topk");
  require_within_fetch_limit(hist, params, "unknown_domain_laplace_topk");
  const ThresholdSpec spec = laplace_release_threshold(params);
  RandomStream threshold_stream = stream.child("t:");
  const double threshold =
      spec.deterministic_part + laplace_sample(threshold_stream, spec.noise_scale);
  const double scale =
      static_cast<double>(*params.l0_sensitivity) / params.epsilon;
  const std::vector<Scored> scored =
      noisy_scores(hist, stream, NoiseKind::Laplace, scale);
  TopKResult result;
  result.released_counts = true;
  for (const Scored& s : scored) {
    if (static_cast<int64_t>(result.rows.size()) >= params.k) break;
    if (s.score > threshold) {
      result.rows.push_back({s.element, s.score});
    }
  }
  return result;
}

TopKResult unknown_domain_gumbel_topk(const Histogram& hist,
                                      const PrivacyParams& params,
                                      RandomStream stream) {
  require_valid(hist, params, "unknown_domain_gumbel_topk");
  require_domain(hist, DomainKind::Unknown, "unknown_domain_gumbel_topk");
  require_positive_delta(params, "unknown_domain_gumbel_topk");
  require_within_fetch_limit(hist, params, "unknown_domain_gumbel_topk");
  const ThresholdSpec spec = gumbel_release_threshold(params);
  RandomStream threshold_stream = stream.child("t:");
  const double threshold =
      spec.deterministic_part + gumbel_sample(threshold_stream, spec.noise_scale);
  const std::vector<Scored> scored =
      noisy_scores(hist, stream, NoiseKind::Gumbel, spec.noise_scale);
  TopKResult result;
  result.released_counts = false;
  for (const Scored& s : scored) {
    if (static_cast<int64_t>(result.rows.size()) >= params.k) break;
    if (s.score > threshold) {
      result.rows.push_back({s.element, std::nullopt});
    }
  }
  return result;
}

}  // namespace dptopk
