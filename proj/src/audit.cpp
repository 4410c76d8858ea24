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

#include "dptopk/audit.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/binomial.hpp>

namespace dptopk {

namespace {

constexpr double kIntervalConfidence = 0.99;
constexpr double kKsAlpha = 0.001;
constexpr double kEulerGamma = 0.57721566490153286;

// Trials are independent and only their success count matters, so chunked
// parallel evaluation is deterministic. trial_fn must be safe to call
// concurrently (every production mechanism is a pure function).
int64_t count_successes(int64_t trials,
                        const std::function<bool(int64_t)>& trial_fn) {
  const unsigned hw = std::thread::hardware_concurrency();
  const int64_t jobs = std::min<int64_t>(hw == 0 ? 1 : hw, 16);
  if (jobs <= 1 || trials < jobs * 4) {
    int64_t count = 0;
    for (int64_t i = 0; i < trials; ++i) {
      if (trial_fn(i)) ++count;
    }
    return count;
  }
  std::vector<std::future<int64_t>> parts;
  parts.reserve(static_cast<size_t>(jobs));
  for (int64_t j = 0; j < jobs; ++j) {
    const int64_t begin = trials * j / jobs;
    const int64_t end = trials * (j + 1) / jobs;
    parts.push_back(std::async(std::launch::async, [&trial_fn, begin, end] {
      int64_t count = 0;
      for (int64_t i = begin; i < end; ++i) {
        if (trial_fn(i)) ++count;
      }
      return count;
    }));
  }
  int64_t count = 0;
  for (auto& part : parts) count += part.get();
  return count;
}

double laplace_cdf(double x, double b) {
  return x < 0.0 ? 0.5 * std::exp(x / b) : 1.0 - 0.5 * std::exp(-x / b);
}

double gumbel_cdf(double x, double beta) {
  return std::exp(-std::exp(-x / beta));
}

// Lower bound on ln(p/q) from interval endpoints, after the delta slack.
// Undefined (no evidence) when the numerator is not positive.
std::optional<double> direction_bound(const IntervalEstimate& p,
                                      const IntervalEstimate& q,
                                      double delta) {
  const double numerator = p.lo - delta;
  if (numerator <= 0.0) return std::nullopt;
  return std::log(numerator / q.hi);
}

EventPredicate released(std::string element) {
  return [element = std::move(element)](const TopKResult& r) {
    return std::any_of(r.rows.begin(), r.rows.end(),
                       [&](const TopKRow& row) { return row.element == element; });
  };
}

EventPredicate at_rank_one(std::string element) {
  return [element = std::move(element)](const TopKResult& r) {
    return !r.rows.empty() && r.rows.front().element == element;
  };
}

EventPredicate output_empty() {
  return [](const TopKResult& r) { return r.rows.empty(); };
}

EventPredicate noisy_count_above(std::string element, double bound) {
  return [element = std::move(element), bound](const TopKResult& r) {
    for (const TopKRow& row : r.rows) {
      if (row.element == element) {
        return row.noisy_count.has_value() && *row.noisy_count > bound;
      }
    }
    return false;
  };
}

SliceKey audit_slice() {
  SliceKey slice;
  slice.report_date = {2026, 6};
  slice.country = "audit";
  return slice;
}

}  // namespace

std::vector<std::string> validate_neighbor_pair(const NeighborPair& pair) {
  std::vector<std::string> violations = validate_histogram(pair.base);
  for (std::string& v : validate_histogram(pair.neighbor)) {
    violations.push_back("neighbor: " + v);
  }
  if (pair.base.domain_kind != pair.neighbor.domain_kind) {
    violations.push_back("base and neighbor must share a domain kind");
  }
  std::set<std::string> keys;
  for (const auto& [element, count] : pair.base.elements) {
    (void)count;
    keys.insert(element);
  }
  for (const auto& [element, count] : pair.neighbor.elements) {
    (void)count;
    keys.insert(element);
  }
  int64_t differing = 0;
  for (const std::string& key : keys) {
    auto b = pair.base.elements.find(key);
    auto n = pair.neighbor.elements.find(key);
    const int64_t bv = b == pair.base.elements.end() ? 0 : b->second;
    const int64_t nv = n == pair.neighbor.elements.end() ? 0 : n->second;
    const int64_t diff = bv > nv ? bv - nv : nv - bv;
    if (diff > 1) {
      violations.push_back("bin '" + key + "' differs by " +
                           std::to_string(diff) + ", one event moves a bin by "
                           "at most 1");
    }
    if (diff != 0) ++differing;
  }
  std::optional<int64_t> bound = pair.base.l0_bound;
  if (pair.neighbor.l0_bound && (!bound || *pair.neighbor.l0_bound < *bound)) {
    bound = pair.neighbor.l0_bound;
  }
  if (bound && differing > *bound) {
    violations.push_back(std::to_string(differing) +
                         " bins differ, above the declared contribution bound "
                         "of " +
                         std::to_string(*bound));
  }
  return violations;
}

IntervalEstimate clopper_pearson(int64_t successes, int64_t trials,
                                 double confidence) {
  if (trials < 1 || successes < 0 || successes > trials) {
    throw std::invalid_argument("clopper_pearson: need 0 <= successes <= trials");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("clopper_pearson: confidence must lie in (0,1)");
  }
  using boost::math::binomial_distribution;
  const double n = static_cast<double>(trials);
  const double k = static_cast<double>(successes);
  const double tail = (1.0 - confidence) / 2.0;
  IntervalEstimate estimate;
  estimate.successes = successes;
  estimate.trials = trials;
  estimate.point = k / n;
  estimate.lo = binomial_distribution<double>::find_lower_bound_on_p(n, k, tail);
  estimate.hi = binomial_distribution<double>::find_upper_bound_on_p(n, k, tail);
  return estimate;
}

AuditVerdict estimate_privacy_loss(const MechanismFn& mechanism,
                                   const NeighborPair& pair,
                                   const EventPredicate& event,
                                   const std::string& event_description,
                                   int64_t trials, double declared_epsilon,
                                   double declared_delta, RandomStream stream) {
  if (trials < 10000) {
    throw std::invalid_argument(
        "estimate_privacy_loss: at least 10^4 trials required");
  }
  if (const auto violations = validate_neighbor_pair(pair); !violations.empty()) {
    throw std::invalid_argument("estimate_privacy_loss: " + violations.front());
  }

  const int64_t base_hits = count_successes(trials, [&](int64_t i) {
    return event(mechanism(pair.base, stream.child("b:" + std::to_string(i))));
  });
  const int64_t neighbor_hits = count_successes(trials, [&](int64_t i) {
    return event(mechanism(pair.neighbor, stream.child("n:" + std::to_string(i))));
  });

  AuditVerdict verdict;
  verdict.event_description = event_description;
  verdict.p_base = clopper_pearson(base_hits, trials, kIntervalConfidence);
  verdict.p_neighbor = clopper_pearson(neighbor_hits, trials, kIntervalConfidence);
  verdict.declared_epsilon = declared_epsilon;
  verdict.declared_delta = declared_delta;

  const auto forward =
      direction_bound(verdict.p_base, verdict.p_neighbor, declared_delta);
  const auto backward =
      direction_bound(verdict.p_neighbor, verdict.p_base, declared_delta);
  if (forward && backward) {
    verdict.epsilon_hat = std::max(*forward, *backward);
  } else if (forward) {
    verdict.epsilon_hat = forward;
  } else if (backward) {
    verdict.epsilon_hat = backward;
  }
  verdict.conclusive = verdict.epsilon_hat.has_value();
  verdict.passes = verdict.conclusive && *verdict.epsilon_hat <= declared_epsilon;
  return verdict;
}

SamplerVerdict check_samples(NoiseKind kind, double scale,
                             const std::vector<double>& draws) {
  if (draws.size() < 100000) {
    throw std::invalid_argument("check_samples: at least 10^5 draws required");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("check_samples: scale must be finite and positive");
  }
  const double n = static_cast<double>(draws.size());

  std::vector<double> sorted = draws;
  std::sort(sorted.begin(), sorted.end());
  double ks = 0.0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = kind == NoiseKind::Laplace
                           ? laplace_cdf(sorted[i], scale)
                           : gumbel_cdf(sorted[i], scale);
    const double above = static_cast<double>(i + 1) / n - cdf;
    const double below = cdf - static_cast<double>(i) / n;
    ks = std::max({ks, above, below});
  }

  double sum = 0.0;
  for (double x : draws) sum += x;
  const double mean = sum / n;
  double squares = 0.0;
  for (double x : draws) squares += (x - mean) * (x - mean);
  const double std_dev = std::sqrt(squares / (n - 1.0));

  SamplerVerdict verdict;
  verdict.kind = kind;
  verdict.scale = scale;
  verdict.samples = static_cast<int64_t>(draws.size());
  verdict.ks_statistic = ks;
  verdict.ks_critical = std::sqrt(std::log(2.0 / kKsAlpha) / (2.0 * n));
  verdict.sample_mean = mean;
  verdict.sample_std = std_dev;
  // Std-error of the sample std uses sigma * sqrt((kurtosis - 1)/(4n));
  // kurtosis is 6 for Laplace and 27/5 for Gumbel.
  if (kind == NoiseKind::Laplace) {
    verdict.expected_mean = 0.0;
    verdict.expected_std = std::sqrt(2.0) * scale;
    verdict.std_tolerance =
        3.0 * verdict.expected_std * std::sqrt(5.0 / (4.0 * n));
  } else {
    verdict.expected_mean = kEulerGamma * scale;
    verdict.expected_std = scale * M_PI / std::sqrt(6.0);
    verdict.std_tolerance =
        3.0 * verdict.expected_std * std::sqrt(4.4 / (4.0 * n));
  }
  verdict.mean_tolerance = 3.0 * verdict.expected_std / std::sqrt(n);
  verdict.passes =
      verdict.ks_statistic <= verdict.ks_critical &&
      std::abs(verdict.sample_mean - verdict.expected_mean) <=
          verdict.mean_tolerance &&
      std::abs(verdict.sample_std - verdict.expected_std) <= verdict.std_tolerance;
  return verdict;
}

SamplerVerdict check_sampler(NoiseKind kind, double scale, int64_t samples,
                             RandomStream stream) {
  if (samples < 100000) {
    throw std::invalid_argument("check_sampler: at least 10^5 samples required");
  }
  std::vector<double> draws;
  draws.reserve(static_cast<size_t>(samples));
  for (int64_t i = 0; i < samples; ++i) {
    draws.push_back(kind == NoiseKind::Laplace ? laplace_sample(stream, scale)
                                               : gumbel_sample(stream, scale));
  }
  return check_samples(kind, scale, draws);
}

FabricationVerdict check_never_fabricates(const MechanismFn& mechanism,
                                          const Histogram& hist,
                                          int64_t trials, RandomStream stream) {
  if (trials < 10000) {
    throw std::invalid_argument(
        "check_never_fabricates: at least 10^4 trials required");
  }
  std::set<std::string> support;
  for (const auto& [element, count] : hist.elements) {
    (void)count;
    support.insert(element);
  }
  const int64_t fabricating = count_successes(trials, [&](int64_t i) {
    const TopKResult result =
        mechanism(hist, stream.child("f:" + std::to_string(i)));
    for (const TopKRow& row : result.rows) {
      if (support.count(row.element) == 0) return true;
    }
    return false;
  });
  FabricationVerdict verdict;
  verdict.trials = trials;
  verdict.fabricating_trials = fabricating;
  verdict.passes = fabricating == 0;
  return verdict;
}

MechanismFn topk_mechanism(MechanismKind kind, const PrivacyParams& params) {
  switch (kind) {
    case MechanismKind::KnownLaplace:
      return [params](const Histogram& hist, RandomStream stream) {
        const std::map<std::string, double> noisy =
            known_domain_laplace(hist, params, std::move(stream));
        std::vector<std::pair<std::string, double>> sorted(noisy.begin(),
                                                           noisy.end());
        std::sort(sorted.begin(), sorted.end(),
                  [](const auto& a, const auto& b) {
                    if (a.second != b.second) return a.second > b.second;
                    return a.first < b.first;
                  });
        TopKResult result;
        result.released_counts = true;
        for (auto& [element, value] : sorted) {
          result.rows.push_back({element, value});
        }
        return result;
      };
    case MechanismKind::KnownGumbelTopK:
      return [params](const Histogram& hist, RandomStream stream) {
        return known_domain_gumbel_topk(hist, params, std::move(stream));
      };
    case MechanismKind::UnknownLaplaceTopK:
      return [params](const Histogram& hist, RandomStream stream) {
        return unknown_domain_laplace_topk(hist, params, std::move(stream));
      };
    case MechanismKind::UnknownGumbelTopK:
      return [params](const Histogram& hist, RandomStream stream) {
        return unknown_domain_gumbel_topk(hist, params, std::move(stream));
      };
  }
  throw std::invalid_argument("unknown mechanism kind value");
}

MechanismFn faulty_unknown_laplace_topk(const PrivacyParams& params,
                                        double noise_scale_multiplier) {
  if (!(noise_scale_multiplier > 0.0)) {
    throw std::invalid_argument(
        "faulty_unknown_laplace_topk: multiplier must be positive");
  }
  return [params, noise_scale_multiplier](const Histogram& hist,
                                          RandomStream stream) {
    const ThresholdSpec spec = laplace_release_threshold(params);
    if (hist.domain_kind != DomainKind::Unknown) {
      throw std::invalid_argument(
          "faulty_unknown_laplace_topk: unknown-domain histogram required");
    }
    RandomStream threshold_stream = stream.child("t:");
    // Identical stream layout to the production mechanism; only the draw
    // magnitudes are tampered with, the deterministic threshold stays.
    const double threshold =
        spec.deterministic_part +
        laplace_sample(threshold_stream, spec.noise_scale) *
            noise_scale_multiplier;
    const double scale =
        static_cast<double>(*params.l0_sensitivity) / params.epsilon;
    std::vector<std::pair<double, std::string>> scored;
    scored.reserve(hist.elements.size());
    for (const auto& [element, count] : hist.elements) {
      RandomStream element_stream = stream.child("e:" + element);
      scored.emplace_back(static_cast<double>(count) +
                              laplace_sample(element_stream, scale) *
                                  noise_scale_multiplier,
                          element);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    TopKResult result;
    result.released_counts = true;
    for (const auto& [score, element] : scored) {
      if (static_cast<int64_t>(result.rows.size()) >= params.k) break;
      if (score > threshold) result.rows.push_back({element, score});
    }
    return result;
  };
}

NeighborPair builtin_neighbor_pair(MechanismKind kind) {
  NeighborPair pair;
  pair.base.slice = audit_slice();
  pair.neighbor.slice = audit_slice();
  switch (kind) {
    case MechanismKind::UnknownLaplaceTopK:
      pair.base.elements = {{"e", 36}};
      pair.neighbor.elements = {{"e", 35}};
      pair.base.domain_kind = DomainKind::Unknown;
      pair.neighbor.domain_kind = DomainKind::Unknown;
      pair.base.l0_bound = 1;
      pair.neighbor.l0_bound = 1;
      pair.description = "single element straddling the release boundary";
      break;
    case MechanismKind::UnknownGumbelTopK:
      pair.base.elements = {{"e", 240}};
      pair.neighbor.elements = {{"e", 239}};
      pair.base.domain_kind = DomainKind::Unknown;
      pair.neighbor.domain_kind = DomainKind::Unknown;
      pair.description = "single element straddling the release boundary";
      break;
    case MechanismKind::KnownLaplace:
      pair.base.elements = {{"a", 40}, {"b", 10}};
      pair.neighbor.elements = {{"a", 39}, {"b", 10}};
      pair.base.domain_kind = DomainKind::Known;
      pair.neighbor.domain_kind = DomainKind::Known;
      pair.base.l0_bound = 1;
      pair.neighbor.l0_bound = 1;
      pair.description = "two-element known domain, one count stepping";
      break;
    case MechanismKind::KnownGumbelTopK:
      pair.base.elements = {{"a", 3}, {"b", 1}};
      pair.neighbor.elements = {{"a", 2}, {"b", 1}};
      pair.base.domain_kind = DomainKind::Known;
      pair.neighbor.domain_kind = DomainKind::Known;
      pair.base.l0_bound = 1;
      pair.neighbor.l0_bound = 1;
      pair.description = "two-element known domain, one count stepping";
      break;
  }
  return pair;
}

std::vector<AuditVerdict> builtin_mechanism_audit(MechanismKind kind,
                                                  int64_t trials,
                                                  uint64_t seed,
                                                  double declared_epsilon,
                                                  double declared_delta) {
  PrivacyParams params;
  params.epsilon = declared_epsilon;
  params.delta = declared_delta;
  params.fetch_limit = 1000;
  params.k = 20;
  switch (kind) {
    case MechanismKind::KnownLaplace:
      params.l0_sensitivity = 1;
      // The mechanism itself is pure DP; declared_delta only loosens the
      // audited inequality.
      params.delta = 0.0;
      break;
    case MechanismKind::KnownGumbelTopK:
      params.l0_sensitivity = std::nullopt;
      params.k = 1;
      params.delta = 0.0;
      break;
    case MechanismKind::UnknownLaplaceTopK:
      params.l0_sensitivity = 1;
      break;
    case MechanismKind::UnknownGumbelTopK:
      params.l0_sensitivity = std::nullopt;
      break;
  }
  const MechanismFn mechanism = topk_mechanism(kind, params);
  const NeighborPair pair = builtin_neighbor_pair(kind);
  RandomStream stream(seed, fnv1a64("audit:" + to_string(kind)));

  std::vector<std::pair<std::string, EventPredicate>> events;
  switch (kind) {
    case MechanismKind::UnknownLaplaceTopK:
    case MechanismKind::UnknownGumbelTopK:
      events.emplace_back("element e released", released("e"));
      events.emplace_back("element e at rank 1", at_rank_one("e"));
      events.emplace_back("output empty", output_empty());
      break;
    case MechanismKind::KnownLaplace:
      // A known-domain release always emits the whole domain, so the
      // informative events are count exceedances and ordering.
      events.emplace_back("noisy count of a exceeds 39.5",
                          noisy_count_above("a", 39.5));
      events.emplace_back("element a at rank 1", at_rank_one("a"));
      events.emplace_back("element a released", released("a"));
      break;
    case MechanismKind::KnownGumbelTopK:
      events.emplace_back("element a released", released("a"));
      events.emplace_back("element b released", released("b"));
      break;
  }

  std::vector<AuditVerdict> verdicts;
  verdicts.reserve(events.size());
  for (const auto& [description, event] : events) {
    verdicts.push_back(estimate_privacy_loss(mechanism, pair, event,
                                             description, trials,
                                             declared_epsilon, declared_delta,
                                             stream));
  }
  return verdicts;
}

}  // namespace dptopk
