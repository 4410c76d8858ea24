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

#include "dptopk/noise.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dptopk {

namespace {

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer (Steele, Lea, Flood 2014 / Stafford mix13).
uint64_t mix(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void require_positive_scale(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("noise scale must be finite and positive, got " +
                                std::to_string(scale));
  }
}

}  // namespace

uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= static_cast<uint64_t>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

RandomStream::RandomStream(uint64_t seed, uint64_t stream_id)
    : seed_(seed),
      stream_id_(stream_id),
      key_(mix(seed ^ mix(stream_id + kGolden))) {}

uint64_t RandomStream::next_u64() {
  ++counter_;
  return mix(key_ + counter_ * kGolden);
}

double RandomStream::next_uniform() {
  // 53-bit mantissa, offset by half a step: lands strictly inside (0,1).
  const uint64_t w = next_u64();
  return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
}

RandomStream RandomStream::child(std::string_view tag) const {
  char material[8 + 256];
  for (int i = 0; i < 8; ++i) {
    material[i] = static_cast<char>((stream_id_ >> (8 * i)) & 0xFF);
  }
  const size_t tag_len = tag.size() < 256 ? tag.size() : 256;
  tag.copy(material + 8, tag_len);
  return RandomStream(seed_, fnv1a64(std::string_view(material, 8 + tag_len)));
}

double laplace_quantile(double u, double scale_b) {
  require_positive_scale(scale_b);
  if (!(u > 0.0 && u < 1.0)) {
    throw std::invalid_argument("quantile argument must lie in (0,1)");
  }
  if (u == 0.5) return 0.0;
  if (u < 0.5) return scale_b * std::log(2.0 * u);
  return -scale_b * std::log(2.0 * (1.0 - u));
}

double gumbel_quantile(double u, double scale_beta) {
  require_positive_scale(scale_beta);
  if (!(u > 0.0 && u < 1.0)) {
    throw std::invalid_argument("quantile argument must lie in (0,1)");
  }
  return -scale_beta * std::log(-std::log(u));
}

double laplace_sample(RandomStream& stream, double scale_b) {
  require_positive_scale(scale_b);
  return laplace_quantile(stream.next_uniform(), scale_b);
}

double gumbel_sample(RandomStream& stream, double scale_beta) {
  require_positive_scale(scale_beta);
  return gumbel_quantile(stream.next_uniform(), scale_beta);
}

}  // namespace dptopk
