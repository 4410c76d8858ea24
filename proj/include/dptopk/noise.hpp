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
#include <string_view>

namespace dptopk {

enum class NoiseKind { Laplace, Gumbel };

// 64-bit FNV-1a over raw bytes. Stream ids are derived from canonical
// strings with this hash; the byte-exact rule lives in the README so
// external tooling can replay every draw.
uint64_t fnv1a64(std::string_view bytes);

// Deterministic counter-based random stream; the only randomness source in
// the privacy core. Identical (seed, stream_id) pairs reproduce identical
// sample sequences bit for bit; distinct stream ids give statistically
// independent sequences. Not cryptographic, and no floating-point
// hardening (snapping) is applied; see the README's limitations section.
//
// Word n (n = 1, 2, ...) of a stream is
//   mix(key + n * 0x9E3779B97F4A7C15)  with  key = mix(seed ^ mix(stream_id
//   + 0x9E3779B97F4A7C15))
// where mix is the 64-bit SplitMix64 finalizer. Because the words are a
// pure function of (seed, stream_id, n), any draw can be recomputed in
// isolation.
class RandomStream {
 public:
  RandomStream(uint64_t seed, uint64_t stream_id);

  uint64_t next_u64();

  // Uniform on the open interval (0,1): ((w >> 11) + 0.5) * 2^-53.
  // Never exactly 0 or 1, so log() of a draw is always finite.
  double next_uniform();

  // Fresh stream for a sub-purpose: id = fnv1a64(le64(stream_id) || tag).
  // Mechanisms give every histogram element its own child stream so noise
  // draws do not depend on counts or iteration order.
  RandomStream child(std::string_view tag) const;

  uint64_t seed() const { return seed_; }
  uint64_t stream_id() const { return stream_id_; }

 private:
  uint64_t seed_;
  uint64_t stream_id_;
  uint64_t key_;
  uint64_t counter_ = 0;
};

// Inverse-transform quantile functions. The samplers below draw one
// uniform and apply these, so quantile identities (median 0, Gumbel zero
// at u = 1/e) transfer to the samplers exactly.
double laplace_quantile(double u, double scale_b);
double gumbel_quantile(double u, double scale_beta);

// Zero-mean Laplace with scale b (std = sqrt(2) * b).
double laplace_sample(RandomStream& stream, double scale_b);

// Standard Gumbel with location 0 and scale beta: x = -beta*ln(-ln(u)).
double gumbel_sample(RandomStream& stream, double scale_beta);

}  // namespace dptopk
