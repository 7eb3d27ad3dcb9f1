// Copyright 2026 The uowsn-loc Authors
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

#ifndef UOWSN_RNG_HPP
#define UOWSN_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace uowsn {

/// Deterministic, forkable random stream.
///
/// Streams are identified by a key (a sequence of 64-bit words). Two streams
/// with the same key produce bit-identical output on every platform; forked
/// streams extend the key and are statistically independent of their parent.
/// Trial/node/link streams are derived by forking so results do not depend on
/// evaluation order or thread count.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : RngStream({seed}) {}
  explicit RngStream(std::initializer_list<std::uint64_t> key)
      : key_(key), engine_(derive_seed(key_)) {}
  explicit RngStream(std::vector<std::uint64_t> key)
      : key_(std::move(key)), engine_(derive_seed(key_)) {}

  /// New independent stream whose key is this stream's key plus `words`.
  RngStream fork(std::initializer_list<std::uint64_t> words) const {
    std::vector<std::uint64_t> k = key_;
    k.insert(k.end(), words.begin(), words.end());
    return RngStream(std::move(k));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (cosine branch). Consumes exactly two
  /// engine draws per call, so the stream layout is call-count predictable.
  double gaussian();

  double gaussian(double mean, double stddev) {
    return mean + stddev * gaussian();
  }

  const std::vector<std::uint64_t>& key() const { return key_; }

 private:
  static std::uint64_t mix(std::uint64_t z);
  static std::uint64_t derive_seed(const std::vector<std::uint64_t>& key);

  std::vector<std::uint64_t> key_;
  std::mt19937_64 engine_;
};

}  // namespace uowsn

#endif  // UOWSN_RNG_HPP
