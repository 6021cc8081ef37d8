// Copyright 2026 The dpgrid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPGRID_RNG_HPP_
#define DPGRID_RNG_HPP_

#include <cstdint>
#include <limits>
#include <string_view>

namespace dpgrid {

namespace internal {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace internal

// Counter-based random stream keyed by (seed, stream id). Output k is a pure
// function of (seed, stream, k), so identical keys give identical sequences
// and substreams can be handed to independent workers.
//
// Satisfies UniformRandomBitGenerator. Not safe to share across threads.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed),
        stream_(stream),
        key_(internal::mix64(seed ^ internal::mix64(stream))),
        key2_(internal::mix64(key_ ^ 0x6a09e667f3bcc909ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    const std::uint64_t c = counter_++;
    return internal::mix64(internal::mix64(c ^ key_) + key2_);
  }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Child stream derived from this stream's key; independent of how many
  // draws the parent has made.
  RngStream substream(std::uint64_t id) const {
    return RngStream(seed_, internal::mix64(stream_ * 0x9e3779b97f4a7c15ULL +
                                            internal::mix64(id)));
  }
  RngStream substream(std::string_view label) const {
    return substream(internal::hash_label(label));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t key2_;
  std::uint64_t counter_ = 0;
};

}  // namespace dpgrid

#endif  // DPGRID_RNG_HPP_
