// Copyright 2026 The charb Authors
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

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace charb {

/// Counter-based stream keys: a stream is identified by a tuple of integers
/// (e.g. master seed, m, sequence index, shot) rather than by draw order, so
/// results do not depend on scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_key(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t acc = 0x6a09e667f3bcc908ULL;
  for (auto p : parts) acc = splitmix64(acc ^ splitmix64(p));
  return acc;
}

/// FNV-1a, used to fold names into stream keys.
inline std::uint64_t hash_name(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::mt19937_64 make_stream(std::initializer_list<std::uint64_t> parts) {
  return std::mt19937_64(stream_key(parts));
}

}  // namespace charb
