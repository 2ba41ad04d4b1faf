// Copyright 2026 The dcsim Authors
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
#include <random>
#include <string>
#include <string_view>

namespace dcsim {

/// A named pseudo-random stream derived from a master seed.
///
/// The generator is std::mt19937_64, whose output sequence is fixed by the
/// C++ standard, seeded with splitmix64(seed ^ fnv1a64(stream_id)). Streams
/// with different ids never share state, so drawing from one leaves every
/// other stream untouched.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::string stream_id);

    std::uint64_t seed() const { return seed_; }
    const std::string &stream_id() const { return stream_id_; }

    /// Uniform in the open interval (0, 1).
    double uniform();

    /// 1 with probability p. Throws InvalidArgument unless 0 <= p <= 1.
    int bernoulli(double p);

    std::uint64_t next_u64() { return engine_(); }

  private:
    std::uint64_t seed_;
    std::string stream_id_;
    std::mt19937_64 engine_;
};

std::uint64_t fnv1a64(std::string_view text);
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace dcsim
