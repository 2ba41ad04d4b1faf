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

#include "dcsim/rng.hpp"

#include "dcsim/message.hpp"

namespace dcsim {

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::string stream_id)
    : seed_(seed), stream_id_(std::move(stream_id)), engine_(splitmix64(seed ^ fnv1a64(stream_id_))) {}

double RngStream::uniform() {
    // 53 random bits placed at the centre of one of 2^53 equal cells: never 0, never 1.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

int RngStream::bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidArgument("bernoulli: p must lie in [0, 1]");
    }
    return uniform() < p ? 1 : 0;
}

}  // namespace dcsim
