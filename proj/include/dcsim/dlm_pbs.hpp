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

#include <array>
#include <string>

#include "dcsim/message.hpp"
#include "dcsim/rng.hpp"

namespace dcsim {

/// Amplitudes (H, V) on output channels 0 and 1 of a polarizing beam splitter.
struct AmplitudeQuad {
    Complex b0_h;
    Complex b0_v;
    Complex b1_h;
    Complex b1_v;

    double norm_sq() const {
        return std::norm(b0_h) + std::norm(b0_v) + std::norm(b1_h) + std::norm(b1_v);
    }
};

/// Result of the output stage: the channel the messenger leaves through and
/// the message it carries.
struct Emission {
    int channel = 0;
    Message message;
};

/// Deterministic part of the output stage, before the channel is drawn.
struct OutputWeights {
    double u_sq = 0.0;  // weight of output channel 0
    double v_sq = 0.0;  // weight of output channel 1
    /// Raw (p0, p1, p2, p3) for channel 0 and (q0, q1, q2, q3) for channel 1.
    std::array<double, 4> p{};
    std::array<double, 4> q{};
};

/// Event-based polarizing beam splitter built around a deterministic learning
/// machine. Two input channels, two output channels. The unit remembers the
/// last message seen on each input channel in three (cos, sin) registers and
/// keeps an internal vector x = (x0, x1) on the simplex that tracks how
/// often each input channel has been hit recently.
///
/// Used with all traffic on channel 0 it doubles as a Wollaston prism.
class DlmPbs {
  public:
    struct State {
        std::array<UnitPair, 2> y_h;
        std::array<UnitPair, 2> y_v;
        std::array<UnitPair, 2> y_p;
        std::array<double, 2> x{0.5, 0.5};
        double alpha = 0.99;
    };

    /// x = (r, 1 - r) with r uniform; every register gets a uniformly random
    /// direction. Throws InvalidArgument unless 0 < alpha < 1.
    static DlmPbs init(double alpha, RngStream &rng);

    /// Wraps an explicit state. Checks alpha and the simplex constraint on x.
    explicit DlmPbs(const State &state);

    const State &state() const { return state_; }
    double alpha() const { return state_.alpha; }

    /// x_i <- alpha * x_i + (1 - alpha) * [i == k]
    void update_internal(int k);

    /// Overwrites the channel-k registers with m; channel 1-k is untouched.
    void store_registers(int k, const Message &m);

    /// Transformation stage: builds (a0H, a0V, a1H, a1V) from the registers
    /// and applies the beam-splitter matrix (H transmitted, V reflected with a
    /// factor i).
    AmplitudeQuad transform() const;

    /// The input amplitudes (a0H, a0V, a1H, a1V) in that order.
    std::array<Complex, 4> input_amplitudes() const;

    OutputWeights output_weights() const;

    /// Output stage: channel 0 if u^2 > r for a fresh uniform r, else channel 1.
    /// Throws DegenerateState if both channel weights vanish.
    Emission emit(RngStream &rng) const;

    /// store_registers, update_internal, emit, in that order.
    Emission process(int k, const Message &m, RngStream &rng);

    std::string describe() const;

  private:
    State state_;
};

/// Output message for a channel given its raw (H cos, H sin, V cos, V sin)
/// components. Zero-amplitude components get the phase pair (1, 0).
Message normalized_output(const std::array<double, 4> &raw);

}  // namespace dcsim
