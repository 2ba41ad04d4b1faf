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

#include "dcsim/dlm_pbs.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace dcsim {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidArgument("alpha must lie in the open interval (0, 1)");
    }
}

void check_channel(int k) {
    if (k != 0 && k != 1) {
        throw InvalidArgument("channel must be 0 or 1");
    }
}

}  // namespace

DlmPbs DlmPbs::init(double alpha, RngStream &rng) {
    check_alpha(alpha);
    State s;
    s.alpha = alpha;
    double r = rng.uniform();
    s.x = {r, 1.0 - r};
    for (int k = 0; k < 2; ++k) {
        s.y_h[k] = UnitPair::from_angle(2.0 * std::numbers::pi * rng.uniform());
        s.y_v[k] = UnitPair::from_angle(2.0 * std::numbers::pi * rng.uniform());
        s.y_p[k] = UnitPair::from_angle(2.0 * std::numbers::pi * rng.uniform());
    }
    return DlmPbs(s);
}

DlmPbs::DlmPbs(const State &state) : state_(state) {
    check_alpha(state.alpha);
    const auto &x = state.x;
    if (!(x[0] >= 0.0 && x[1] >= 0.0) || std::abs(x[0] + x[1] - 1.0) > 1e-12) {
        throw InvalidArgument("internal vector must satisfy x0 + x1 = 1 with x0, x1 >= 0");
    }
}

void DlmPbs::update_internal(int k) {
    check_channel(k);
    // Same rule written as x_other *= alpha, x_k = 1 - x_other: the sum stays
    // exactly 1 and x_k reaches 1 without a rounding floor below it.
    state_.x[1 - k] *= state_.alpha;
    state_.x[k] = 1.0 - state_.x[1 - k];
}

void DlmPbs::store_registers(int k, const Message &m) {
    check_channel(k);
    state_.y_h[k] = m.psi_h;
    state_.y_v[k] = m.psi_v;
    state_.y_p[k] = m.xi;
}

std::array<Complex, 4> DlmPbs::input_amplitudes() const {
    const auto &s = state_;
    double r0 = std::sqrt(s.x[0]);
    double r1 = std::sqrt(s.x[1]);
    return {
        s.y_h[0].phasor() * (s.y_p[0].c * r0),
        s.y_v[0].phasor() * (s.y_p[0].s * r0),
        s.y_h[1].phasor() * (s.y_p[1].c * r1),
        s.y_v[1].phasor() * (s.y_p[1].s * r1),
    };
}

AmplitudeQuad DlmPbs::transform() const {
    constexpr Complex i{0.0, 1.0};
    auto a = input_amplitudes();
    return {a[0], i * a[3], a[2], i * a[1]};
}

OutputWeights DlmPbs::output_weights() const {
    const auto &s = state_;
    double r0 = std::sqrt(s.x[0]);
    double r1 = std::sqrt(s.x[1]);
    OutputWeights w;
    // Channel 0: H transmitted from input 0, V reflected from input 1.
    w.p = {s.y_h[0].c * s.y_p[0].c * r0, s.y_h[0].s * s.y_p[0].c * r0,
           -s.y_v[1].s * s.y_p[1].s * r1, s.y_v[1].c * s.y_p[1].s * r1};
    // Channel 1: H transmitted from input 1, V reflected from input 0.
    w.q = {s.y_h[1].c * s.y_p[1].c * r1, s.y_h[1].s * s.y_p[1].c * r1,
           -s.y_v[0].s * s.y_p[0].s * r0, s.y_v[0].c * s.y_p[0].s * r0};
    for (int j = 0; j < 4; ++j) {
        w.u_sq += w.p[j] * w.p[j];
        w.v_sq += w.q[j] * w.q[j];
    }
    return w;
}

Message normalized_output(const std::array<double, 4> &raw) {
    double h = std::hypot(raw[0], raw[1]);
    double v = std::hypot(raw[2], raw[3]);
    return {UnitPair::from_xy(raw[0], raw[1]), UnitPair::from_xy(raw[2], raw[3]),
            UnitPair::from_xy(h, v)};
}

Emission DlmPbs::emit(RngStream &rng) const {
    OutputWeights w = output_weights();
    if (w.u_sq == 0.0 && w.v_sq == 0.0) {
        throw DegenerateState("DLM beam splitter has no amplitude on either output channel");
    }
    double r = rng.uniform();
    bool channel0 = w.u_sq > r;
    if (!channel0 && w.v_sq == 0.0) {
        // Rounding can leave u^2 a hair below 1 with nothing on channel 1.
        channel0 = true;
    }
    if (channel0) {
        return {0, normalized_output(w.p)};
    }
    return {1, normalized_output(w.q)};
}

Emission DlmPbs::process(int k, const Message &m, RngStream &rng) {
    store_registers(k, m);
    update_internal(k);
    return emit(rng);
}

std::string DlmPbs::describe() const {
    std::ostringstream out;
    out.precision(17);
    const auto &s = state_;
    out << "x=(" << s.x[0] << "," << s.x[1] << ")";
    for (int k = 0; k < 2; ++k) {
        out << " y" << k << "=(" << s.y_h[k].c << "," << s.y_h[k].s << "," << s.y_v[k].c << ","
            << s.y_v[k].s << "," << s.y_p[k].c << "," << s.y_p[k].s << ")";
    }
    return out.str();
}

}  // namespace dcsim
