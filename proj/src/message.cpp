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

#include "dcsim/message.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace dcsim {

UnitPair UnitPair::from_angle(double angle) { return {std::cos(angle), std::sin(angle)}; }

UnitPair UnitPair::from_xy(double x, double y) {
    double r = std::hypot(x, y);
    if (r == 0.0) {
        return {1.0, 0.0};
    }
    return {x / r, y / r};
}

UnitPair UnitPair::rotated(UnitPair other) const {
    return {c * other.c - s * other.s, s * other.c + c * other.s};
}

double Message::max_norm_error() const {
    return std::max({std::abs(psi_h.norm_sq() - 1.0), std::abs(psi_v.norm_sq() - 1.0),
                     std::abs(xi.norm_sq() - 1.0)});
}

Message make_message(double psi_h, double psi_v, double xi) {
    if (!std::isfinite(psi_h) || !std::isfinite(psi_v) || !std::isfinite(xi)) {
        throw InvalidArgument("make_message: angles must be finite");
    }
    return {UnitPair::from_angle(psi_h), UnitPair::from_angle(psi_v), UnitPair::from_angle(xi)};
}

JonesPair to_jones(const Message &m) {
    return {m.xi.c * m.psi_h.phasor(), m.xi.s * m.psi_v.phasor()};
}

Message from_jones(const JonesPair &j) {
    double ah = std::abs(j.h);
    double av = std::abs(j.v);
    if (ah == 0.0 && av == 0.0) {
        throw DegenerateState("from_jones: both amplitudes are zero");
    }
    return {UnitPair::from_xy(j.h.real(), j.h.imag()), UnitPair::from_xy(j.v.real(), j.v.imag()),
            UnitPair::from_xy(ah, av)};
}

void Messenger::assign_path_label(int label) {
    if (path_label_.has_value()) {
        throw std::logic_error("path label is already assigned");
    }
    path_label_ = label;
}

std::string to_string(const Message &m) {
    auto c = m.components();
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g %.17g %.17g", c[0], c[1], c[2], c[3],
                  c[4], c[5]);
    return buf;
}

}  // namespace dcsim
