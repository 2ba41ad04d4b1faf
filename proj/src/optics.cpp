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

#include "dcsim/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dcsim {

Message apply_hwp(const Message &m, double theta_fast) {
    JonesPair j = to_jones(m);
    double c2 = std::cos(2.0 * theta_fast);
    double s2 = std::sin(2.0 * theta_fast);
    constexpr Complex minus_i{0.0, -1.0};
    return from_jones({minus_i * (c2 * j.h + s2 * j.v), minus_i * (s2 * j.h - c2 * j.v)});
}

double eom_rotation_angle(double reflectivity) {
    if (!(reflectivity >= 0.0 && reflectivity <= 0.5)) {
        throw InvalidArgument("reflectivity must lie in [0, 0.5]");
    }
    return std::asin(std::sqrt(reflectivity));
}

Message apply_eom(const Message &m, const EomSetting &s) {
    double theta = eom_rotation_angle(s.reflectivity);
    if (!s.voltage_on) {
        return m;
    }
    JonesPair j = to_jones(m);
    double c = std::cos(theta);
    double sn = std::sin(theta);
    return from_jones({c * j.h - sn * j.v, sn * j.h + c * j.v});
}

Message apply_phase_shift(const Message &m, double phi) {
    UnitPair rot = UnitPair::from_angle(phi);
    return {m.psi_h.rotated(rot), m.psi_v.rotated(rot), m.xi};
}

double reflectivity_from_voltage_unclamped(double v_eom, double beta, double v_pi) {
    if (!(v_eom >= 0.0) || !(beta > 0.0 && beta < std::numbers::pi / 4) || !(v_pi > 0.0)) {
        throw InvalidArgument("reflectivity_from_voltage: need v >= 0, 0 < beta < pi/4, v_pi > 0");
    }
    double a = std::sin(2.0 * beta);
    double b = std::sin(std::numbers::pi * v_eom / (2.0 * v_pi));
    return a * a * b * b;
}

double reflectivity_from_voltage(double v_eom, double beta, double v_pi) {
    return std::clamp(reflectivity_from_voltage_unclamped(v_eom, beta, v_pi), 0.0, 0.5);
}

}  // namespace dcsim
