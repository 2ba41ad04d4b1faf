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

#include "dcsim/message.hpp"

namespace dcsim {

/// Electro-optic modulator setting: the effective reflectivity of the output
/// beam splitter when a voltage is applied, and whether it is applied.
struct EomSetting {
    double reflectivity = 0.0;
    bool voltage_on = false;
};

/// Half-wave plate with fast axis at theta_fast (radians):
/// (h, v) -> -i * [[cos 2t, sin 2t], [sin 2t, -cos 2t]] (h, v).
Message apply_hwp(const Message &m, double theta_fast);

/// With voltage off the message passes bit-identical. With voltage on the
/// polarization rotates by asin(sqrt(R)). Throws InvalidArgument if R is
/// outside [0, 0.5].
Message apply_eom(const Message &m, const EomSetting &s);

/// Rotates both phase pairs by phi; the polarization pair is unchanged.
Message apply_phase_shift(const Message &m, double phi);

/// R = sin^2(2 beta) * sin^2(pi * v / (2 v_pi)), clamped to [0, 0.5].
double reflectivity_from_voltage(double v_eom, double beta, double v_pi);

/// Same formula without the clamp.
double reflectivity_from_voltage_unclamped(double v_eom, double beta, double v_pi);

/// Rotation angle used by the modulator for a given reflectivity.
double eom_rotation_angle(double reflectivity);

}  // namespace dcsim
