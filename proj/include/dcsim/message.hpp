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
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace dcsim {

using Complex = std::complex<double>;

class InvalidArgument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a message or unit state has no amplitude to normalize.
class DegenerateState : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A unit vector in the plane, stored as (cos, sin) of an angle.
struct UnitPair {
    double c = 1.0;
    double s = 0.0;

    static UnitPair from_angle(double angle);
    /// Direction of (x, y); (1, 0) when both are zero.
    static UnitPair from_xy(double x, double y);

    double norm_sq() const { return c * c + s * s; }
    Complex phasor() const { return {c, s}; }
    /// Rotation by `other`'s angle (angle addition).
    UnitPair rotated(UnitPair other) const;

    bool operator==(const UnitPair &) const = default;
};

/// The six-component message carried by one messenger: the phase of the
/// horizontal component, the phase of the vertical component, and the
/// polarization angle, each as a (cos, sin) pair.
struct Message {
    UnitPair psi_h;
    UnitPair psi_v;
    UnitPair xi;

    std::array<double, 6> components() const {
        return {psi_h.c, psi_h.s, psi_v.c, psi_v.s, xi.c, xi.s};
    }
    /// Largest deviation of the three pairs from unit length.
    double max_norm_error() const;

    bool operator==(const Message &) const = default;
};

/// Builds a message from raw angles. Throws InvalidArgument on non-finite input.
Message make_message(double psi_h, double psi_v, double xi);

/// Two complex amplitudes (H, V) in the Jones picture.
struct JonesPair {
    Complex h;
    Complex v;

    double norm_sq() const { return std::norm(h) + std::norm(v); }
};

JonesPair to_jones(const Message &m);

/// Inverse of to_jones. A zero-amplitude component gets the phase pair (1, 0).
/// Throws DegenerateState when both amplitudes vanish.
Message from_jones(const JonesPair &j);

/// A message plus the bookkeeping the network needs: the interferometer arm
/// it took (set once, at the input beam splitter) and the input channel of
/// the unit it is about to enter.
class Messenger {
  public:
    Messenger() = default;
    Messenger(Message message, int channel) : message_(message), channel_(channel) {}

    const Message &message() const { return message_; }
    void set_message(const Message &m) { message_ = m; }

    int channel() const { return channel_; }
    void set_channel(int channel) { channel_ = channel; }

    const std::optional<int> &path_label() const { return path_label_; }
    /// Throws std::logic_error if the label was already assigned.
    void assign_path_label(int label);

  private:
    Message message_{};
    int channel_ = 0;
    std::optional<int> path_label_;
};

std::string to_string(const Message &m);

}  // namespace dcsim
