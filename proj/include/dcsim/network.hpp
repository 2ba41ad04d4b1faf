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
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "dcsim/dlm_pbs.hpp"
#include "dcsim/message.hpp"
#include "dcsim/optics.hpp"
#include "dcsim/rng.hpp"

namespace dcsim {

class TopologyError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string key, const std::string &what)
        : std::runtime_error(what), key_(std::move(key)) {}
    const std::string &key() const { return key_; }

  private:
    std::string key_;
};

enum class UnitKind { source, dlm_pbs, hwp, eom, phase_shift, wollaston, detector, sink };

const char *to_string(UnitKind kind);

struct DetectorTally {
    std::uint64_t n_total = 0;
    std::array<std::uint64_t, 2> n_by_path{};
};

struct SourceUnit {};
struct DlmUnit {
    DlmPbs dlm;
    RngStream emit_rng;
};
struct HwpUnit {
    double theta_fast = 0.0;
};
struct EomUnit {
    EomSetting setting;
};
struct PhaseUnit {
    double phi = 0.0;
};
struct DetectorUnit {
    int index = 0;
    DetectorTally tally;
};
/// Absorbs messengers without registering them: a beam block or an unused port.
struct SinkUnit {
    std::uint64_t absorbed = 0;
};

using Unit = std::variant<SourceUnit, DlmUnit, HwpUnit, EomUnit, PhaseUnit, DetectorUnit, SinkUnit>;

struct UnitNode {
    std::string name;
    UnitKind kind;
    Unit unit;
};

using NodeId = std::size_t;

struct PortRef {
    NodeId node = 0;
    int port = 0;
    auto operator<=>(const PortRef &) const = default;
};

/// One stop of a messenger: the unit it just left, the channel it left
/// through (the detector index for detectors) and the message it carries.
struct Waypoint {
    std::uint64_t event = 0;
    const UnitNode *node = nullptr;
    int channel = 0;
    const Messenger *messenger = nullptr;
};

struct RouteHooks {
    std::function<void(const Waypoint &)> on_unit;
    /// Fired once per messenger right after it leaves the choice-point unit.
    std::function<void(std::uint64_t event, const Messenger &)> on_choice_point;
};

struct RouteOutcome {
    bool detected = false;
    int detector = -1;
    int path_label = -1;
    std::string terminal;
};

/// Directed acyclic network of processing units. Exactly one messenger is in
/// flight at a time; the only mutable state lives inside the units.
class OpticalNetwork {
  public:
    NodeId add_source(std::string name);
    NodeId add_dlm_pbs(std::string name, DlmPbs dlm, RngStream emit_rng);
    NodeId add_wollaston(std::string name, DlmPbs dlm, RngStream emit_rng);
    NodeId add_hwp(std::string name, double theta_fast);
    NodeId add_eom(std::string name, EomSetting setting);
    NodeId add_phase_shift(std::string name, double phi);
    NodeId add_detector(std::string name, int index);
    NodeId add_sink(std::string name);

    void connect(NodeId from, int out_port, NodeId to, int in_port);

    /// The unit whose exit channel becomes the messenger's path label.
    void set_path_splitter(NodeId node) { path_splitter_ = node; }
    /// The unit after which RouteHooks::on_choice_point fires.
    void set_choice_point(NodeId node) { choice_point_ = node; }

    /// Throws TopologyError on a missing source, an unwired output port, a
    /// wire into a nonexistent input port, or a cycle.
    void validate() const;

    /// Routes one messenger, emitted by the source, to a terminal unit.
    /// Throws TopologyError if it reaches a port with no continuation.
    RouteOutcome route_one(Messenger messenger, const RouteHooks &hooks = {});

    void set_eom_voltage(bool on);

    std::uint64_t events_routed() const { return events_routed_; }
    const std::vector<UnitNode> &nodes() const { return nodes_; }
    const std::map<PortRef, PortRef> &wires() const { return wires_; }
    std::optional<NodeId> find(const std::string &name) const;
    const UnitNode &node(const std::string &name) const;
    std::size_t count(UnitKind kind) const;
    const DetectorTally &tally(int detector_index) const;

    static int output_ports(UnitKind kind);
    static int input_ports(UnitKind kind);

  private:
    NodeId add(std::string name, UnitKind kind, Unit unit);

    std::vector<UnitNode> nodes_;
    std::map<PortRef, PortRef> wires_;
    std::optional<NodeId> source_;
    std::optional<NodeId> path_splitter_;
    std::optional<NodeId> choice_point_;
    std::uint64_t events_routed_ = 0;
};

enum class OutputOrder { hwp_then_eom, eom_then_hwp };

struct NetworkConfig {
    double reflectivity = 0.0;
    double phi = 0.0;
    double hwp_angle = 0.7853981633974483;  // 45 degrees
    double alpha = 0.99;
    std::uint64_t seed = 1;
    /// Prefix for every RNG stream id of this instance.
    std::string stream_prefix;
    /// Arm whose messengers are absorbed right after the input splitter.
    std::optional<int> blocked_arm;
    OutputOrder output_order = OutputOrder::hwp_then_eom;
};

/// The source message: equal H and V amplitude, both phases zero.
Message source_message();

/// A messenger fresh from the source, entering channel 0 of the input splitter.
Messenger emit_source(std::uint64_t event_index);

/// source -> pbs_input; arm 0 -> phase -> pbs_merge input 0; arm 1 -> pbs_merge
/// input 1; pbs_merge output 0 -> hwp -> eom -> wollaston -> {D0, D1};
/// pbs_merge output 1 -> merge_out1 (sink). A blocked arm ends in a sink.
/// Throws ConfigError naming the offending key.
OpticalNetwork build_delayed_choice_network(const NetworkConfig &cfg);

}  // namespace dcsim
