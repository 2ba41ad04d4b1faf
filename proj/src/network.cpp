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

#include "dcsim/network.hpp"

#include <cmath>
#include <numbers>

namespace dcsim {

const char *to_string(UnitKind kind) {
    switch (kind) {
        case UnitKind::source: return "source";
        case UnitKind::dlm_pbs: return "dlm_pbs";
        case UnitKind::hwp: return "hwp";
        case UnitKind::eom: return "eom";
        case UnitKind::phase_shift: return "phase_shift";
        case UnitKind::wollaston: return "wollaston";
        case UnitKind::detector: return "detector";
        case UnitKind::sink: return "sink";
    }
    return "?";
}

int OpticalNetwork::output_ports(UnitKind kind) {
    switch (kind) {
        case UnitKind::dlm_pbs:
        case UnitKind::wollaston: return 2;
        case UnitKind::detector:
        case UnitKind::sink: return 0;
        default: return 1;
    }
}

int OpticalNetwork::input_ports(UnitKind kind) {
    switch (kind) {
        case UnitKind::source: return 0;
        case UnitKind::dlm_pbs: return 2;
        default: return 1;
    }
}

NodeId OpticalNetwork::add(std::string name, UnitKind kind, Unit unit) {
    if (find(name)) {
        throw TopologyError("duplicate unit name: " + name);
    }
    nodes_.push_back({std::move(name), kind, std::move(unit)});
    return nodes_.size() - 1;
}

NodeId OpticalNetwork::add_source(std::string name) {
    if (source_) {
        throw TopologyError("network already has a source");
    }
    source_ = add(std::move(name), UnitKind::source, SourceUnit{});
    return *source_;
}

NodeId OpticalNetwork::add_dlm_pbs(std::string name, DlmPbs dlm, RngStream emit_rng) {
    return add(std::move(name), UnitKind::dlm_pbs, DlmUnit{std::move(dlm), std::move(emit_rng)});
}

NodeId OpticalNetwork::add_wollaston(std::string name, DlmPbs dlm, RngStream emit_rng) {
    return add(std::move(name), UnitKind::wollaston, DlmUnit{std::move(dlm), std::move(emit_rng)});
}

NodeId OpticalNetwork::add_hwp(std::string name, double theta_fast) {
    return add(std::move(name), UnitKind::hwp, HwpUnit{theta_fast});
}

NodeId OpticalNetwork::add_eom(std::string name, EomSetting setting) {
    eom_rotation_angle(setting.reflectivity);  // validates R
    return add(std::move(name), UnitKind::eom, EomUnit{setting});
}

NodeId OpticalNetwork::add_phase_shift(std::string name, double phi) {
    return add(std::move(name), UnitKind::phase_shift, PhaseUnit{phi});
}

NodeId OpticalNetwork::add_detector(std::string name, int index) {
    return add(std::move(name), UnitKind::detector, DetectorUnit{index, {}});
}

NodeId OpticalNetwork::add_sink(std::string name) {
    return add(std::move(name), UnitKind::sink, SinkUnit{});
}

void OpticalNetwork::connect(NodeId from, int out_port, NodeId to, int in_port) {
    if (from >= nodes_.size() || to >= nodes_.size()) {
        throw TopologyError("connect: unknown node");
    }
    if (out_port < 0 || out_port >= output_ports(nodes_[from].kind)) {
        throw TopologyError("connect: " + nodes_[from].name + " has no output port " +
                            std::to_string(out_port));
    }
    if (in_port < 0 || in_port >= input_ports(nodes_[to].kind)) {
        throw TopologyError("connect: " + nodes_[to].name + " has no input port " +
                            std::to_string(in_port));
    }
    PortRef src{from, out_port};
    if (wires_.contains(src)) {
        throw TopologyError("connect: output " + std::to_string(out_port) + " of " +
                            nodes_[from].name + " is already wired");
    }
    for (const auto &[s, d] : wires_) {
        if (d == PortRef{to, in_port}) {
            throw TopologyError("connect: input " + std::to_string(in_port) + " of " +
                                nodes_[to].name + " is already wired");
        }
    }
    wires_[src] = {to, in_port};
}

void OpticalNetwork::validate() const {
    if (!source_) {
        throw TopologyError("network has no source");
    }
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        for (int p = 0; p < output_ports(nodes_[id].kind); ++p) {
            if (!wires_.contains({id, p})) {
                throw TopologyError("output " + std::to_string(p) + " of " + nodes_[id].name +
                                    " is not wired");
            }
        }
    }
    // Depth-first search for cycles: 0 = unvisited, 1 = on stack, 2 = done.
    std::vector<int> mark(nodes_.size(), 0);
    std::function<void(NodeId)> visit = [&](NodeId id) {
        mark[id] = 1;
        for (int p = 0; p < output_ports(nodes_[id].kind); ++p) {
            NodeId next = wires_.at({id, p}).node;
            if (mark[next] == 1) {
                throw TopologyError("network has a cycle through " + nodes_[next].name);
            }
            if (mark[next] == 0) {
                visit(next);
            }
        }
        mark[id] = 2;
    };
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        if (mark[id] == 0) {
            visit(id);
        }
    }
}

std::optional<NodeId> OpticalNetwork::find(const std::string &name) const {
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        if (nodes_[id].name == name) {
            return id;
        }
    }
    return std::nullopt;
}

const UnitNode &OpticalNetwork::node(const std::string &name) const {
    auto id = find(name);
    if (!id) {
        throw TopologyError("no unit named " + name);
    }
    return nodes_[*id];
}

std::size_t OpticalNetwork::count(UnitKind kind) const {
    std::size_t n = 0;
    for (const auto &node : nodes_) {
        n += node.kind == kind;
    }
    return n;
}

const DetectorTally &OpticalNetwork::tally(int detector_index) const {
    for (const auto &node : nodes_) {
        if (const auto *d = std::get_if<DetectorUnit>(&node.unit); d && d->index == detector_index) {
            return d->tally;
        }
    }
    throw TopologyError("no detector with index " + std::to_string(detector_index));
}

void OpticalNetwork::set_eom_voltage(bool on) {
    for (auto &node : nodes_) {
        if (auto *e = std::get_if<EomUnit>(&node.unit)) {
            e->setting.voltage_on = on;
        }
    }
}

namespace {

struct Step {
    // Output channel taken, or the detector index for terminals.
    int channel = 0;
    bool terminal = false;
};

}  // namespace

RouteOutcome OpticalNetwork::route_one(Messenger messenger, const RouteHooks &hooks) {
    if (!source_) {
        throw TopologyError("network has no source");
    }
    const std::uint64_t event = events_routed_++;
    NodeId current = *source_;
    int in_port = 0;
    RouteOutcome outcome;

    // Bounded by the node count on an acyclic network.
    for (std::size_t hops = 0; hops <= nodes_.size(); ++hops) {
        UnitNode &node = nodes_[current];
        messenger.set_channel(in_port);
        Step step = std::visit(
            [&](auto &unit) -> Step {
                using T = std::decay_t<decltype(unit)>;
                if constexpr (std::is_same_v<T, SourceUnit>) {
                    return {0, false};
                } else if constexpr (std::is_same_v<T, DlmUnit>) {
                    Emission e = unit.dlm.process(in_port, messenger.message(), unit.emit_rng);
                    messenger.set_message(e.message);
                    return {e.channel, false};
                } else if constexpr (std::is_same_v<T, HwpUnit>) {
                    messenger.set_message(apply_hwp(messenger.message(), unit.theta_fast));
                    return {0, false};
                } else if constexpr (std::is_same_v<T, EomUnit>) {
                    messenger.set_message(apply_eom(messenger.message(), unit.setting));
                    return {0, false};
                } else if constexpr (std::is_same_v<T, PhaseUnit>) {
                    messenger.set_message(apply_phase_shift(messenger.message(), unit.phi));
                    return {0, false};
                } else if constexpr (std::is_same_v<T, DetectorUnit>) {
                    const auto &label = messenger.path_label();
                    unit.tally.n_total++;
                    if (label) {
                        unit.tally.n_by_path[*label]++;
                    }
                    return {unit.index, true};
                } else {
                    unit.absorbed++;
                    return {0, true};
                }
            },
            node.unit);

        if (path_splitter_ && current == *path_splitter_) {
            messenger.assign_path_label(step.channel);
        }
        if (hooks.on_unit) {
            hooks.on_unit(Waypoint{event, &node, step.channel, &messenger});
        }
        if (step.terminal) {
            outcome.terminal = node.name;
            outcome.path_label = messenger.path_label().value_or(-1);
            if (node.kind == UnitKind::detector) {
                outcome.detected = true;
                outcome.detector = step.channel;
            }
            return outcome;
        }
        if (choice_point_ && current == *choice_point_ && hooks.on_choice_point) {
            hooks.on_choice_point(event, messenger);
        }
        auto wire = wires_.find({current, step.channel});
        if (wire == wires_.end()) {
            throw TopologyError("messenger left " + node.name + " through unwired output " +
                                std::to_string(step.channel));
        }
        current = wire->second.node;
        in_port = wire->second.port;
    }
    throw TopologyError("messenger did not reach a terminal unit");
}

Message source_message() { return make_message(0.0, 0.0, std::numbers::pi / 4); }

Messenger emit_source(std::uint64_t /*event_index*/) { return Messenger(source_message(), 0); }

OpticalNetwork build_delayed_choice_network(const NetworkConfig &cfg) {
    if (!(cfg.reflectivity >= 0.0 && cfg.reflectivity <= 0.5)) {
        throw ConfigError("r", "r out of range [0,0.5]");
    }
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
        throw ConfigError("alpha", "alpha out of range (0,1)");
    }
    if (!std::isfinite(cfg.phi)) {
        throw ConfigError("phi", "phi must be finite");
    }
    if (!std::isfinite(cfg.hwp_angle)) {
        throw ConfigError("hwp-deg", "hwp angle must be finite");
    }
    if (cfg.blocked_arm && *cfg.blocked_arm != 0 && *cfg.blocked_arm != 1) {
        throw ConfigError("mode", "blocked arm must be 0 or 1");
    }

    const std::string &pre = cfg.stream_prefix;
    auto dlm = [&](const std::string &name) {
        RngStream init_rng(cfg.seed, pre + name + ".init");
        return DlmPbs::init(cfg.alpha, init_rng);
    };
    auto emit_rng = [&](const std::string &name) { return RngStream(cfg.seed, pre + name + ".emit"); };

    OpticalNetwork net;
    NodeId source = net.add_source("source");
    NodeId pbs_in = net.add_dlm_pbs("pbs_input", dlm("pbs_input"), emit_rng("pbs_input"));
    NodeId phase = net.add_phase_shift("phase", cfg.phi);
    NodeId merge = net.add_dlm_pbs("pbs_merge", dlm("pbs_merge"), emit_rng("pbs_merge"));
    NodeId hwp = net.add_hwp("hwp", cfg.hwp_angle);
    NodeId eom = net.add_eom("eom", {cfg.reflectivity, false});
    NodeId woll = net.add_wollaston("wollaston", dlm("wollaston"), emit_rng("wollaston"));
    NodeId d0 = net.add_detector("D0", 0);
    NodeId d1 = net.add_detector("D1", 1);
    NodeId dump = net.add_sink("merge_out1");

    net.connect(source, 0, pbs_in, 0);
    if (cfg.blocked_arm == 0) {
        net.connect(pbs_in, 0, net.add_sink("block_arm0"), 0);
    } else {
        net.connect(pbs_in, 0, phase, 0);
    }
    net.connect(phase, 0, merge, 0);
    if (cfg.blocked_arm == 1) {
        net.connect(pbs_in, 1, net.add_sink("block_arm1"), 0);
    } else {
        net.connect(pbs_in, 1, merge, 1);
    }
    net.connect(merge, 1, dump, 0);
    if (cfg.output_order == OutputOrder::hwp_then_eom) {
        net.connect(merge, 0, hwp, 0);
        net.connect(hwp, 0, eom, 0);
        net.connect(eom, 0, woll, 0);
    } else {
        net.connect(merge, 0, eom, 0);
        net.connect(eom, 0, hwp, 0);
        net.connect(hwp, 0, woll, 0);
    }
    net.connect(woll, 0, d0, 0);
    net.connect(woll, 1, d1, 0);

    net.set_path_splitter(pbs_in);
    net.set_choice_point(pbs_in);
    net.validate();
    return net;
}

}  // namespace dcsim
