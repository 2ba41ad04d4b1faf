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

#include "dcsim/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace dcsim {

const char *to_string(Mode mode) {
    switch (mode) {
        case Mode::delayed_choice: return "delayed_choice";
        case Mode::closed: return "closed";
        case Mode::open: return "open";
        case Mode::blocked_arm0: return "blocked_arm0";
        case Mode::blocked_arm1: return "blocked_arm1";
    }
    return "?";
}

const char *to_string(Configuration config) { return config == Configuration::open ? "open" : "closed"; }

std::optional<Mode> parse_mode(const std::string &text) {
    for (Mode m : {Mode::delayed_choice, Mode::closed, Mode::open, Mode::blocked_arm0, Mode::blocked_arm1}) {
        if (text == to_string(m)) {
            return m;
        }
    }
    return std::nullopt;
}

std::optional<Configuration> parse_configuration(const std::string &text) {
    if (text == "open") return Configuration::open;
    if (text == "closed") return Configuration::closed;
    return std::nullopt;
}

void ExperimentConfig::validate() const {
    if (!(r >= 0.0 && r <= 0.5)) {
        throw ConfigError("r", "r out of range [0,0.5]");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigError("alpha", "alpha out of range (0,1)");
    }
    if (events_per_point < 1) {
        throw ConfigError("events", "events must be at least 1");
    }
    if (phi_grid.empty()) {
        throw ConfigError("phi-steps", "phi grid is empty");
    }
    for (double phi : phi_grid) {
        if (!std::isfinite(phi)) {
            throw ConfigError("phi-start", "phi grid values must be finite");
        }
    }
    if (!std::isfinite(hwp_angle)) {
        throw ConfigError("hwp-deg", "hwp angle must be finite");
    }
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
        throw ConfigError("warmup", "warmup out of range [0,1)");
    }
}

std::vector<double> make_phi_grid(double start, double end, std::size_t n) {
    std::vector<double> grid;
    grid.reserve(n);
    double step = (end - start) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        grid.push_back(start + static_cast<double>(i) * step);
    }
    return grid;
}

std::vector<double> default_phi_grid() { return make_phi_grid(0.0, 2.0 * std::numbers::pi, 36); }

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    cfg.phi_grid = default_phi_grid();
    return cfg;
}

bool CountRow::consistent() const {
    return n == n_d0 + n_d1 && n_split[0][0] + n_split[0][1] == n_d0 &&
           n_split[1][0] + n_split[1][1] == n_d1;
}

std::string stream_prefix(const ExperimentConfig &cfg, Mode mode, std::size_t point_index) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "r=%.17g/%s/pt=%zu/", cfg.r, to_string(mode), point_index);
    return buf;
}

namespace {

// Checks, per event, that A_n is drawn after pbs_input and before any unit of
// the output beam splitter.
class ChoiceOrderGuard {
  public:
    void on_unit(const Waypoint &w) {
        if (w.event != event_) {
            event_ = w.event;
            left_input_ = false;
            drawn_ = false;
        }
        const std::string &name = w.node->name;
        if (name == "pbs_input") {
            left_input_ = true;
        } else if (is_output_unit(name) && !drawn_) {
            throw std::logic_error("A_n not drawn before " + name + " at event " + std::to_string(w.event));
        }
    }
    void on_choice(std::uint64_t event) {
        if (event != event_ || !left_input_ || drawn_) {
            throw std::logic_error("A_n drawn out of order at event " + std::to_string(event));
        }
        drawn_ = true;
    }

  private:
    static bool is_output_unit(const std::string &name) {
        return name == "phase" || name == "pbs_merge" || name == "hwp" || name == "eom" ||
               name == "wollaston" || name == "D0" || name == "D1";
    }
    std::uint64_t event_ = ~std::uint64_t{0};
    bool left_input_ = false;
    bool drawn_ = false;
};

CountRow blank_row(const ExperimentConfig &cfg, Mode mode, Configuration config, double phi) {
    CountRow row;
    row.r = cfg.r;
    row.mode = mode;
    row.config = config;
    row.phi = phi;
    row.seed = cfg.seed;
    return row;
}

}  // namespace

PointResult run_point(const ExperimentConfig &cfg, double phi, std::size_t point_index,
                      const RunObserver *observer) {
    cfg.validate();
    NetworkConfig ncfg;
    ncfg.reflectivity = cfg.r;
    ncfg.phi = phi;
    ncfg.hwp_angle = cfg.hwp_angle;
    ncfg.alpha = cfg.alpha;
    ncfg.seed = cfg.seed;
    ncfg.stream_prefix = stream_prefix(cfg, cfg.mode, point_index);
    ncfg.output_order = cfg.output_order;
    if (cfg.mode == Mode::blocked_arm0) ncfg.blocked_arm = 0;
    if (cfg.mode == Mode::blocked_arm1) ncfg.blocked_arm = 1;

    OpticalNetwork net = build_delayed_choice_network(ncfg);
    RngStream choice_rng(cfg.seed, ncfg.stream_prefix + "eom.choice");

    const bool delayed = cfg.mode == Mode::delayed_choice;
    net.set_eom_voltage(cfg.mode != Mode::open);

    PointResult result;
    result.slice.phi = phi;
    result.slice.records.reserve(cfg.events_per_point);

    const auto warmup_events =
        static_cast<std::uint64_t>(std::ceil(cfg.warmup_fraction * static_cast<double>(cfg.events_per_point)));

    ChoiceOrderGuard guard;
    int a_n = cfg.mode == Mode::open ? 0 : 1;
    RouteHooks hooks;
    hooks.on_unit = [&](const Waypoint &w) {
        if (delayed) {
            guard.on_unit(w);
        }
        if (w.node->name == "pbs_merge" && w.event >= warmup_events) {
            result.merge_exits[w.channel]++;
        }
        if (observer && observer->hooks.on_unit) {
            observer->hooks.on_unit(w);
        }
    };
    hooks.on_choice_point = [&](std::uint64_t event, const Messenger &m) {
        if (delayed) {
            guard.on_choice(event);
            a_n = choice_rng.bernoulli(0.5);
            net.set_eom_voltage(a_n == 1);
            if (observer && observer->on_choice) {
                observer->on_choice(event, a_n);
            }
        }
        if (observer && observer->hooks.on_choice_point) {
            observer->hooks.on_choice_point(event, m);
        }
    };

    const std::uint64_t max_routed = 1000 * cfg.events_per_point + 100000;
    std::uint64_t detected = 0;
    while (detected < cfg.events_per_point) {
        if (net.events_routed() >= max_routed) {
            throw std::runtime_error("too many undetected messengers; network is not delivering events");
        }
        RouteOutcome out = net.route_one(emit_source(net.events_routed()), hooks);
        if (!out.detected) {
            result.absorbed++;
            continue;
        }
        ++detected;
        result.slice.records.push_back({static_cast<std::uint8_t>(out.detector),
                                        static_cast<std::uint8_t>(out.path_label),
                                        static_cast<std::uint8_t>(a_n)});
    }

    auto tally_into = [&](CountRow &row, int want_a) {
        for (const EventRecord &e : result.slice.records) {
            if (want_a >= 0 && e.a != want_a) continue;
            row.n++;
            (e.x == 0 ? row.n_d0 : row.n_d1)++;
            row.n_split[e.x][e.y]++;
        }
    };
    if (delayed) {
        CountRow open = blank_row(cfg, cfg.mode, Configuration::open, phi);
        CountRow closed = blank_row(cfg, cfg.mode, Configuration::closed, phi);
        tally_into(open, 0);
        tally_into(closed, 1);
        result.rows = {open, closed};
    } else {
        CountRow row = blank_row(cfg, cfg.mode, cfg.mode == Mode::open ? Configuration::open : Configuration::closed, phi);
        tally_into(row, -1);
        result.rows = {row};
    }
    return result;
}

SweepResult run_phase_sweep(const ExperimentConfig &cfg, const RunObserver *observer) {
    cfg.validate();
    SweepResult sweep;
    sweep.gamma.r = cfg.r;
    sweep.gamma.mode = cfg.mode;
    sweep.gamma.events_per_point = cfg.events_per_point;
    sweep.gamma.seed = cfg.seed;
    for (std::size_t i = 0; i < cfg.phi_grid.size(); ++i) {
        if (observer && observer->on_point) {
            observer->on_point(i, cfg.phi_grid[i]);
        }
        PointResult point = run_point(cfg, cfg.phi_grid[i], i, observer);
        sweep.rows.insert(sweep.rows.end(), point.rows.begin(), point.rows.end());
        sweep.gamma.slices.push_back(std::move(point.slice));
        sweep.absorbed += point.absorbed;
    }
    return sweep;
}

PointResult run_delayed_choice(const ExperimentConfig &cfg, double phi, const RunObserver *observer) {
    ExperimentConfig dc = cfg;
    dc.mode = Mode::delayed_choice;
    return run_point(dc, phi, 0, observer);
}

BlockedRuns run_distinguishability(const ExperimentConfig &cfg) {
    cfg.validate();
    ExperimentConfig blocked = cfg;
    BlockedRuns runs;
    blocked.mode = Mode::blocked_arm0;
    runs.arm0_blocked = run_point(blocked, cfg.phi_grid.front(), 0).rows.front();
    blocked.mode = Mode::blocked_arm1;
    runs.arm1_blocked = run_point(blocked, cfg.phi_grid.front(), 0).rows.front();
    return runs;
}

}  // namespace dcsim
