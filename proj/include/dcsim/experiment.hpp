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
#include <optional>
#include <string>
#include <vector>

#include "dcsim/network.hpp"

namespace dcsim {

enum class Mode { delayed_choice, closed, open, blocked_arm0, blocked_arm1 };
enum class Configuration { open, closed };

const char *to_string(Mode mode);
const char *to_string(Configuration config);
std::optional<Mode> parse_mode(const std::string &text);
std::optional<Configuration> parse_configuration(const std::string &text);

struct ExperimentConfig {
    double r = 0.5;
    Mode mode = Mode::delayed_choice;
    std::vector<double> phi_grid;
    std::uint64_t events_per_point = 10000;
    std::uint64_t seed = 20080530;
    double alpha = 0.99;
    double hwp_angle = 0.7853981633974483;
    /// Leading fraction of routed events excluded from the merge-exit statistics.
    double warmup_fraction = 0.0;
    OutputOrder output_order = OutputOrder::hwp_then_eom;

    /// Throws ConfigError naming the first offending key.
    void validate() const;
};

/// n points start, start + step, ... with step = (end - start) / n (end excluded).
std::vector<double> make_phi_grid(double start, double end, std::size_t n);

/// The 36-point grid over [0, 2 pi).
std::vector<double> default_phi_grid();

ExperimentConfig default_config();

/// One detection: which detector fired, which arm the messenger took, and
/// whether the modulator voltage was applied.
struct EventRecord {
    std::uint8_t x = 0;
    std::uint8_t y = 0;
    std::uint8_t a = 0;
    bool operator==(const EventRecord &) const = default;
};

/// Counts for one (phi, configuration) cell. n_split[x][y] counts events at
/// detector x from arm y.
struct CountRow {
    std::string run_id;
    double r = 0.0;
    Mode mode = Mode::closed;
    Configuration config = Configuration::closed;
    double phi = 0.0;
    std::uint64_t n = 0;
    std::uint64_t n_d0 = 0;
    std::uint64_t n_d1 = 0;
    std::array<std::array<std::uint64_t, 2>, 2> n_split{};
    std::uint64_t seed = 0;

    /// n = n_d0 + n_d1 and each detector's path split sums to its count.
    bool consistent() const;
    double frac_d0() const { return n == 0 ? 0.0 : static_cast<double>(n_d0) / static_cast<double>(n); }
    bool operator==(const CountRow &) const = default;
};

using CountTable = std::vector<CountRow>;

struct GammaSlice {
    double phi = 0.0;
    std::vector<EventRecord> records;
};

/// Per-event records of a run plus the settings that produced them.
struct GammaDataset {
    double r = 0.0;
    Mode mode = Mode::closed;
    std::uint64_t events_per_point = 0;
    std::uint64_t seed = 0;
    std::vector<GammaSlice> slices;
};

struct PointResult {
    CountTable rows;
    GammaSlice slice;
    /// Messengers absorbed by a block or the unused merge port.
    std::uint64_t absorbed = 0;
    /// Exit channels of pbs_merge for events past the warm-up window.
    std::array<std::uint64_t, 2> merge_exits{};
};

/// Callbacks forwarded to every route_one call (tracing, tests).
struct RunObserver {
    RouteHooks hooks;
    /// Fired with the event index and the drawn A_n in delayed-choice mode.
    std::function<void(std::uint64_t, int)> on_choice;
    /// Fired by run_phase_sweep before each phase point.
    std::function<void(std::size_t, double)> on_point;
};

/// Builds a fresh network and routes messengers until events_per_point of
/// them are detected. Blocked modes run the closed configuration with one arm
/// absorbed. Delayed-choice mode draws A_n after the input splitter and before
/// anything in the output beam splitter; the two rows it returns are the
/// open (A_n = 0) and closed (A_n = 1) partitions.
PointResult run_point(const ExperimentConfig &cfg, double phi, std::size_t point_index,
                      const RunObserver *observer = nullptr);

struct SweepResult {
    CountTable rows;
    GammaDataset gamma;
    std::uint64_t absorbed = 0;
};

SweepResult run_phase_sweep(const ExperimentConfig &cfg, const RunObserver *observer = nullptr);

/// run_point with the mode forced to delayed_choice.
PointResult run_delayed_choice(const ExperimentConfig &cfg, double phi, const RunObserver *observer = nullptr);

struct BlockedRuns {
    CountRow arm0_blocked;
    CountRow arm1_blocked;
};

/// Closed configuration with arm 0 blocked and then arm 1 blocked, at the
/// first phase of the grid.
BlockedRuns run_distinguishability(const ExperimentConfig &cfg);

/// Deterministic stream prefix for one point of a run.
std::string stream_prefix(const ExperimentConfig &cfg, Mode mode, std::size_t point_index);

}  // namespace dcsim
