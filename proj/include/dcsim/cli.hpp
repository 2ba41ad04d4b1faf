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

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dcsim/experiment.hpp"

namespace dcsim {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitRuntime = 3, kExitIo = 4 };

/// A raw setting and the config-file line it came from (0 for flags).
struct RawValue {
    std::string text;
    std::size_t line = 0;
};
using KeyValues = std::map<std::string, RawValue>;

/// Keys accepted both as `--flag` and in config files.
const std::vector<std::string> &known_keys();

/// Parses flat `key = value` lines with `#` comments. Underscores in keys are
/// read as dashes. Throws ParseError (with line number) on malformed lines
/// and unknown keys.
KeyValues read_config_text(std::istream &in);

struct CliRequest {
    std::string command;  // sweep, duality or point
    ExperimentConfig config;
    /// R values for duality scans, with the voltage that produced each (if any).
    std::vector<double> r_grid;
    std::vector<std::optional<double>> voltages;
    double beta_deg = 24.0;
    double v_pi = 217.0;
    double phi = 0.0;  // point command
    std::string out_dir = ".";
    bool trace = false;
    /// Effective settings after file and flag merging, for the manifest.
    std::map<std::string, std::string> echo;
};

/// Flags override file keys; missing keys take the defaults (alpha 0.99,
/// 10000 events, 36 phases over [0, 2 pi), HWP at 45 degrees, delayed choice).
/// Throws ConfigError naming the offending key.
CliRequest resolve_request(const std::string &command, const KeyValues &file, const KeyValues &flags);

/// Full argument parsing including --config. Throws ConfigError / ParseError.
CliRequest parse_cli(const std::vector<std::string> &args);

/// Stable identifier for the run, derived from the command and effective config.
std::string run_id_for(const CliRequest &req);

/// Runs a parsed request and writes its files. Returns the exit code.
int execute(const CliRequest &req, std::ostream &out, std::ostream &err);

/// Entry point used by the dcsim executable. args excludes the program name.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace dcsim
