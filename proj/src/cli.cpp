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

#include "dcsim/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "dcsim/analysis.hpp"
#include "dcsim/io.hpp"
#include "dcsim/optics.hpp"

namespace dcsim {

namespace {

constexpr const char *kVersion = "0.1.0";

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::string trim(const std::string &s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string where(const std::string &key, const RawValue &raw) {
    return raw.line ? "config line " + std::to_string(raw.line) + ": " + key : key;
}

double to_double(const std::string &key, const RawValue &raw) {
    const std::string t = trim(raw.text);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw ConfigError(key, where(key, raw) + ": not a number: '" + raw.text + "'");
    }
    return v;
}

std::uint64_t to_u64(const std::string &key, const RawValue &raw) {
    const std::string t = trim(raw.text);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw ConfigError(key, where(key, raw) + ": not a non-negative integer: '" + raw.text + "'");
    }
    return v;
}

std::vector<double> to_list(const std::string &key, const RawValue &raw) {
    std::vector<double> out;
    std::stringstream in(raw.text);
    std::string item;
    while (std::getline(in, item, ',')) {
        out.push_back(to_double(key, {item, raw.line}));
    }
    if (out.empty()) {
        throw ConfigError(key, where(key, raw) + ": empty list");
    }
    return out;
}

bool to_bool(const std::string &key, const RawValue &raw) {
    const std::string t = trim(raw.text);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ConfigError(key, where(key, raw) + ": expected true or false");
}

std::string iso_now() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

std::ofstream open_out(const std::filesystem::path &path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    return f;
}

void close_checked(std::ofstream &f, const std::filesystem::path &path) {
    f.close();
    if (!f) throw IoError("failed writing " + path.string());
}

}  // namespace

const std::vector<std::string> &known_keys() {
    static const std::vector<std::string> keys = {
        "r",         "voltage",   "beta-deg", "v-pi",   "mode",    "phi-start", "phi-end",
        "phi-steps", "events",    "seed",     "alpha",  "hwp-deg", "warmup",    "out-dir",
        "trace",     "output-order", "phi"};
    return keys;
}

KeyValues read_config_text(std::istream &in) {
    KeyValues kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(lineno, "expected 'key = value'");
        }
        std::string key = trim(line.substr(0, eq));
        std::replace(key.begin(), key.end(), '_', '-');
        std::string value = trim(line.substr(eq + 1));
        const auto &keys = known_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw ParseError(lineno, "unknown key '" + key + "'");
        }
        kv[key] = {value, lineno};
    }
    return kv;
}

CliRequest resolve_request(const std::string &command, const KeyValues &file, const KeyValues &flags) {
    if (command != "sweep" && command != "duality" && command != "point") {
        throw ConfigError("command", "unknown command '" + command + "'");
    }
    KeyValues kv = file;
    for (const auto &[k, v] : flags) kv[k] = v;
    auto get = [&](const std::string &key) -> const RawValue * {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    CliRequest req;
    req.command = command;
    ExperimentConfig &cfg = req.config;
    cfg = default_config();
    if (command == "duality") {
        cfg.mode = Mode::closed;
    }

    if (auto *v = get("beta-deg")) {
        req.beta_deg = to_double("beta-deg", *v);
        if (!(req.beta_deg > 0.0 && req.beta_deg < 45.0)) {
            throw ConfigError("beta-deg", where("beta-deg", *v) + ": beta-deg out of range (0,45)");
        }
    }
    if (auto *v = get("v-pi")) {
        req.v_pi = to_double("v-pi", *v);
        if (!(req.v_pi > 0.0)) throw ConfigError("v-pi", where("v-pi", *v) + ": v-pi must be positive");
    }

    const RawValue *r_raw = get("r");
    const RawValue *volt_raw = get("voltage");
    if (r_raw && volt_raw) {
        throw ConfigError("voltage", "give either r or voltage, not both");
    }
    if (r_raw) {
        auto list = to_list("r", *r_raw);
        if (command != "duality" && list.size() != 1) {
            throw ConfigError("r", where("r", *r_raw) + ": expected a single value");
        }
        for (double r : list) {
            if (!(r >= 0.0 && r <= 0.5)) throw ConfigError("r", where("r", *r_raw) + ": r out of range [0,0.5]");
        }
        req.r_grid = list;
        req.voltages.assign(list.size(), std::nullopt);
    } else if (volt_raw) {
        auto list = to_list("voltage", *volt_raw);
        if (command != "duality" && list.size() != 1) {
            throw ConfigError("voltage", where("voltage", *volt_raw) + ": expected a single value");
        }
        for (double v : list) {
            if (!(v >= 0.0)) throw ConfigError("voltage", where("voltage", *volt_raw) + ": voltage must be >= 0");
            req.r_grid.push_back(
                reflectivity_from_voltage(v, req.beta_deg * std::numbers::pi / 180.0, req.v_pi));
            req.voltages.push_back(v);
        }
    } else if (command == "duality") {
        req.r_grid = {0.0, 0.05, 0.1, 0.2, 0.3, 0.43, 0.5};
        req.voltages.assign(req.r_grid.size(), std::nullopt);
    } else {
        req.r_grid = {cfg.r};
        req.voltages = {std::nullopt};
    }
    cfg.r = req.r_grid.front();

    if (auto *v = get("mode")) {
        auto mode = parse_mode(trim(v->text));
        if (!mode) {
            throw ConfigError("mode", where("mode", *v) + ": unknown mode '" + v->text +
                                          "' (delayed_choice|closed|open|blocked_arm0|blocked_arm1)");
        }
        cfg.mode = *mode;
    }
    double phi_start = 0.0;
    double phi_end = 2.0 * std::numbers::pi;
    std::uint64_t phi_steps = 36;
    if (auto *v = get("phi-start")) phi_start = to_double("phi-start", *v);
    if (auto *v = get("phi-end")) phi_end = to_double("phi-end", *v);
    if (auto *v = get("phi-steps")) {
        phi_steps = to_u64("phi-steps", *v);
        if (phi_steps < 3 || phi_steps > 100000) {
            throw ConfigError("phi-steps", where("phi-steps", *v) + ": phi-steps out of range [3,100000]");
        }
    }
    if (!(phi_end > phi_start)) {
        throw ConfigError("phi-end", "phi-end must be greater than phi-start");
    }
    cfg.phi_grid = make_phi_grid(phi_start, phi_end, phi_steps);
    if (auto *v = get("phi")) req.phi = to_double("phi", *v);

    if (auto *v = get("events")) {
        cfg.events_per_point = to_u64("events", *v);
        if (cfg.events_per_point < 1) throw ConfigError("events", where("events", *v) + ": events must be >= 1");
    }
    if (auto *v = get("seed")) cfg.seed = to_u64("seed", *v);
    if (auto *v = get("alpha")) {
        cfg.alpha = to_double("alpha", *v);
        if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
            throw ConfigError("alpha", where("alpha", *v) + ": alpha out of range (0,1)");
        }
    }
    if (auto *v = get("hwp-deg")) cfg.hwp_angle = to_double("hwp-deg", *v) * std::numbers::pi / 180.0;
    if (auto *v = get("warmup")) {
        cfg.warmup_fraction = to_double("warmup", *v);
        if (!(cfg.warmup_fraction >= 0.0 && cfg.warmup_fraction < 1.0)) {
            throw ConfigError("warmup", where("warmup", *v) + ": warmup out of range [0,1)");
        }
    }
    if (auto *v = get("output-order")) {
        std::string t = trim(v->text);
        if (t == "hwp-eom") cfg.output_order = OutputOrder::hwp_then_eom;
        else if (t == "eom-hwp") cfg.output_order = OutputOrder::eom_then_hwp;
        else throw ConfigError("output-order", where("output-order", *v) + ": expected hwp-eom or eom-hwp");
    }
    if (auto *v = get("out-dir")) req.out_dir = trim(v->text);
    if (auto *v = get("trace")) req.trace = to_bool("trace", *v);
    cfg.validate();

    auto &e = req.echo;
    std::string grid;
    for (std::size_t i = 0; i < req.r_grid.size(); ++i) grid += (i ? "," : "") + format_double(req.r_grid[i]);
    e["r"] = grid;
    std::string volts;
    for (std::size_t i = 0; i < req.voltages.size(); ++i) {
        volts += (i ? "," : "") + (req.voltages[i] ? format_double(*req.voltages[i]) : std::string());
    }
    e["voltage"] = volts;
    e["beta-deg"] = format_double(req.beta_deg);
    e["v-pi"] = format_double(req.v_pi);
    e["mode"] = to_string(cfg.mode);
    e["phi-start"] = format_double(phi_start);
    e["phi-end"] = format_double(phi_end);
    e["phi-steps"] = std::to_string(phi_steps);
    e["phi"] = format_double(req.phi);
    e["events"] = std::to_string(cfg.events_per_point);
    e["seed"] = std::to_string(cfg.seed);
    e["alpha"] = format_double(cfg.alpha);
    e["hwp-deg"] = format_double(cfg.hwp_angle * 180.0 / std::numbers::pi);
    e["warmup"] = format_double(cfg.warmup_fraction);
    e["output-order"] = cfg.output_order == OutputOrder::hwp_then_eom ? "hwp-eom" : "eom-hwp";
    return req;
}

CliRequest parse_cli(const std::vector<std::string> &args) {
    CLI::App app{"Event-by-event delayed-choice interferometer simulator", "dcsim"};
    app.require_subcommand(1);
    std::map<std::string, std::string> values;
    std::string config_path;
    bool trace = false;

    auto add_options = [&](CLI::App *sub) {
        for (const auto &key : known_keys()) {
            if (key == "trace") continue;
            sub->add_option("--" + key, values[key]);
        }
        sub->add_flag("--trace", trace, "Write a per-unit trace of every event");
        sub->add_option("--config", config_path, "Flat key = value config file");
    };
    add_options(app.add_subcommand("sweep", "Phase sweep at one R"));
    add_options(app.add_subcommand("duality", "V^2, D^2 scan over an R or voltage grid"));
    add_options(app.add_subcommand("point", "Single phase point"));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp &) {
        throw;
    } catch (const CLI::ParseError &e) {
        throw ConfigError("args", e.what());
    }

    CLI::App *sub = app.get_subcommands().front();
    KeyValues flags;
    for (const auto &key : known_keys()) {
        if (key == "trace") continue;
        if (sub->count("--" + key) > 0) flags[key] = {values[key], 0};
    }
    if (trace) flags["trace"] = {"true", 0};

    KeyValues file;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("config", "cannot read config file " + config_path);
        try {
            file = read_config_text(in);
        } catch (const ParseError &e) {
            throw ConfigError("config", config_path + ": " + e.what());
        }
    }
    return resolve_request(sub->get_name(), file, flags);
}

std::string run_id_for(const CliRequest &req) {
    std::string canonical = req.command;
    for (const auto &[k, v] : req.echo) {
        if (k == "out-dir") continue;
        canonical += ";" + k + "=" + v;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "run-%016llx", static_cast<unsigned long long>(fnv1a64(canonical)));
    return buf;
}

namespace {

void write_manifest(const std::filesystem::path &path, const CliRequest &req, const std::string &run_id,
                    const std::vector<std::string> &outputs) {
    nlohmann::ordered_json m;
    m["tool"] = "dcsim";
    m["version"] = kVersion;
    m["command"] = req.command;
    m["run_id"] = run_id;
    m["seed"] = req.config.seed;
    m["started_at"] = iso_now();
    m["config"] = req.echo;
    m["outputs"] = outputs;
    auto f = open_out(path);
    f << m.dump(2) << '\n';
    close_checked(f, path);
}

void write_fits(const std::filesystem::path &path, const CountTable &rows) {
    auto f = open_out(path);
    f << "config,v_hat,v_err,phase_offset,baseline,residual_rms,v_maxmin\n";
    for (Configuration c : {Configuration::open, Configuration::closed}) {
        auto pts = fringe_points(rows, c);
        if (pts.empty()) continue;
        FringeFit fit = fit_visibility(pts);
        f << to_string(c) << ',' << format_double(fit.v_hat) << ',' << format_double(fit.v_err) << ','
          << format_double(fit.phase_offset) << ',' << format_double(fit.baseline) << ','
          << format_double(fit.residual_rms) << ',' << format_double(fit.v_maxmin) << '\n';
    }
    close_checked(f, path);
}

}  // namespace

int execute(const CliRequest &req, std::ostream &out, std::ostream &err) {
    namespace fs = std::filesystem;
    try {
        fs::path dir(req.out_dir);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

        const std::string run_id = run_id_for(req);
        std::vector<std::string> outputs = {"counts.csv"};
        if (req.command != "point") {
            outputs.push_back("summary.csv");
        }
        if (req.command == "sweep") outputs.push_back("fits.csv");
        if (req.trace) outputs.push_back("trace.txt");
        write_manifest(dir / "manifest.json", req, run_id, outputs);

        std::ofstream trace_file;
        std::optional<TraceWriter> tracer;
        RunObserver observer;
        if (req.trace) {
            trace_file = open_out(dir / "trace.txt");
            tracer.emplace(trace_file);
            observer.hooks = tracer->hooks();
            observer.on_point = [&](std::size_t i, double phi) { tracer->begin_point(i, phi); };
        }
        const RunObserver *obs = req.trace ? &observer : nullptr;

        CountTable rows;
        if (req.command == "point") {
            if (tracer) tracer->begin_point(0, req.phi);
            rows = run_point(req.config, req.phi, 0, obs).rows;
        } else if (req.command == "sweep") {
            rows = run_phase_sweep(req.config, obs).rows;
        } else {
            for (double r : req.r_grid) {
                ExperimentConfig cfg = req.config;
                cfg.r = r;
                auto sweep = run_phase_sweep(cfg, obs);
                rows.insert(rows.end(), sweep.rows.begin(), sweep.rows.end());
                BlockedRuns blocked = run_distinguishability(cfg);
                rows.push_back(blocked.arm0_blocked);
                rows.push_back(blocked.arm1_blocked);
            }
        }
        for (auto &row : rows) row.run_id = run_id;

        {
            auto f = open_out(dir / "counts.csv");
            write_counts_csv(f, rows);
            close_checked(f, dir / "counts.csv");
        }
        if (req.command != "point") {
            auto summary = summarize_counts(rows, req.voltages);
            auto f = open_out(dir / "summary.csv");
            write_summary_csv(f, summary);
            close_checked(f, dir / "summary.csv");
            for (const auto &s : summary) {
                out << "r=" << format_double(s.r) << " v_hat=" << format_double(s.v_hat);
                if (s.d_hat) out << " d_hat=" << format_double(*s.d_hat) << " v2+d2=" << format_double(*s.v2_plus_d2);
                out << '\n';
            }
        }
        if (req.command == "sweep") write_fits(dir / "fits.csv", rows);
        if (req.trace) close_checked(trace_file, dir / "trace.txt");
        out << "wrote " << (dir / "counts.csv").string() << " (" << rows.size() << " rows), run " << run_id << '\n';
        return kExitOk;
    } catch (const IoError &e) {
        err << "dcsim: I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ConfigError &e) {
        err << "dcsim: configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception &e) {
        err << "dcsim: runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CliRequest req;
    try {
        req = parse_cli(args);
    } catch (const CLI::CallForHelp &) {
        out << "usage: dcsim {sweep|duality|point} [--r R[,R...]] [--voltage V[,V...]] [--beta-deg B]\n"
               "             [--v-pi V] [--mode M] [--phi-start A] [--phi-end B] [--phi-steps N]\n"
               "             [--events N] [--seed S] [--alpha A] [--hwp-deg D] [--warmup F]\n"
               "             [--output-order hwp-eom|eom-hwp] [--phi P] [--out-dir DIR] [--trace]\n"
               "             [--config FILE]\n";
        return kExitOk;
    } catch (const ConfigError &e) {
        err << "dcsim: configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParseError &e) {
        err << "dcsim: configuration error: " << e.what() << '\n';
        return kExitConfig;
    }
    return execute(req, out, err);
}

}  // namespace dcsim
