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

#include "dcsim/io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace dcsim {

const char *const kCountsHeader =
    "run_id,r,mode,config,phi_rad,n,n_d0,n_d1,n_d0_path0,n_d0_path1,n_d1_path0,n_d1_path1,seed";
const char *const kSummaryHeader = "r,voltage,v_hat,v_err,d_hat,d_err,v2,d2,v2_plus_d2";

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

namespace {

std::vector<std::string> split_csv(const std::string &line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

double parse_double(const std::string &text, std::size_t line, const char *column) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ParseError(line, std::string("bad number in column ") + column + ": '" + text + "'");
    }
    return v;
}

std::uint64_t parse_u64(const std::string &text, std::size_t line, const char *column) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ParseError(line, std::string("bad integer in column ") + column + ": '" + text + "'");
    }
    return v;
}

std::optional<double> parse_optional(const std::string &text, std::size_t line, const char *column) {
    if (text.empty()) return std::nullopt;
    return parse_double(text, line, column);
}

std::string format_optional(const std::optional<double> &v) { return v ? format_double(*v) : ""; }

void strip_cr(std::string &line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

void write_counts_csv(std::ostream &out, const CountTable &rows) {
    out << kCountsHeader << '\n';
    for (const auto &row : rows) {
        out << row.run_id << ',' << format_double(row.r) << ',' << to_string(row.mode) << ','
            << to_string(row.config) << ',' << format_double(row.phi) << ',' << row.n << ',' << row.n_d0
            << ',' << row.n_d1 << ',' << row.n_split[0][0] << ',' << row.n_split[0][1] << ','
            << row.n_split[1][0] << ',' << row.n_split[1][1] << ',' << row.seed << '\n';
    }
}

CountTable read_counts_csv(std::istream &in) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line)) {
        throw ParseError(lineno, "missing header");
    }
    strip_cr(line);
    if (line != kCountsHeader) {
        throw ParseError(lineno, "unexpected header");
    }
    CountTable rows;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != 13) {
            throw ParseError(lineno, "expected 13 columns, got " + std::to_string(f.size()));
        }
        CountRow row;
        row.run_id = f[0];
        row.r = parse_double(f[1], lineno, "r");
        auto mode = parse_mode(f[2]);
        if (!mode) throw ParseError(lineno, "unknown mode '" + f[2] + "'");
        row.mode = *mode;
        auto config = parse_configuration(f[3]);
        if (!config) throw ParseError(lineno, "unknown config '" + f[3] + "'");
        row.config = *config;
        row.phi = parse_double(f[4], lineno, "phi_rad");
        row.n = parse_u64(f[5], lineno, "n");
        row.n_d0 = parse_u64(f[6], lineno, "n_d0");
        row.n_d1 = parse_u64(f[7], lineno, "n_d1");
        row.n_split[0][0] = parse_u64(f[8], lineno, "n_d0_path0");
        row.n_split[0][1] = parse_u64(f[9], lineno, "n_d0_path1");
        row.n_split[1][0] = parse_u64(f[10], lineno, "n_d1_path0");
        row.n_split[1][1] = parse_u64(f[11], lineno, "n_d1_path1");
        row.seed = parse_u64(f[12], lineno, "seed");
        if (!row.consistent()) {
            throw ParseError(lineno, "counts do not add up");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

SummaryRow to_summary_row(const DualityReport &rep) {
    return {rep.r, rep.voltage, rep.v_hat, rep.v_err, rep.d_hat, rep.d_err, rep.v2, rep.d2, rep.sum};
}

void write_summary_csv(std::ostream &out, const std::vector<SummaryRow> &rows) {
    out << kSummaryHeader << '\n';
    for (const auto &s : rows) {
        out << format_double(s.r) << ',' << format_optional(s.voltage) << ',' << format_double(s.v_hat)
            << ',' << format_double(s.v_err) << ',' << format_optional(s.d_hat) << ','
            << format_optional(s.d_err) << ',' << format_double(s.v2) << ',' << format_optional(s.d2)
            << ',' << format_optional(s.v2_plus_d2) << '\n';
    }
}

std::vector<SummaryRow> read_summary_csv(std::istream &in) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line)) throw ParseError(lineno, "missing header");
    strip_cr(line);
    if (line != kSummaryHeader) throw ParseError(lineno, "unexpected header");
    std::vector<SummaryRow> rows;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != 9) {
            throw ParseError(lineno, "expected 9 columns, got " + std::to_string(f.size()));
        }
        SummaryRow s;
        s.r = parse_double(f[0], lineno, "r");
        s.voltage = parse_optional(f[1], lineno, "voltage");
        s.v_hat = parse_double(f[2], lineno, "v_hat");
        s.v_err = parse_double(f[3], lineno, "v_err");
        s.d_hat = parse_optional(f[4], lineno, "d_hat");
        s.d_err = parse_optional(f[5], lineno, "d_err");
        s.v2 = parse_double(f[6], lineno, "v2");
        s.d2 = parse_optional(f[7], lineno, "d2");
        s.v2_plus_d2 = parse_optional(f[8], lineno, "v2_plus_d2");
        rows.push_back(s);
    }
    return rows;
}

std::vector<SummaryRow> summarize_counts(const CountTable &rows,
                                         const std::vector<std::optional<double>> &voltages) {
    std::vector<double> order;
    std::map<double, CountTable> by_r;
    for (const auto &row : rows) {
        if (!by_r.contains(row.r)) order.push_back(row.r);
        by_r[row.r].push_back(row);
    }
    std::vector<SummaryRow> out;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const CountTable &group = by_r[order[i]];
        auto points = fringe_points(group, Configuration::closed);
        if (points.empty()) points = fringe_points(group, Configuration::open);
        FringeFit fit = fit_visibility(points);

        SummaryRow s;
        s.r = order[i];
        if (i < voltages.size()) s.voltage = voltages[i];
        s.v_hat = fit.v_hat;
        s.v_err = fit.v_err;
        s.v2 = fit.v_hat * fit.v_hat;

        const CountRow *arm0 = nullptr;
        const CountRow *arm1 = nullptr;
        for (const auto &row : group) {
            if (row.mode == Mode::blocked_arm0) arm0 = &row;
            if (row.mode == Mode::blocked_arm1) arm1 = &row;
        }
        if (arm0 && arm1) {
            Distinguishability d = distinguishability(*arm0, *arm1);
            s.d_hat = d.d_hat;
            s.d_err = d.d_err;
            s.d2 = d.d_hat * d.d_hat;
            s.v2_plus_d2 = s.v2 + *s.d2;
        }
        out.push_back(s);
    }
    return out;
}

RouteHooks TraceWriter::hooks() {
    RouteHooks h;
    h.on_unit = [out = out_](const Waypoint &w) {
        *out << "event=" << w.event << " unit=" << w.node->name << " ch=" << w.channel
             << " msg=" << to_string(w.messenger->message()) << '\n';
    };
    return h;
}

void TraceWriter::begin_point(std::size_t index, double phi) {
    *out_ << "# point=" << index << " phi=" << format_double(phi) << '\n';
}

}  // namespace dcsim
