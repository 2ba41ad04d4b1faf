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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcsim/analysis.hpp"
#include "dcsim/experiment.hpp"

namespace dcsim {

class ParseError : public std::runtime_error {
  public:
    ParseError(std::size_t line, const std::string &what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

/// Shortest-safe text for a double: 17 significant digits, round-trips exactly.
std::string format_double(double value);

extern const char *const kCountsHeader;
extern const char *const kSummaryHeader;

void write_counts_csv(std::ostream &out, const CountTable &rows);
/// Throws ParseError with the 1-based line number on malformed input.
CountTable read_counts_csv(std::istream &in);

/// One line of the summary file. The distinguishability columns are empty
/// for plain phase sweeps; the voltage column is empty for R-parameterized runs.
struct SummaryRow {
    double r = 0.0;
    std::optional<double> voltage;
    double v_hat = 0.0;
    double v_err = 0.0;
    std::optional<double> d_hat;
    std::optional<double> d_err;
    double v2 = 0.0;
    std::optional<double> d2;
    std::optional<double> v2_plus_d2;
    bool operator==(const SummaryRow &) const = default;
};

SummaryRow to_summary_row(const DualityReport &rep);

void write_summary_csv(std::ostream &out, const std::vector<SummaryRow> &rows);
std::vector<SummaryRow> read_summary_csv(std::istream &in);

/// Recomputes the summary from counts alone: one row per distinct R in
/// first-appearance order. The fit uses closed rows (open rows when there
/// are none); D comes from the blocked-arm rows when both are present.
/// voltages[i], when given, labels the i-th distinct R.
std::vector<SummaryRow> summarize_counts(const CountTable &rows,
                                         const std::vector<std::optional<double>> &voltages = {});

/// Writes `event=n unit=<name> ch=<k> msg=<6 floats>` for every waypoint.
class TraceWriter {
  public:
    explicit TraceWriter(std::ostream &out) : out_(&out) {}
    RouteHooks hooks();
    void begin_point(std::size_t index, double phi);

  private:
    std::ostream *out_;
};

}  // namespace dcsim
