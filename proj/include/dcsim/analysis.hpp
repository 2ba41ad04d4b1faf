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

#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dcsim/experiment.hpp"

namespace dcsim {

class InsufficientData : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Normalized detector-0 intensity at one phase setting.
struct FringePoint {
    double phi = 0.0;
    std::uint64_t n = 0;
    std::uint64_t n0 = 0;
};

/// Least-squares fit of N0/N to c * (1 - V cos(phi - phi0)).
struct FringeFit {
    double v_hat = 0.0;
    /// Standard error of v_hat under binomial counting noise.
    double v_err = 0.0;
    double phase_offset = 0.0;
    double baseline = 0.0;
    double residual_rms = 0.0;
    /// (I_max - I_min) / (I_max + I_min); biased high under noise.
    double v_maxmin = 0.0;
};

/// Throws InsufficientData with fewer than 3 distinct phases or an empty cell.
FringeFit fit_visibility(std::span<const FringePoint> points);

/// Fringe points from the rows of one configuration.
std::vector<FringePoint> fringe_points(const CountTable &rows, Configuration config);

/// Same, for the path-y sub-series at detector 0 (normalized by the full row count).
std::vector<FringePoint> path_fringe_points(const CountTable &rows, Configuration config, int path);

struct Distinguishability {
    double d_hat = 0.0;
    double d_err = 0.0;
};

/// D = 1/2 sum_x |p(x | arm 0 open) - p(x | arm 1 open)| from the two
/// blocked-arm rows. Throws InsufficientData if either row has fewer than
/// 100 events.
Distinguishability distinguishability(const CountRow &arm0_blocked, const CountRow &arm1_blocked);

/// The same estimator conditioned on the simulation-only path label instead
/// of blocking an arm. Diagnostic; not used for headline numbers.
Distinguishability conditional_distinguishability(const CountRow &row);

double v_theory(double r);
double d_theory(double r);

/// (i0, i1) with i0 = 1/2 (1 - v_theory(R) cos(phi - phi0)).
std::pair<double, double> oracle_intensity(double phi, double r, double phi0 = 0.0);

struct DualityReport {
    double r = 0.0;
    std::optional<double> voltage;
    double v_hat = 0.0;
    double v_err = 0.0;
    double d_hat = 0.0;
    double d_err = 0.0;
    double v2 = 0.0;
    double d2 = 0.0;
    double sum = 0.0;
    bool operator==(const DualityReport &) const = default;
};

DualityReport make_duality_report(double r, std::optional<double> voltage, const FringeFit &fit,
                                  const Distinguishability &d);

/// Standard error of an estimate's square, for a Gaussian estimate with the
/// given mean and error: sqrt(4 m^2 s^2 + 2 s^4) (one component) or
/// sqrt(4 m^2 s^2 + 4 s^4) (amplitude of two components).
double squared_error(double mean, double err, int components);

}  // namespace dcsim
