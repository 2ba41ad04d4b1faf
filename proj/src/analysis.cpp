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

#include "dcsim/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace dcsim {

namespace {

std::size_t distinct_phases(std::span<const FringePoint> points) {
    std::vector<double> wrapped;
    for (const auto &p : points) {
        double w = std::fmod(p.phi, 2.0 * std::numbers::pi);
        if (w < 0) w += 2.0 * std::numbers::pi;
        wrapped.push_back(w);
    }
    std::sort(wrapped.begin(), wrapped.end());
    std::size_t n = 0;
    for (std::size_t i = 0; i < wrapped.size(); ++i) {
        if (i == 0 || wrapped[i] - wrapped[i - 1] > 1e-12) ++n;
    }
    if (n > 1 && wrapped.front() + 2.0 * std::numbers::pi - wrapped.back() <= 1e-12) --n;
    return n;
}

}  // namespace

FringeFit fit_visibility(std::span<const FringePoint> points) {
    if (distinct_phases(points) < 3) {
        throw InsufficientData("fit_visibility: need at least 3 distinct phases");
    }
    const auto m = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd x(m, 3);
    Eigen::VectorXd y(m);
    Eigen::VectorXd var(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto &p = points[static_cast<std::size_t>(i)];
        if (p.n == 0) {
            throw InsufficientData("fit_visibility: empty count cell");
        }
        double f = static_cast<double>(p.n0) / static_cast<double>(p.n);
        x(i, 0) = 1.0;
        x(i, 1) = std::cos(p.phi);
        x(i, 2) = std::sin(p.phi);
        y(i) = f;
        var(i) = f * (1.0 - f) / static_cast<double>(p.n);
    }
    Eigen::Matrix3d xtx_inv = (x.transpose() * x).inverse();
    Eigen::Vector3d beta = xtx_inv * (x.transpose() * y);
    // Sandwich covariance for heteroscedastic binomial noise.
    Eigen::Matrix3d meat = x.transpose() * var.asDiagonal() * x;
    Eigen::Matrix3d cov = xtx_inv * meat * xtx_inv;

    FringeFit fit;
    double c = beta(0);
    double amp = std::hypot(beta(1), beta(2));
    fit.baseline = c;
    fit.v_hat = amp / c;
    fit.phase_offset = amp == 0.0 ? 0.0 : std::atan2(-beta(2), -beta(1));
    if (amp > 0.0) {
        Eigen::Vector3d grad(-fit.v_hat / c, beta(1) / (c * amp), beta(2) / (c * amp));
        fit.v_err = std::sqrt(std::max(0.0, grad.dot(cov * grad)));
    } else {
        fit.v_err = std::sqrt(std::max(0.0, 0.5 * (cov(1, 1) + cov(2, 2)))) / c;
    }
    Eigen::VectorXd resid = y - x * beta;
    fit.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(m));
    double hi = y.maxCoeff();
    double lo = y.minCoeff();
    fit.v_maxmin = hi + lo > 0.0 ? (hi - lo) / (hi + lo) : 0.0;
    return fit;
}

std::vector<FringePoint> fringe_points(const CountTable &rows, Configuration config) {
    std::vector<FringePoint> points;
    for (const auto &row : rows) {
        if (row.config == config && row.mode != Mode::blocked_arm0 && row.mode != Mode::blocked_arm1) {
            points.push_back({row.phi, row.n, row.n_d0});
        }
    }
    return points;
}

std::vector<FringePoint> path_fringe_points(const CountTable &rows, Configuration config, int path) {
    std::vector<FringePoint> points;
    for (const auto &row : rows) {
        if (row.config == config && row.mode != Mode::blocked_arm0 && row.mode != Mode::blocked_arm1) {
            points.push_back({row.phi, row.n, row.n_split[0][path]});
        }
    }
    return points;
}

Distinguishability distinguishability(const CountRow &arm0_blocked, const CountRow &arm1_blocked) {
    // Arm 0 is the only open arm when arm 1 is blocked, and vice versa.
    const CountRow &open0 = arm1_blocked;
    const CountRow &open1 = arm0_blocked;
    if (open0.n < 100 || open1.n < 100) {
        throw InsufficientData("distinguishability: each blocked-arm row needs at least 100 events");
    }
    double n0 = static_cast<double>(open0.n);
    double n1 = static_cast<double>(open1.n);
    double p00 = static_cast<double>(open0.n_d0) / n0;
    double p10 = static_cast<double>(open0.n_d1) / n0;
    double p01 = static_cast<double>(open1.n_d0) / n1;
    double p11 = static_cast<double>(open1.n_d1) / n1;
    Distinguishability d;
    d.d_hat = 0.5 * (std::abs(p00 - p01) + std::abs(p10 - p11));
    d.d_err = std::sqrt(p00 * (1.0 - p00) / n0 + p01 * (1.0 - p01) / n1);
    return d;
}

Distinguishability conditional_distinguishability(const CountRow &row) {
    double n_y0 = static_cast<double>(row.n_split[0][0] + row.n_split[1][0]);
    double n_y1 = static_cast<double>(row.n_split[0][1] + row.n_split[1][1]);
    if (n_y0 == 0.0 || n_y1 == 0.0) {
        throw InsufficientData("conditional_distinguishability: both path labels must occur");
    }
    double p00 = static_cast<double>(row.n_split[0][0]) / n_y0;
    double p01 = static_cast<double>(row.n_split[0][1]) / n_y1;
    double p10 = static_cast<double>(row.n_split[1][0]) / n_y0;
    double p11 = static_cast<double>(row.n_split[1][1]) / n_y1;
    Distinguishability d;
    d.d_hat = 0.5 * (std::abs(p00 - p01) + std::abs(p10 - p11));
    d.d_err = std::sqrt(p00 * (1.0 - p00) / n_y0 + p01 * (1.0 - p01) / n_y1);
    return d;
}

double v_theory(double r) {
    if (!(r >= 0.0 && r <= 0.5)) throw InvalidArgument("v_theory: R must lie in [0, 0.5]");
    return 2.0 * std::sqrt(r * (1.0 - r));
}

double d_theory(double r) {
    if (!(r >= 0.0 && r <= 0.5)) throw InvalidArgument("d_theory: R must lie in [0, 0.5]");
    return 1.0 - 2.0 * r;
}

std::pair<double, double> oracle_intensity(double phi, double r, double phi0) {
    double i0 = 0.5 * (1.0 - v_theory(r) * std::cos(phi - phi0));
    return {i0, 1.0 - i0};
}

double squared_error(double mean, double err, int components) {
    double s2 = err * err;
    return std::sqrt(4.0 * mean * mean * s2 + (components >= 2 ? 4.0 : 2.0) * s2 * s2);
}

DualityReport make_duality_report(double r, std::optional<double> voltage, const FringeFit &fit,
                                  const Distinguishability &d) {
    DualityReport rep;
    rep.r = r;
    rep.voltage = voltage;
    rep.v_hat = fit.v_hat;
    rep.v_err = fit.v_err;
    rep.d_hat = d.d_hat;
    rep.d_err = d.d_err;
    rep.v2 = fit.v_hat * fit.v_hat;
    rep.d2 = d.d_hat * d.d_hat;
    rep.sum = rep.v2 + rep.d2;
    return rep;
}

}  // namespace dcsim
