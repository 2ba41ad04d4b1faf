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
#include <numbers>
#include <vector>

#include "gtest/gtest.h"

#include "dcsim/analysis.hpp"

using namespace dcsim;

namespace {

constexpr double kPi = std::numbers::pi;

ExperimentConfig config(double r, Mode mode, std::uint64_t n = 10000) {
    ExperimentConfig cfg = default_config();
    cfg.r = r;
    cfg.mode = mode;
    cfg.events_per_point = n;
    return cfg;
}

double binomial_3sigma(double p, double n) { return 3 * std::sqrt(p * (1 - p) / n); }

}  // namespace

TEST(experiment, defaults) {
    ExperimentConfig cfg = default_config();
    EXPECT_EQ(cfg.alpha, 0.99);
    EXPECT_EQ(cfg.events_per_point, 10000u);
    EXPECT_EQ(cfg.mode, Mode::delayed_choice);
    EXPECT_EQ(cfg.hwp_angle, kPi / 4);
    ASSERT_EQ(cfg.phi_grid.size(), 36u);
    EXPECT_EQ(cfg.phi_grid.front(), 0.0);
    EXPECT_NEAR(cfg.phi_grid[1], 2 * kPi / 36, 1e-15);
    EXPECT_LT(cfg.phi_grid.back(), 2 * kPi);
    EXPECT_NO_THROW(cfg.validate());
}

TEST(experiment, validate_names_the_key) {
    auto key_of = [](const ExperimentConfig &cfg) {
        try {
            cfg.validate();
        } catch (const ConfigError &e) {
            return e.key() + ": " + e.what();
        }
        return std::string("ok");
    };
    ExperimentConfig cfg = default_config();
    cfg.r = 0.7;
    EXPECT_EQ(key_of(cfg), "r: r out of range [0,0.5]");
    cfg = default_config();
    cfg.alpha = 0;
    EXPECT_EQ(key_of(cfg), "alpha: alpha out of range (0,1)");
    cfg = default_config();
    cfg.events_per_point = 0;
    EXPECT_EQ(key_of(cfg).substr(0, 7), "events:");
    cfg = default_config();
    cfg.phi_grid.clear();
    EXPECT_EQ(key_of(cfg).substr(0, 10), "phi-steps:");
    cfg = default_config();
    cfg.warmup_fraction = 1.0;
    EXPECT_EQ(key_of(cfg).substr(0, 7), "warmup:");
}

TEST(experiment, mode_names_round_trip) {
    for (Mode m : {Mode::delayed_choice, Mode::closed, Mode::open, Mode::blocked_arm0, Mode::blocked_arm1}) {
        EXPECT_EQ(parse_mode(to_string(m)), m);
    }
    EXPECT_FALSE(parse_mode("half_open").has_value());
    EXPECT_EQ(parse_configuration("open"), Configuration::open);
    EXPECT_EQ(parse_configuration("closed"), Configuration::closed);
}

TEST(experiment, run_point_counts_are_consistent) {
    for (Mode m : {Mode::delayed_choice, Mode::closed, Mode::open, Mode::blocked_arm0, Mode::blocked_arm1}) {
        PointResult p = run_point(config(0.3, m, 2000), 1.1, 0);
        std::uint64_t total = 0;
        for (const CountRow &row : p.rows) {
            ASSERT_TRUE(row.consistent());
            EXPECT_EQ(row.phi, 1.1);
            EXPECT_EQ(row.mode, m);
            total += row.n;
        }
        EXPECT_EQ(total, 2000u);
        EXPECT_EQ(p.slice.records.size(), 2000u);
        EXPECT_EQ(p.rows.size(), m == Mode::delayed_choice ? 2u : 1u);
    }
}

TEST(experiment, fixed_modes_fix_the_choice) {
    PointResult closed = run_point(config(0.3, Mode::closed, 1000), 0.0, 0);
    PointResult open = run_point(config(0.3, Mode::open, 1000), 0.0, 0);
    for (const EventRecord &e : closed.slice.records) {
        ASSERT_EQ(e.a, 1);
    }
    for (const EventRecord &e : open.slice.records) {
        ASSERT_EQ(e.a, 0);
    }
    EXPECT_EQ(closed.rows[0].config, Configuration::closed);
    EXPECT_EQ(open.rows[0].config, Configuration::open);
}

TEST(experiment, blocked_modes_only_detect_the_open_arm) {
    PointResult a0 = run_point(config(0.2, Mode::blocked_arm0, 2000), 0.0, 0);
    PointResult a1 = run_point(config(0.2, Mode::blocked_arm1, 2000), 0.0, 0);
    for (const EventRecord &e : a0.slice.records) {
        ASSERT_EQ(e.y, 1);
    }
    for (const EventRecord &e : a1.slice.records) {
        ASSERT_EQ(e.y, 0);
    }
    EXPECT_GT(a0.absorbed, 1500u);
    EXPECT_EQ(a0.rows[0].config, Configuration::closed);
}

TEST(experiment, open_mode_is_flat) {
    for (double phi : {0.0, kPi / 2, kPi, 4.0}) {
        CountRow row = run_point(config(0.43, Mode::open), phi, 0).rows[0];
        EXPECT_NEAR(row.frac_d0(), 0.5, 0.015) << "phi=" << phi;
        EXPECT_NEAR(double(row.n_d1) / row.n, 0.5, 0.015) << "phi=" << phi;
    }
}

TEST(experiment, closed_sweep_path_subcounts_match_at_half) {
    ExperimentConfig cfg = config(0.5, Mode::closed, 10000);
    cfg.phi_grid = make_phi_grid(0, 2 * kPi, 8);
    SweepResult sweep = run_phase_sweep(cfg);
    ASSERT_EQ(sweep.rows.size(), 8u);
    for (const CountRow &row : sweep.rows) {
        double n0 = double(row.n_split[0][0]);
        double n1 = double(row.n_split[0][1]);
        double sigma = std::sqrt(n0 + n1);
        EXPECT_LE(std::abs(n0 - n1), 3 * sigma + 1e-9) << "phi=" << row.phi;
    }
}

TEST(experiment, delayed_choice_ordering_and_choice_statistics) {
    ExperimentConfig cfg = config(0.43, Mode::delayed_choice);
    std::vector<std::string> order;
    std::uint64_t current = ~std::uint64_t{0};
    bool ok = true;
    std::string failure;
    auto check_event = [&] {
        // source, pbs_input, choice, then only output-side units.
        if (order.size() < 4 || order[0] != "source" || order[1] != "pbs_input" || order[2] != "choice") {
            ok = false;
        }
        for (size_t k = 3; k < order.size(); k++) {
            if (order[k] == "choice" || order[k] == "source" || order[k] == "pbs_input") {
                ok = false;
            }
        }
        if (!ok && failure.empty()) {
            for (auto &s : order) failure += s + " ";
        }
    };
    RunObserver obs;
    obs.hooks.on_unit = [&](const Waypoint &w) {
        if (w.event != current) {
            if (current != ~std::uint64_t{0}) check_event();
            current = w.event;
            order.clear();
        }
        order.push_back(w.node->name);
    };
    std::uint64_t choices = 0;
    obs.on_choice = [&](std::uint64_t event, int) {
        ASSERT_EQ(event, current);
        order.push_back("choice");
        choices++;
    };
    PointResult p = run_delayed_choice(cfg, 0.5, &obs);
    check_event();
    EXPECT_TRUE(ok) << failure;
    EXPECT_EQ(choices, current + 1);

    const auto &rec = p.slice.records;
    double n = double(rec.size());
    double sa = 0, sy = 0, say = 0, saa = 0, syy = 0;
    for (const EventRecord &e : rec) {
        sa += e.a;
        sy += e.y;
        say += e.a * e.y;
        saa += e.a * e.a;
        syy += e.y * e.y;
    }
    EXPECT_NEAR(sa / n, 0.5, 0.015);
    double cov = say / n - (sa / n) * (sy / n);
    double corr = cov / std::sqrt((saa / n - sa * sa / n / n) * (syy / n - sy * sy / n / n));
    EXPECT_LE(std::abs(corr), 3 / std::sqrt(n));
}

TEST(experiment, delayed_choice_partitions_show_both_behaviours) {
    ExperimentConfig cfg = config(0.5, Mode::delayed_choice, 8000);
    cfg.phi_grid = make_phi_grid(0, 2 * kPi, 12);
    SweepResult sweep = run_phase_sweep(cfg);
    ASSERT_EQ(sweep.rows.size(), 24u);
    FringeFit open = fit_visibility(fringe_points(sweep.rows, Configuration::open));
    FringeFit closed = fit_visibility(fringe_points(sweep.rows, Configuration::closed));
    EXPECT_LE(open.v_hat, 0.05);
    EXPECT_GE(closed.v_hat, 0.95);
}

TEST(experiment, runs_replay_bit_identically) {
    ExperimentConfig cfg = config(0.2, Mode::delayed_choice, 3000);
    cfg.phi_grid = make_phi_grid(0, 2 * kPi, 4);
    SweepResult a = run_phase_sweep(cfg);
    SweepResult b = run_phase_sweep(cfg);
    EXPECT_EQ(a.rows, b.rows);
    ASSERT_EQ(a.gamma.slices.size(), b.gamma.slices.size());
    for (size_t k = 0; k < a.gamma.slices.size(); k++) {
        EXPECT_EQ(a.gamma.slices[k].records, b.gamma.slices[k].records);
    }
    cfg.seed += 1;
    SweepResult c = run_phase_sweep(cfg);
    EXPECT_NE(a.rows, c.rows);
}

TEST(experiment, blocked_runs_at_r_zero_sort_completely) {
    BlockedRuns runs = run_distinguishability(config(0.0, Mode::closed));
    // Arm 0 alone leaves the merge splitter horizontal, the wave plate turns
    // that vertical and the prism sends it to D1; arm 1 ends at D0.
    EXPECT_GE(runs.arm1_blocked.n_d1, runs.arm1_blocked.n * 99 / 100);
    EXPECT_GE(runs.arm0_blocked.n_d0, runs.arm0_blocked.n * 99 / 100);
    EXPECT_EQ(runs.arm0_blocked.mode, Mode::blocked_arm0);
    EXPECT_EQ(runs.arm1_blocked.mode, Mode::blocked_arm1);
}

TEST(experiment, blocked_runs_at_half_are_even) {
    BlockedRuns runs = run_distinguishability(config(0.5, Mode::closed));
    for (const CountRow *row : {&runs.arm0_blocked, &runs.arm1_blocked}) {
        EXPECT_NEAR(row->frac_d0(), 0.5, binomial_3sigma(0.5, row->n));
    }
}

TEST(experiment, blocked_runs_give_expected_d_at_small_r) {
    BlockedRuns runs = run_distinguishability(config(0.05, Mode::closed));
    Distinguishability d = distinguishability(runs.arm0_blocked, runs.arm1_blocked);
    EXPECT_NEAR(d.d_hat, 0.90, 0.03);
}

TEST(experiment, merge_leaves_through_one_channel_after_warmup) {
    ExperimentConfig cfg = config(0.43, Mode::closed);
    cfg.warmup_fraction = 0.1;
    PointResult p = run_point(cfg, 1.3, 0);
    std::uint64_t total = p.merge_exits[0] + p.merge_exits[1];
    EXPECT_GE(std::max(p.merge_exits[0], p.merge_exits[1]), total * 99 / 100);
}

TEST(experiment, phi_grid_excludes_end) {
    auto g = make_phi_grid(1.0, 2.0, 4);
    EXPECT_EQ(g, (std::vector<double>{1.0, 1.25, 1.5, 1.75}));
}

TEST(experiment, stream_prefix_is_distinct_per_point_and_mode) {
    ExperimentConfig cfg = default_config();
    EXPECT_NE(stream_prefix(cfg, Mode::closed, 0), stream_prefix(cfg, Mode::closed, 1));
    EXPECT_NE(stream_prefix(cfg, Mode::closed, 0), stream_prefix(cfg, Mode::open, 0));
    cfg.r = 0.25;
    EXPECT_EQ(stream_prefix(cfg, Mode::closed, 3), "r=0.25/closed/pt=3/");
}
