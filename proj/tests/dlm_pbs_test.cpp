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

#include "dcsim/dlm_pbs.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gtest/gtest.h"

using namespace dcsim;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

DlmPbs::State random_state(std::mt19937_64 &rng, double alpha = 0.99) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    DlmPbs::State s;
    s.alpha = alpha;
    double x0 = unit(rng);
    s.x = {x0, 1.0 - x0};
    for (int k = 0; k < 2; k++) {
        s.y_h[k] = UnitPair::from_angle(2 * kPi * unit(rng));
        s.y_v[k] = UnitPair::from_angle(2 * kPi * unit(rng));
        s.y_p[k] = UnitPair::from_angle(2 * kPi * unit(rng));
    }
    return s;
}

DlmPbs::State pure_state(UnitPair polarization) {
    DlmPbs::State s;
    s.x = {1.0, 0.0};
    s.y_p[0] = polarization;
    return s;
}

// x0 after n events, unrolled from the learning rule by hand:
// x0_n = alpha^n x0_0 + (1 - alpha) sum_{j<n} alpha^(n-1-j) [k_j == 0].
double closed_form_x0(double x0, double alpha, const std::vector<int> &ks) {
    size_t n = ks.size();
    double sum = 0;
    for (size_t j = 0; j < n; j++) {
        if (ks[j] == 0) {
            sum += std::pow(alpha, double(n - 1 - j));
        }
    }
    return std::pow(alpha, double(n)) * x0 + (1 - alpha) * sum;
}

}  // namespace

TEST(dlm_pbs, init_state_invariants) {
    RngStream rng(5, "init");
    for (int t = 0; t < 1000; t++) {
        DlmPbs d = DlmPbs::init(0.99, rng);
        const auto &s = d.state();
        ASSERT_NEAR(s.x[0] + s.x[1], 1.0, 1e-12);
        ASSERT_GE(s.x[0], 0.0);
        ASSERT_GE(s.x[1], 0.0);
        for (int k = 0; k < 2; k++) {
            ASSERT_NEAR(s.y_h[k].norm_sq(), 1.0, 1e-12);
            ASSERT_NEAR(s.y_v[k].norm_sq(), 1.0, 1e-12);
            ASSERT_NEAR(s.y_p[k].norm_sq(), 1.0, 1e-12);
        }
        ASSERT_EQ(s.alpha, 0.99);
    }
    EXPECT_THROW(DlmPbs::init(0.0, rng), InvalidArgument);
    EXPECT_THROW(DlmPbs::init(1.0, rng), InvalidArgument);
}

TEST(dlm_pbs, init_uses_first_draw_for_x) {
    RngStream a(11, "init");
    RngStream b(11, "init");
    double r = b.uniform();
    DlmPbs d = DlmPbs::init(0.5, a);
    EXPECT_EQ(d.state().x[0], r);
    EXPECT_EQ(d.state().x[1], 1.0 - r);
}

TEST(dlm_pbs, rejects_off_simplex_state) {
    DlmPbs::State s;
    s.x = {0.6, 0.6};
    EXPECT_THROW(DlmPbs{s}, InvalidArgument);
    s.x = {-0.1, 1.1};
    EXPECT_THROW(DlmPbs{s}, InvalidArgument);
}

TEST(dlm_pbs, update_internal_example) {
    DlmPbs::State s;
    s.x = {0.5, 0.5};
    DlmPbs d(s);
    d.update_internal(0);
    EXPECT_NEAR(d.state().x[0], 0.505, 1e-15);
    EXPECT_NEAR(d.state().x[1], 0.495, 1e-15);
    EXPECT_THROW(d.update_internal(2), InvalidArgument);
}

TEST(dlm_pbs, update_internal_matches_closed_form) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> len(1, 3000);
    for (int t = 0; t < 1000; t++) {
        DlmPbs::State s;
        s.alpha = 0.5 + 0.499 * unit(rng);
        double x0 = unit(rng);
        s.x = {x0, 1 - x0};
        DlmPbs d(s);
        std::vector<int> ks(len(rng));
        for (int &k : ks) {
            k = unit(rng) < 0.5 ? 0 : 1;
            d.update_internal(k);
            ASSERT_GE(d.state().x[0], 0.0);
            ASSERT_GE(d.state().x[1], 0.0);
        }
        ASSERT_NEAR(d.state().x[0], closed_form_x0(x0, s.alpha, ks), 1e-10);
        ASSERT_NEAR(d.state().x[0] + d.state().x[1], 1.0, 1e-12);
    }
}

TEST(dlm_pbs, constant_input_converges_geometrically) {
    for (double x0 : {0.0, 0.3, 0.9}) {
        DlmPbs::State s;
        s.x = {x0, 1 - x0};
        DlmPbs d(s);
        for (int n = 1; n <= 2000; n++) {
            d.update_internal(0);
            ASSERT_LE(std::abs(d.state().x[0] - 1.0), std::pow(0.99, n) + 1e-15) << n;
        }
    }
}

TEST(dlm_pbs, alternating_input_oscillation) {
    DlmPbs::State s;
    s.x = {0.5, 0.5};
    DlmPbs d(s);
    for (int n = 0; n < 20000; n++) {
        d.update_internal(n % 2);
    }
    d.update_internal(0);
    double hi = d.state().x[0];
    d.update_internal(1);
    double lo = d.state().x[0];
    // Period-2 fixed point of the recursion: x0 alternates between 1/(1+a) and a/(1+a).
    EXPECT_NEAR(hi, 1 / 1.99, 1e-12);
    EXPECT_NEAR(lo, 0.99 / 1.99, 1e-12);
    EXPECT_NEAR(hi - lo, 0.01 / 1.99, 1e-12);
    EXPECT_NEAR((hi + lo) / 2, 0.5, 1e-12);
}

TEST(dlm_pbs, store_registers_overwrites_one_channel) {
    RngStream rng(3, "init");
    DlmPbs d = DlmPbs::init(0.99, rng);
    auto before = d.state();
    d.store_registers(0, make_message(0, 0, 0));
    EXPECT_EQ(d.state().y_h[0], (UnitPair{1, 0}));
    EXPECT_EQ(d.state().y_v[0], (UnitPair{1, 0}));
    EXPECT_EQ(d.state().y_p[0], (UnitPair{1, 0}));
    EXPECT_EQ(d.state().y_h[1], before.y_h[1]);
    EXPECT_EQ(d.state().y_v[1], before.y_v[1]);
    EXPECT_EQ(d.state().y_p[1], before.y_p[1]);

    Message second = make_message(0.4, 1.3, 0.2);
    d.store_registers(0, second);
    EXPECT_EQ(d.state().y_h[0], second.psi_h);
    EXPECT_EQ(d.state().y_v[0], second.psi_v);
    EXPECT_EQ(d.state().y_p[0], second.xi);

    auto mid = d.state();
    d.store_registers(1, make_message(2, 2, 2));
    EXPECT_EQ(d.state().y_h[0], mid.y_h[0]);
    EXPECT_EQ(d.state().y_v[0], mid.y_v[0]);
    EXPECT_EQ(d.state().y_p[0], mid.y_p[0]);
    EXPECT_EQ(d.state().x, mid.x);
}

TEST(dlm_pbs, transform_pure_h_passes) {
    AmplitudeQuad b = DlmPbs(pure_state({1, 0})).transform();
    EXPECT_NEAR(std::abs(b.b0_h - 1.0), 0, 1e-15);
    EXPECT_EQ(std::abs(b.b0_v), 0);
    EXPECT_EQ(std::abs(b.b1_h), 0);
    EXPECT_EQ(std::abs(b.b1_v), 0);
}

TEST(dlm_pbs, transform_pure_v_reflects_with_phase) {
    AmplitudeQuad b = DlmPbs(pure_state({0, 1})).transform();
    EXPECT_EQ(std::abs(b.b0_h), 0);
    EXPECT_EQ(std::abs(b.b0_v), 0);
    EXPECT_EQ(std::abs(b.b1_h), 0);
    EXPECT_NEAR(std::abs(b.b1_v - kI), 0, 1e-15);
}

TEST(dlm_pbs, transform_matches_matrix_oracle) {
    // Rows map (a0H, a0V, a1H, a1V) to (b0H, b0V, b1H, b1V).
    const Complex m[4][4] = {
        {1, 0, 0, 0},
        {0, 0, 0, kI},
        {0, 0, 1, 0},
        {0, kI, 0, 0},
    };
    std::mt19937_64 rng(2);
    for (int t = 0; t < 1000000; t++) {
        DlmPbs::State s = random_state(rng);
        Complex a[4];
        for (int k = 0; k < 2; k++) {
            double sx = std::sqrt(s.x[k]);
            a[2 * k] = Complex(s.y_h[k].c, s.y_h[k].s) * s.y_p[k].c * sx;
            a[2 * k + 1] = Complex(s.y_v[k].c, s.y_v[k].s) * s.y_p[k].s * sx;
        }
        Complex want[4];
        for (int r = 0; r < 4; r++) {
            want[r] = 0;
            for (int c = 0; c < 4; c++) {
                want[r] += m[r][c] * a[c];
            }
        }
        AmplitudeQuad b = DlmPbs(s).transform();
        Complex got[4] = {b.b0_h, b.b0_v, b.b1_h, b.b1_v};
        for (int r = 0; r < 4; r++) {
            ASSERT_LE(std::abs(got[r] - want[r]), 1e-12) << "trial " << t << " row " << r;
        }
        ASSERT_NEAR(b.norm_sq(), 1.0, 1e-10);
    }
}

TEST(dlm_pbs, output_weights_sum_to_one_and_messages_are_valid) {
    std::mt19937_64 rng(3);
    RngStream draw(3, "emit");
    for (int t = 0; t < 1000000; t++) {
        DlmPbs d(random_state(rng));
        OutputWeights w = d.output_weights();
        ASSERT_NEAR(w.u_sq + w.v_sq, 1.0, 1e-10);
        Emission e = d.emit(draw);
        ASSERT_LE(e.message.max_norm_error(), 1e-12);
    }
}

TEST(dlm_pbs, emitted_message_matches_jones_oracle) {
    std::mt19937_64 rng(4);
    RngStream draw(4, "emit");
    for (int t = 0; t < 10000; t++) {
        DlmPbs d(random_state(rng));
        AmplitudeQuad b = d.transform();
        OutputWeights w = d.output_weights();
        ASSERT_NEAR(w.u_sq, std::norm(b.b0_h) + std::norm(b.b0_v), 1e-12);
        ASSERT_NEAR(w.v_sq, std::norm(b.b1_h) + std::norm(b.b1_v), 1e-12);
        Emission e = d.emit(draw);
        Message want = e.channel == 0 ? from_jones({b.b0_h, b.b0_v}) : from_jones({b.b1_h, b.b1_v});
        auto g = e.message.components();
        auto h = want.components();
        for (int c = 0; c < 6; c++) {
            ASSERT_NEAR(g[c], h[c], 1e-12);
        }
    }
}

TEST(dlm_pbs, frozen_state_channel_frequency) {
    std::mt19937_64 rng(5);
    const int draws = 10000;
    std::vector<DlmPbs::State> states = {pure_state(UnitPair::from_angle(kPi / 4))};
    for (int t = 0; t < 20; t++) {
        states.push_back(random_state(rng));
    }
    for (size_t t = 0; t < states.size(); t++) {
        DlmPbs d(states[t]);
        double u2 = d.output_weights().u_sq;
        if (t == 0) {
            ASSERT_NEAR(u2, 0.5, 1e-15);
        }
        RngStream draw(5, "frozen/" + std::to_string(t));
        int zero = 0;
        for (int k = 0; k < draws; k++) {
            zero += d.emit(draw).channel == 0;
        }
        double bound = 3 * std::sqrt(u2 * (1 - u2) / draws);
        EXPECT_LE(std::abs(zero / double(draws) - u2), bound) << "state " << t << " u2=" << u2;
    }
}

TEST(dlm_pbs, degenerate_state_throws) {
    DlmPbs::State s;
    s.y_p = {UnitPair{0, 0}, UnitPair{0, 0}};
    RngStream draw(6, "emit");
    EXPECT_THROW(DlmPbs(s).emit(draw), DegenerateState);
}

TEST(dlm_pbs, normalized_output_zero_convention) {
    Message m = normalized_output({0.0, 0.0, 0.0, -0.5});
    EXPECT_EQ(m.psi_h, (UnitPair{1, 0}));
    EXPECT_EQ(m.psi_v, (UnitPair{0, -1}));
    EXPECT_EQ(m.xi, (UnitPair{0, 1}));
}

TEST(dlm_pbs, process_is_store_update_emit) {
    std::mt19937_64 rng(7);
    Message m = make_message(0.3, -0.2, 0.7);
    for (int t = 0; t < 100; t++) {
        DlmPbs::State s = random_state(rng);
        DlmPbs a(s);
        DlmPbs b(s);
        RngStream ra(7, "p");
        RngStream rb(7, "p");
        Emission ea = a.process(1, m, ra);
        b.store_registers(1, m);
        b.update_internal(1);
        Emission eb = b.emit(rb);
        ASSERT_EQ(ea.channel, eb.channel);
        ASSERT_EQ(ea.message, eb.message);
        ASSERT_EQ(a.state().x, b.state().x);
    }
}

TEST(dlm_pbs, pure_h_stream_settles_on_channel_zero) {
    RngStream init(8, "init");
    RngStream draw(8, "emit");
    DlmPbs d = DlmPbs::init(0.99, init);
    Message h = make_message(0.25, 0, 0);
    Emission last;
    for (int n = 0; n < 10000; n++) {
        last = d.process(0, h, draw);
        if (n >= 500) {
            ASSERT_EQ(last.channel, 0) << n;
        }
        if (n == 499) {
            EXPECT_GE(d.state().x[0], 1 - 1e-2);
        }
    }
    // Stale channel-1 registers still leak in with weight sqrt(x1) ~ 0.99^5000,
    // so the V phase pair is arbitrary; compare amplitudes instead.
    JonesPair got = to_jones(last.message);
    JonesPair want = to_jones(h);
    EXPECT_LE(std::abs(got.h - want.h), 1e-12);
    EXPECT_LE(std::abs(got.v - want.v), 1e-12);
}

TEST(dlm_pbs, single_input_use_never_touches_channel_one) {
    RngStream init(9, "init");
    RngStream draw(9, "emit");
    DlmPbs d = DlmPbs::init(0.99, init);
    auto before = d.state();
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> angle(0, 2 * kPi);
    for (int n = 0; n < 1000; n++) {
        d.process(0, make_message(angle(rng), angle(rng), angle(rng)), draw);
    }
    EXPECT_EQ(d.state().y_h[1], before.y_h[1]);
    EXPECT_EQ(d.state().y_v[1], before.y_v[1]);
    EXPECT_EQ(d.state().y_p[1], before.y_p[1]);
    EXPECT_NEAR(d.state().x[1], before.x[1] * std::pow(0.99, 1000), 1e-15);
}

TEST(dlm_pbs, same_seed_replays) {
    auto run = [] {
        RngStream init(10, "init");
        RngStream draw(10, "emit");
        DlmPbs d = DlmPbs::init(0.99, init);
        std::vector<int> out;
        for (int n = 0; n < 200; n++) {
            out.push_back(d.process(n % 3 == 0, make_message(0.1 * n, 0.2, 0.3), draw).channel);
        }
        return out;
    };
    EXPECT_EQ(run(), run());
}
