#include "ecowalker/tendon.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

#include <random>

using namespace ecowalker;

TEST_SUITE("tendon") {
    TEST_CASE("slack configuration carries no force") {
        RobotParams p;
        const LegAngles slack{0.3, p.knee_slack_angle, p.ankle_slack_angle, p.toe_rest_angle};
        const TendonState t = tendon_extensions(p, slack);
        CHECK(t.e_sol == 0.0);
        CHECK(t.e_gas == 0.0);
        CHECK(t.f_sol == 0.0);
        CHECK(t.f_gas == 0.0);
        const PassiveTorques tau = passive_torques(p, slack);
        CHECK(tau.tau_ankle == 0.0);
        CHECK(tau.tau_knee_gas == 0.0);
        CHECK(tau.tau_toe == 0.0);
    }

    TEST_CASE("hand-evaluated extensions and torques") {
        RobotParams p;
        // 22 deg from slack at 13 mm radius.
        const double e22 = 22.0 * std::numbers::pi / 180.0 * 0.013;
        TendonState t = tendon_extensions(p, LegAngles{0.0, 0.0, 0.0, 0.0});
        CHECK(t.e_sol == doctest::Approx(4.992e-3).epsilon(1e-4));
        CHECK(t.e_sol == doctest::Approx(e22).epsilon(1e-12));
        CHECK(std::round(t.f_sol * p.r_sol * 1e4) / 1e4 == doctest::Approx(0.2920).epsilon(1e-12));
        CHECK(std::abs(t.f_sol * p.r_sol - 4.5e3 * e22 * 0.013) < 1e-12);

        t = tendon_extensions(p, LegAngles{0.0, deg2rad(10.0), 0.0, 0.0});
        CHECK(t.e_gas == doctest::Approx(2.723e-3).epsilon(2e-4));
        CHECK(t.f_gas == doctest::Approx(3.812).epsilon(2e-4));
        const PassiveTorques tau = passive_torques(p, LegAngles{0.0, deg2rad(10.0), 0.0, p.toe_rest_angle});
        CHECK(tau.tau_knee_gas == doctest::Approx(0.0496).epsilon(1e-3));
        CHECK(tau.tau_ankle - t.f_sol * p.r_sol == doctest::Approx(tau.tau_knee_gas).epsilon(1e-12));
    }

    TEST_CASE("tendons only pull") {
        RobotParams p;
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> ankle(-1.0, 1.0), knee(-0.5, 2.0);
        for (int i = 0; i < 10000; ++i) {
            const LegAngles l{0.0, knee(rng), ankle(rng), p.toe_rest_angle};
            const TendonState t = tendon_extensions(p, l);
            REQUIRE(t.f_sol >= 0.0);
            REQUIRE(t.f_gas >= 0.0);
            if (t.e_sol <= 0.0) REQUIRE(t.f_sol == 0.0);
            if (t.e_gas > 0.0) REQUIRE(t.f_gas == doctest::Approx(p.k_gas * t.e_gas).epsilon(1e-14));
            REQUIRE(passive_torques(p, l).tau_ankle >= 0.0);
        }
    }

    TEST_CASE("zero velocity gives zero power") {
        RobotParams p;
        const LegAngles q{0.2, 0.4, 0.1, 0.5};
        CHECK(ankle_power(p, q, LegAngles{}) == 0.0);
        CHECK(gas_knee_power(p, q, LegAngles{}) == 0.0);
        // GAS slack: no knee power whatever the knee rate.
        const LegAngles slack_gas{0.0, 1.2, -0.2, p.toe_rest_angle};
        REQUIRE(tendon_extensions(p, slack_gas).e_gas < 0.0);
        CHECK(gas_knee_power(p, slack_gas, LegAngles{0.0, 3.0, 0.0, 0.0}) == 0.0);
    }

    TEST_CASE("SOL recoil power at 1 rad/s") {
        RobotParams p;
        // SOL alone engaged: GAS slack because the knee is flexed past the ankle.
        const LegAngles q{0.0, deg2rad(30.0), 0.0, p.toe_rest_angle};
        REQUIRE(tendon_extensions(p, q).f_gas == 0.0);
        const double pa = ankle_power(p, q, LegAngles{0.0, 0.0, -1.0, 0.0});
        CHECK(std::round(pa * 1e4) / 1e4 == doctest::Approx(0.2920).epsilon(1e-12));
        const oracle::TendonOracle o(p);
        auto e = [&](double s) { return o.energy(-s, q.knee, q.toe); };
        CHECK(pa == doctest::Approx(-oracle::fd5(e, 1e-5)).epsilon(1e-9));
    }

    TEST_CASE("taut GAS knee power at 1 rad/s") {
        RobotParams p;
        const LegAngles q{0.0, deg2rad(10.0), 0.0, p.toe_rest_angle};
        const double pk = gas_knee_power(p, q, LegAngles{0.0, 1.0, 0.0, 0.0});
        CHECK(std::abs(pk) == doctest::Approx(0.0496).epsilon(1e-3));
        CHECK(pk > 0.0);  // knee flexion shortens the GAS, so the spring does work
    }

    TEST_CASE("elastic power balance along random trajectories") {
        RobotParams p;
        const oracle::TendonOracle o(p);
        std::mt19937_64 rng(42);
        std::uniform_real_distribution<double> a(-0.3, 0.6), k(0.0, 1.2), w(-4.0, 4.0), toe(0.1, 0.9);
        int checked = 0;
        for (int i = 0; i < 2000; ++i) {
            const LegAngles q{0.0, k(rng), a(rng), toe(rng)};
            const LegAngles qd{0.0, w(rng), w(rng), w(rng)};
            const TendonState t = tendon_extensions(p, q);
            // Keep away from the hinges so the analytic derivative exists.
            if (std::abs(t.e_sol) < 1e-4 || std::abs(t.e_gas) < 1e-4) continue;
            const ElasticPower ep = elastic_power(p, q, qd);
            auto e_along = [&](double s) {
                return o.energy(q.ankle + s * qd.ankle, q.knee + s * qd.knee, q.toe + s * qd.toe);
            };
            const double de_dt = oracle::fd5(e_along, 1e-6);
            const double sum = ep.p_ankle + ep.p_knee_gas + ep.p_toe;
            const double scale = std::abs(ep.p_ankle) + std::abs(ep.p_knee_gas) + std::abs(ep.p_toe);
            REQUIRE(std::abs(sum + de_dt) <= 1e-9 * scale);
            CHECK(ep.e_elastic == doctest::Approx(o.energy(q.ankle, q.knee, q.toe)).epsilon(1e-14));
            ++checked;
        }
        CHECK(checked > 1000);
    }

    TEST_CASE("oracle energy rate agrees with its finite difference") {
        RobotParams p;
        const oracle::TendonOracle o(p);
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> a(-0.3, 0.6), k(0.0, 1.2), w(-4.0, 4.0), toe(0.1, 0.9);
        for (int i = 0; i < 500; ++i) {
            const double qa = a(rng), qk = k(rng), qt = toe(rng), va = w(rng), vk = w(rng), vt = w(rng);
            if (std::abs(o.e_sol(qa)) < 1e-4 || std::abs(o.e_gas(qa, qk)) < 1e-4) continue;
            auto e_along = [&](double s) { return o.energy(qa + s * va, qk + s * vk, qt + s * vt); };
            CHECK(o.energy_rate(qa, qk, qt, va, vk, vt) ==
                  doctest::Approx(oracle::fd5(e_along, 1e-6)).epsilon(1e-7).scale(1e-6));
        }
    }

    TEST_CASE("passive torques are continuous across the slack hinge") {
        RobotParams p;
        const double eps = 1e-9;
        const LegAngles below{0.0, 0.0, p.ankle_slack_angle - eps, p.toe_rest_angle};
        const LegAngles above{0.0, 0.0, p.ankle_slack_angle + eps, p.toe_rest_angle};
        CHECK(std::abs(passive_torques(p, above).tau_ankle - passive_torques(p, below).tau_ankle) < 1e-6);
    }
}
