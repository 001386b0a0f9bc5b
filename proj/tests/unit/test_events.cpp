#include "ecowalker/events.hpp"
#include "oracles.hpp"
#include "synthetic_events.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace ecowalker;
using oracle::bump;
using std::numbers::pi;

namespace {

constexpr double kRate = synthetic::kRate;
constexpr double kTol = 0.002;

Signal wave(const char* name, double shift, double (*f)(double)) { return synthetic::wave(name, shift, f); }

}  // namespace

TEST_SUITE("events") {
    TEST_CASE("detectors find constructed events") {
        const auto d = synthetic::detect(0.0);
        const auto g = synthetic::truth();
        CHECK(std::abs(d.sapf - g.sapf) <= kTol);
        CHECK(std::abs(d.to - g.to) <= kTol);
        CHECK(std::abs(d.lltd - g.lltd) <= kTol);
        CHECK(std::abs(d.shf - g.shf) <= kTol);
        CHECK(std::abs(d.skf - g.skf) <= kTol);
        CHECK(std::abs(d.vmin - g.vmin) <= kTol);
        CHECK(std::abs(d.vmax - g.vmax) <= kTol);
    }

    TEST_CASE("detectors are shift-equivariant") {
        const auto a = synthetic::detect(0.0);
        for (int k : {1, 7, 250, 999, 1234}) {
            const double shift = k / kRate;
            const auto b = synthetic::detect(shift);
            CHECK(synthetic::shifted_by(a, b, k));
            auto same_sample = [&](double x, double y) {
                return std::lround(x * kRate) + k == std::lround(y * kRate) && std::abs(y - x - shift) < 1e-9;
            };
            CHECK(same_sample(a.sapf, b.sapf));
            CHECK(same_sample(a.to, b.to));
            CHECK(same_sample(a.lltd, b.lltd));
            CHECK(same_sample(a.shf, b.shf));
            CHECK(same_sample(a.skf, b.skf));
            CHECK(same_sample(a.vmin, b.vmin));
            CHECK(same_sample(a.vmax, b.vmax));
        }
    }

    TEST_CASE("transition window falls back to the first maximum") {
        const Signal com = wave("com", 0.0, synthetic::com_wave);
        const TransitionWindow w = detect_transition_window(com, 0.3005, 1.0005);
        CHECK(w.fallback);
        CHECK(std::abs(w.t_vmax - 0.75) <= kTol);
    }

    TEST_CASE("detector failures are reported") {
        const Signal ramp = oracle::sampled("ramp", 0.0, 1.0, kRate, [](double t) { return t; });
        CHECK_THROWS_AS(detect_sapf(ramp, 0.1, 0.9), EventError);
        CHECK_THROWS_AS(detect_to(ramp, 0.1, 0.9), EventError);
        const Signal flat = make_uniform("flat", "", 0.0, 1e-3, std::vector<double>(1000, 0.0));
        CHECK_THROWS_AS(detect_lltd(flat, 0.1, 0.9), EventError);
        CHECK_THROWS_AS(detect_shf(flat, 0.1, 0.9), EventError);
        CHECK_THROWS_AS(detect_skf(flat, 0.5), EventError);
        CHECK_THROWS_AS(detect_transition_window(ramp, 0.1, 0.9), EventError);
    }

    TEST_CASE("rate and angle lengths must agree") {
        const Signal a = oracle::sampled("a", 0.0, 1.0, kRate, [](double t) { return t; });
        const Signal r = oracle::sampled("r", 0.0, 0.5, kRate, [](double t) { return t; });
        CHECK_THROWS_AS(detect_to(a, r, 0.1, 0.4), EventError);
    }

    TEST_CASE("percent of cycle") {
        CycleEvents c;
        c.t_start = 2.0;
        c.t_end = 3.0;
        c.events.t_sapf = 2.45;
        c.events.t_lltd = 2.48;
        CHECK(c.percent(2.5) == doctest::Approx(50.0));
        CHECK(c.sapf_lltd_delta() == doctest::Approx(3.0));
    }

    TEST_CASE("events CSV lists every event") {
        CycleEvents c;
        c.t_start = 1.0;
        c.t_end = 2.0;
        std::ostringstream out;
        write_events_csv(out, {c});
        const std::string s = out.str();
        for (const char* col : {"SKF", "SHF", "SAPF", "LLTD", "TO", "vmin", "vmax"}) CHECK(s.find(col) != std::string::npos);
    }
}
