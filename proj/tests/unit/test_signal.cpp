#include "ecowalker/signal.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace ecowalker;
using std::numbers::pi;

namespace {

// Least-squares amplitude of the sin/cos pair at frequency f over [i0, i1).
double fitted_amplitude(const Signal& s, double f, std::size_t i0, std::size_t i1) {
    double ss = 0, cc = 0, sc = 0, ys = 0, yc = 0;
    for (std::size_t i = i0; i < i1; ++i) {
        const double a = std::sin(2 * pi * f * s.t[i]), b = std::cos(2 * pi * f * s.t[i]);
        ss += a * a;
        cc += b * b;
        sc += a * b;
        ys += s.values[i] * a;
        yc += s.values[i] * b;
    }
    const double det = ss * cc - sc * sc;
    const double ca = (ys * cc - yc * sc) / det;
    const double cb = (yc * ss - ys * sc) / det;
    return std::hypot(ca, cb);
}

std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

TEST_SUITE("signal") {
    TEST_CASE("resample is exact on a ramp") {
        std::vector<double> t{0.0, 0.013, 0.021, 0.05, 0.1};
        Signal s{"ramp", "", t, {}, 0.0};
        for (double x : t) s.values.push_back(3.0 * x - 1.0);
        const Signal r = resample(s, 1000.0);
        CHECK(r.size() == 101);
        for (std::size_t i = 0; i < r.size(); ++i) CHECK(r.values[i] == doctest::Approx(3.0 * r.t[i] - 1.0).epsilon(1e-13));
    }

    TEST_CASE("resample at the native rate is the identity") {
        const Signal s = oracle::sampled("x", 0.5, 1.5, 1000.0, [](double t) { return std::cos(7 * t); });
        const Signal r = resample(s, 1000.0);
        REQUIRE(r.size() == s.size());
        for (std::size_t i = 0; i < r.size(); ++i) CHECK(std::abs(r.values[i] - s.values[i]) < 1e-12);
    }

    TEST_CASE("resampled sine stays within the interpolation bound") {
        const Signal s = oracle::sampled("x", 0.0, 2.0, 600.0, [](double t) { return std::sin(2 * pi * t); });
        const Signal r = resample(s, 1000.0);
        const double h = 1.0 / 600.0;
        const double bound = h * h / 8.0 * (2 * pi) * (2 * pi);
        double worst = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) worst = std::max(worst, std::abs(r.values[i] - std::sin(2 * pi * r.t[i])));
        CHECK(worst <= bound);
        CHECK(worst < 1.4e-5);
    }

    TEST_CASE("resample needs two samples") {
        Signal s{"x", "", {0.0}, {1.0}, 0.0};
        CHECK_THROWS_AS(resample(s, 100.0), SignalError);
    }

    TEST_CASE("validation rejects bad signals") {
        Signal s{"x", "", {0.0, 0.0}, {1.0, 2.0}, 0.0};
        CHECK_THROWS_AS(s.validate(), SignalError);
        s = Signal{"x", "", {0.0, 1.0}, {1.0, NAN}, 0.0};
        CHECK_THROWS_AS(s.validate(), SignalError);
        s = Signal{"x", "", {0.0, 1.0}, {1.0}, 0.0};
        CHECK_THROWS_AS(s.validate(), SignalError);
    }

    TEST_CASE("filter passes a constant unchanged") {
        const Signal s = make_uniform("c", "", 0.0, 1e-3, std::vector<double>(3000, -0.3839));
        for (int order : {1, 2, 4}) {
            const Signal f = lowpass_zero_phase(s, order, 10.0);
            for (double v : f.values) CHECK(std::abs(v + 0.3839) < 1e-12);
        }
    }

    TEST_CASE("1 Hz sine keeps its amplitude and timing") {
        const double rate = 1000.0;
        const Signal s = oracle::sampled("x", 0.0, 5.0, rate, [](double t) { return std::sin(2 * pi * t); });
        const Signal f = lowpass_zero_phase(s, 2, 10.0);
        const double expected = oracle::butterworth_power_gain(2, 10.0, rate, 1.0);
        const double amp = fitted_amplitude(f, 1.0, 1000, 4000);
        CHECK(amp >= 0.99);
        CHECK(amp == doctest::Approx(expected).epsilon(1e-6));
        // Peaks of the filtered sine fall on the same samples as the input.
        for (std::size_t k = 1; k < 5; ++k) {
            const std::size_t lo = (k - 1) * 1000, hi = k * 1000;
            const std::vector<double> a(s.values.begin() + lo, s.values.begin() + hi);
            const std::vector<double> b(f.values.begin() + lo, f.values.begin() + hi);
            CHECK(argmax(a) == argmax(b));
        }
    }

    TEST_CASE("zero phase keeps a symmetric pulse peak in place") {
        for (double c : {0.5, 0.731, 1.2}) {
            const Signal s = oracle::sampled("x", 0.0, 2.0, 1000.0, [&](double t) { return oracle::bump(t, c, 0.08); });
            const Signal f = lowpass_zero_phase(s, 2, 10.0);
            CHECK(argmax(f.values) == argmax(s.values));
        }
    }

    TEST_CASE("100 Hz is attenuated by more than 40 dB") {
        const double rate = 1000.0;
        const Signal s = oracle::sampled("x", 0.0, 3.0, rate,
                                         [](double t) { return std::sin(2 * pi * t) + std::sin(2 * pi * 100 * t); });
        const Signal f = lowpass_zero_phase(s, 2, 10.0);
        const double amp = fitted_amplitude(f, 100.0, 500, 2500);
        CHECK(20 * std::log10(amp) < -40.0);
        CHECK(amp == doctest::Approx(oracle::butterworth_power_gain(2, 10.0, rate, 100.0)).epsilon(1e-3));
    }

    TEST_CASE("filter is linear") {
        std::mt19937_64 rng(3);
        std::normal_distribution<double> n;
        std::vector<double> x(2000), y(2000), z(2000);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = n(rng);
            y[i] = n(rng);
            z[i] = 2.5 * x[i] - 0.7 * y[i];
        }
        const auto sos = butterworth_lowpass(2, 25.0, 1000.0);
        const auto fx = filtfilt(sos, x), fy = filtfilt(sos, y), fz = filtfilt(sos, z);
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(fz[i] - (2.5 * fx[i] - 0.7 * fy[i])) < 1e-9);
    }

    TEST_CASE("invalid cutoff") {
        CHECK_THROWS_AS(butterworth_lowpass(2, 600.0, 1000.0), SignalError);
        CHECK_THROWS_AS(butterworth_lowpass(2, 0.0, 1000.0), SignalError);
        CHECK_THROWS_AS(butterworth_lowpass(0, 10.0, 1000.0), SignalError);
        Signal nonuniform{"x", "", {0.0, 0.1, 0.3}, {1, 2, 3}, 0.0};
        CHECK_THROWS_AS(lowpass_zero_phase(nonuniform, 2, 1.0), SignalError);
    }

    TEST_CASE("gradient is exact on quadratics") {
        std::vector<double> x(50);
        const double dt = 0.01;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double t = static_cast<double>(i) * dt;
            x[i] = 2 * t * t - t + 4;
        }
        const auto g = gradient(x, dt);
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(g[i] == doctest::Approx(4 * static_cast<double>(i) * dt - 1).epsilon(1e-9));
        }
    }

    TEST_CASE("touch-down after a swing plateau") {
        const double deg = pi / 180.0;
        const Signal s = oracle::sampled("ankle", 0.0, 1.5, 1000.0, [&](double t) {
            if (t < 0.7) return 0.2 * std::sin(10 * t);
            if (t < 1.0) return -22 * deg;
            return -22 * deg + 2.0 * (t - 1.0);
        });
        const auto r = detect_touchdowns(s);
        REQUIRE(r.times.size() == 1);
        CHECK(r.times[0] == doctest::Approx(1.0).epsilon(0.002));
        CHECK(std::abs(r.times[0] - 1.0) <= 0.002);
    }

    TEST_CASE("constant ankle gives no touch-downs") {
        const Signal s = make_uniform("ankle", "", 0.0, 1e-3, std::vector<double>(2000, -0.38));
        const auto r = detect_touchdowns(s);
        CHECK(r.times.empty());
        CHECK_FALSE(r.diagnostic.empty());
    }

    TEST_CASE("periodic plateaus are segmented once per period") {
        const Signal s = oracle::sampled("ankle", 0.0, 10.0, 1000.0, [](double t) {
            const double u = t - std::floor(t);
            return u < 0.4 ? -0.38 : -0.38 + 0.5 * std::sin(pi * (u - 0.4) / 0.6);
        });
        const auto r = detect_touchdowns(s);
        REQUIRE(r.times.size() == 10);
        for (std::size_t i = 1; i < r.times.size(); ++i) CHECK(std::abs(r.times[i] - r.times[i - 1] - 1.0) <= 0.005);
    }

    TEST_CASE("segmentation survives 20 dB noise after filtering") {
        std::mt19937_64 rng(11);
        Signal s = oracle::sampled("ankle", 0.0, 10.0, 1000.0, [](double t) {
            const double u = t - std::floor(t);
            return u < 0.4 ? -0.38 : -0.38 + 0.5 * std::sin(pi * (u - 0.4) / 0.6);
        });
        // Signal power of the periodic part around its mean, noise 20 dB below.
        double mean = 0, power = 0;
        for (double v : s.values) mean += v;
        mean /= static_cast<double>(s.size());
        for (double v : s.values) power += (v - mean) * (v - mean);
        power /= static_cast<double>(s.size());
        std::normal_distribution<double> noise(0.0, std::sqrt(power / 100.0));
        for (double& v : s.values) v += noise(rng);
        const auto r = detect_touchdowns(lowpass_zero_phase(s, 2, 5.0));
        CHECK(r.times.size() == 10);
    }

    TEST_CASE("averaging identical cycles") {
        const Signal s = oracle::sampled("x", 0.0, 3.0, 1000.0, [](double t) { return std::sin(2 * pi * t); });
        const CycleSet c = average_cycles(s, {0.0, 1.0, 2.0});
        REQUIRE(c.cycles.size() == 2);
        CHECK(c.grid.size() == kCycleGridPoints);
        for (std::size_t i = 0; i < c.grid.size(); ++i) {
            CHECK(c.sd[i] < 1e-12);
            CHECK(c.mean[i] == doctest::Approx(c.cycles[0][i]).scale(1.0).epsilon(1e-12));
        }
        const CycleSet one = average_cycles(s, {0.0, 1.0});
        REQUIRE(one.cycles.size() == 1);
        for (double v : one.sd) CHECK(v == 0.0);
    }

    TEST_CASE("averaging jittered cycles recovers the waveform") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> jitter(-0.01, 0.01);
        std::vector<double> td{0.0};
        for (int i = 0; i < 20; ++i) td.push_back(td.back() + 1.0 + jitter(rng));
        const double end = td.back();
        const Signal s = oracle::sampled("x", 0.0, end + 0.01, 1000.0, [&](double t) {
            auto it = std::upper_bound(td.begin(), td.end(), t);
            if (it == td.begin() || it == td.end()) return 0.0;
            const double a = *(it - 1), b = *it;
            return std::sin(2 * pi * (t - a) / (b - a));
        });
        const CycleSet c = average_cycles(s, td);
        CHECK(c.cycles.size() == 20);
        for (std::size_t i = 0; i < c.grid.size(); ++i) CHECK(std::abs(c.mean[i] - std::sin(2 * pi * c.grid[i] / 100)) < 1e-3);
    }

    TEST_CASE("averaging needs a complete cycle") {
        const Signal s = oracle::sampled("x", 0.0, 1.0, 1000.0, [](double t) { return t; });
        CHECK_THROWS_AS(average_cycles(s, {0.5}), SignalError);
    }
}
