#include "gmv/signal.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace gmv;
using std::numbers::pi;

namespace {

TimeSeries sine(double f, double dt, double duration, double amp = 1.0, Unit u = Unit::acceleration)
{
    const auto n = static_cast<std::size_t>(std::llround(duration / dt));
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2.0 * pi * f * static_cast<double>(i) * dt);
    return TimeSeries(dt, 0.0, std::move(x), u);
}

TimeSeries random_series(std::size_t n, unsigned seed, double dt = 0.01, Unit u = Unit::velocity)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.3, 1.0);
    std::vector<double> x(n);
    for (auto& v : x) v = nd(rng);
    return TimeSeries(dt, 0.0, std::move(x), u);
}

double rms(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s / static_cast<double>(x.size()));
}

} // namespace

TEST(TimeSeries, RejectsBadConstruction)
{
    EXPECT_THROW(TimeSeries(0.0, 0.0, {1.0, 2.0}, Unit::acceleration), Error);
    EXPECT_THROW(TimeSeries(0.01, 0.0, {1.0}, Unit::acceleration), Error);
    EXPECT_THROW(TimeSeries(0.01, 0.0, {1.0, NAN}, Unit::acceleration), Error);
    EXPECT_THROW(TimeSeries(0.01, 0.0, {1.0, INFINITY}, Unit::acceleration), Error);
    EXPECT_NO_THROW(TimeSeries(0.01, 0.0, {1.0, 2.0}, Unit::acceleration));
}

TEST(Record3C, ComponentsMustShareGridAndUnit)
{
    TimeSeries a(0.01, 0.0, {1, 2, 3}, Unit::acceleration);
    TimeSeries shorter(0.01, 0.0, {1, 2}, Unit::acceleration);
    TimeSeries vel(0.01, 0.0, {1, 2, 3}, Unit::velocity);
    EXPECT_THROW(Record3C(a, a, shorter), Error);
    try {
        Record3C(a, a, vel);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::unit_mismatch);
    }
    Record3C r(a, a, a, "X");
    EXPECT_EQ(r.size(), 3u);
}

TEST(Detrend, ConstantMeanModeGivesZeros)
{
    TimeSeries ts(0.1, 0.0, std::vector<double>(10, 5.0), Unit::acceleration);
    const auto d = detrend(ts);
    for (double v : d.samples()) EXPECT_EQ(v, 0.0);
}

TEST(Detrend, ExactLineRemoved)
{
    TimeSeries ts(0.1, 0.0, {0, 1, 2, 3}, Unit::acceleration);
    const auto d = detrend(ts, DetrendMode::linear);
    for (double v : d.samples()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Detrend, RandomMeanBelowRoundoff)
{
    for (unsigned seed = 0; seed < 20; ++seed) {
        const auto ts = random_series(1000 + seed, seed);
        const auto d = detrend(ts);
        double m = 0.0;
        for (double v : d.samples()) m += v;
        m /= static_cast<double>(d.size());
        EXPECT_LT(std::abs(m), 1e-12 * rms(ts.samples()));
    }
}

TEST(Taper, ZeroFractionIsIdentity)
{
    const auto ts = random_series(101, 3);
    EXPECT_EQ(taper(ts, 0.0), ts);
}

TEST(Taper, HalfFractionIsHann)
{
    const std::size_t n = 257;
    TimeSeries ones(0.01, 0.0, std::vector<double>(n, 1.0), Unit::acceleration);
    const auto w = taper(ones, 0.5);
    for (std::size_t i = 0; i < n; ++i) {
        const double hann = 0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(i) / static_cast<double>(n - 1)));
        EXPECT_NEAR(w[i], hann, 1e-12) << i;
    }
}

TEST(Taper, EndpointsZeroInteriorUntouched)
{
    const auto ts = random_series(500, 4);
    const auto t = taper(ts, 0.05);
    EXPECT_EQ(t[0], 0.0);
    EXPECT_EQ(t[499], 0.0);
    for (std::size_t i = 30; i < 470; ++i) EXPECT_EQ(t[i], ts[i]);
    EXPECT_THROW(taper(ts, 0.6), Error);
    EXPECT_THROW(taper(ts, -0.1), Error);
}

TEST(Bandpass, PassbandSinePreserved)
{
    const auto x = sine(1.0, 0.005, 40.0);
    const auto y = bandpass(x, 0.5, 2.0, 4, true);
    double peak = 0.0;
    for (std::size_t i = 2000; i < 6000; ++i) peak = std::max(peak, std::abs(y[i]));
    EXPECT_NEAR(peak, 1.0, 0.05);
}

TEST(Bandpass, StopbandAttenuation40dB)
{
    const auto x = sine(1.0, 0.005, 40.0);
    const auto y = bandpass(x, 5.0, 10.0, 4, true);
    std::span<const double> xi = x.samples().subspan(2000, 4000);
    std::span<const double> yi = y.samples().subspan(2000, 4000);
    EXPECT_LT(20.0 * std::log10(rms(yi) / rms(xi)), -40.0);
}

TEST(Bandpass, MagnitudeMatchesButterworth)
{
    // |H|^2 = 1 / (1 + ((w^2 - w0^2) / (w B))^(2n)) on the prewarped axis.
    const double fs = 200.0, lo = 0.5, hi = 2.0;
    const int order = 4;
    const auto sec = butterworth_bandpass(order, lo, hi, fs);
    auto warp = [&](double f) { return 2.0 * fs * std::tan(pi * f / fs); };
    const double w1 = warp(lo), w2 = warp(hi), w0sq = w1 * w2, bw = w2 - w1;
    for (double f : {0.1, 0.3, 0.5, 0.8, 1.0, 1.5, 2.0, 3.0, 6.0, 20.0}) {
        std::complex<double> h = 1.0;
        for (const auto& s : sec) h *= s.response(2.0 * pi * f / fs);
        const double w = warp(f);
        const double expected = 1.0 / std::sqrt(1.0 + std::pow((w * w - w0sq) / (w * bw), 2 * order));
        EXPECT_NEAR(std::abs(h), expected, 1e-9) << f;
    }
}

TEST(Bandpass, ZeroInZeroOutAndBadBands)
{
    TimeSeries z(0.01, 0.0, std::vector<double>(500, 0.0), Unit::acceleration);
    const auto y = bandpass(z, 1.0, 5.0);
    for (double v : y.samples()) EXPECT_EQ(v, 0.0);
    EXPECT_THROW(bandpass(z, 0.0, 5.0), Error);
    EXPECT_THROW(bandpass(z, 5.0, 1.0), Error);
    EXPECT_THROW(bandpass(z, 1.0, 50.0), Error);
}

TEST(Bandpass, ZeroPhasePreservesPeakTiming)
{
    // Gaussian-windowed 1 Hz burst centred at 10 s.
    const double dt = 0.005;
    std::vector<double> x(4000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = static_cast<double>(i) * dt - 10.0;
        x[i] = std::exp(-t * t / 2.0) * std::cos(2.0 * pi * t);
    }
    TimeSeries ts(dt, 0.0, x, Unit::acceleration);
    const auto y = bandpass(ts, 0.5, 2.0);
    auto argmax = [](std::span<const double> v) {
        return std::distance(v.begin(), std::max_element(v.begin(), v.end()));
    };
    EXPECT_LE(std::abs(argmax(y.samples()) - argmax(ts.samples())), 1);
}

TEST(Linearity, ProcessingOperatorsAreLinear)
{
    const auto x = random_series(800, 10, 0.01, Unit::velocity);
    const auto y = random_series(800, 11, 0.01, Unit::velocity);
    const double a = 1.7, b = -0.6;
    std::vector<double> comb(800);
    for (std::size_t i = 0; i < 800; ++i) comb[i] = a * x[i] + b * y[i];
    const auto z = x.with_samples(comb);

    auto check = [&](auto&& op, const char* name) {
        const auto lhs = op(z);
        const auto ox = op(x), oy = op(y);
        double scale = 0.0;
        for (std::size_t i = 0; i < 800; ++i) scale = std::max(scale, std::abs(lhs[i]));
        for (std::size_t i = 0; i < 800; ++i)
            EXPECT_NEAR(lhs[i], a * ox[i] + b * oy[i], 1e-9 * scale) << name << " " << i;
    };
    check([](const TimeSeries& t) { return detrend(t); }, "detrend");
    check([](const TimeSeries& t) { return bandpass(t, 1.0, 10.0); }, "bandpass");
    check([](const TimeSeries& t) { return integrate(t); }, "integrate");
    check([](const TimeSeries& t) { return differentiate(t); }, "differentiate");
}

TEST(Calculus, ConstantAccelerationRamp)
{
    TimeSeries a(0.01, 0.0, std::vector<double>(101, 1.0), Unit::acceleration);
    const auto v = integrate(a);
    EXPECT_EQ(v.unit(), Unit::velocity);
    EXPECT_NEAR(v[100], 1.0, 1e-12);
    EXPECT_EQ(integrate(v).unit(), Unit::displacement);
}

TEST(Calculus, IntegrateZerosAndUnitGuards)
{
    TimeSeries z(0.01, 0.0, std::vector<double>(50, 0.0), Unit::acceleration);
    const auto v0 = integrate(z);
    for (double v : v0.samples()) EXPECT_EQ(v, 0.0);
    EXPECT_THROW(differentiate(z), Error);
    EXPECT_THROW(integrate(z.with_samples(std::vector<double>(50, 0.0), Unit::displacement)), Error);
}

TEST(Calculus, RoundTripOnSmoothSine)
{
    const auto x = sine(1.0, 1e-4, 3.0, 2.0, Unit::acceleration);
    const auto back = differentiate(integrate(x));
    EXPECT_EQ(back.unit(), Unit::acceleration);
    double err = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        err = std::max(err, std::abs(back[i] - x[i]));
        peak = std::max(peak, std::abs(x[i]));
    }
    EXPECT_LT(err, 1e-6 * peak);
}

TEST(FourierAmplitude, SinePeakIsHalfDuration)
{
    const double T = 20.0;
    const auto x = sine(2.0, 0.01, T);
    const auto s = fourier_amplitude(x);
    const auto k = std::distance(s.amplitudes.begin(), std::max_element(s.amplitudes.begin(), s.amplitudes.end()));
    EXPECT_NEAR(s.freqs[k], 2.0, 1e-9);
    EXPECT_NEAR(s.amplitudes[k], T / 2.0, 0.03 * T / 2.0);
}

TEST(FourierAmplitude, Parseval)
{
    const auto x = random_series(1000, 7, 0.01, Unit::acceleration);
    const auto s = fourier_amplitude(x);
    const double df = s.freqs[1];
    // One-sided spectrum: interior bins count twice.
    double spec = 0.0;
    for (std::size_t k = 0; k < s.amplitudes.size(); ++k) {
        const bool edge = k == 0 || k + 1 == s.amplitudes.size();
        spec += (edge ? 1.0 : 2.0) * s.amplitudes[k] * s.amplitudes[k] * df;
    }
    double energy = 0.0;
    for (double v : x.samples()) energy += v * v * x.dt();
    EXPECT_NEAR(spec, energy, 0.01 * energy);
}

TEST(FourierAmplitude, ZeroInputAndSmoothing)
{
    TimeSeries z(0.01, 0.0, std::vector<double>(256, 0.0), Unit::acceleration);
    for (double v : fourier_amplitude(z, 0.5).amplitudes) EXPECT_EQ(v, 0.0);

    // Smoothing a flat spectrum leaves it flat.
    TimeSeries imp(0.01, 0.0, std::vector<double>(256, 0.0), Unit::acceleration);
    std::vector<double> d(256, 0.0);
    d[0] = 1.0;
    const auto s = fourier_amplitude(imp.with_samples(d), 1.0);
    for (std::size_t k = 1; k < s.amplitudes.size(); ++k) EXPECT_NEAR(s.amplitudes[k], 0.01, 1e-14);
}

TEST(Align, ResamplesToFinerGridOverOverlap)
{
    std::vector<double> a(201), b(51);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = 0.01 * static_cast<double>(i);      // t
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = 1.0 + 0.04 * static_cast<double>(i); // t at t0 = 1
    TimeSeries ta(0.01, 0.0, a, Unit::acceleration), tb(0.04, 1.0, b, Unit::acceleration);
    const auto [ra, rb] = align(ta, tb);
    EXPECT_DOUBLE_EQ(ra.dt(), 0.01);
    EXPECT_EQ(ra.size(), rb.size());
    EXPECT_DOUBLE_EQ(ra.t0(), 1.0);
    EXPECT_EQ(ra.size(), 101u);
    for (std::size_t i = 0; i < ra.size(); ++i) {
        EXPECT_NEAR(ra[i], ra.time(i), 1e-12);
        EXPECT_NEAR(rb[i], rb.time(i), 1e-12);
    }
}

TEST(Align, ErrorsOnNoOverlapOrUnits)
{
    TimeSeries a(0.01, 0.0, std::vector<double>(100, 1.0), Unit::acceleration);
    TimeSeries b(0.01, 5.0, std::vector<double>(100, 1.0), Unit::acceleration);
    TimeSeries v(0.02, 0.0, std::vector<double>(100, 1.0), Unit::velocity);
    try {
        align(a, b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::no_overlap);
    }
    EXPECT_THROW(align(a, v), Error);
}
