#pragma once

#include "gmv/error.hpp"
#include "gmv/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace gmv {

inline constexpr double standard_gravity = 9.81;

struct Peaks {
    double pga = 0.0;
    double pgv = 0.0;
    double pgd = 0.0;
};

namespace detail {

inline void require_unit(const TimeSeries& ts, Unit u, const char* what)
{
    require(ts.unit() == u, ErrorCode::unit_mismatch,
            std::string(what) + " expects a " + std::string(unit_symbol(u)) + " trace");
}

inline double peak_abs(std::span<const double> x)
{
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

// Cumulative trapezoidal integral of x^2.
inline std::vector<double> cumulative_square(const TimeSeries& ts)
{
    const auto x = ts.samples();
    std::vector<double> c(x.size());
    const double h2 = 0.5 * ts.dt();
    c[0] = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) c[i] = c[i - 1] + h2 * (x[i - 1] * x[i - 1] + x[i] * x[i]);
    return c;
}

// Width of the window between the last time the cumulative curve is still
// at or below lo*total and the first time it reaches hi*total.
inline double significant_duration(const TimeSeries& ts, double lo, double hi)
{
    require(lo >= 0.0 && lo < hi && hi <= 1.0, ErrorCode::invalid_argument,
            "duration thresholds must satisfy 0 <= lo < hi <= 1");
    const auto c = cumulative_square(ts);
    const double total = c.back();
    require(total > 0.0, ErrorCode::zero_energy, "duration undefined for a zero-energy trace");

    const double dt = ts.dt();
    const double level_lo = lo * total;
    const double level_hi = hi * total;

    const auto up = std::upper_bound(c.begin(), c.end(), level_lo);
    const auto i = static_cast<std::size_t>(up - c.begin()) - 1; // last index with c <= level_lo
    double t_lo = static_cast<double>(i) * dt;
    if (i + 1 < c.size()) t_lo += (level_lo - c[i]) / (c[i + 1] - c[i]) * dt;

    const auto j = static_cast<std::size_t>(std::lower_bound(c.begin(), c.end(), level_hi) - c.begin());
    double t_hi = 0.0;
    if (j > 0) t_hi = static_cast<double>(j - 1) * dt + (level_hi - c[j - 1]) / (c[j] - c[j - 1]) * dt;

    return std::max(0.0, t_hi - t_lo);
}

} // namespace detail

/// PGA from the trace itself; PGV and PGD from single and double trapezoidal
/// integration, each integral linearly detrended unless disabled.
inline Peaks peaks(const TimeSeries& acc, bool detrend_integrals = true)
{
    detail::require_unit(acc, Unit::acceleration, "peaks");
    Peaks p;
    p.pga = detail::peak_abs(acc.samples());
    auto vel = integrate(acc);
    if (detrend_integrals) vel = detrend(vel, DetrendMode::linear);
    p.pgv = detail::peak_abs(vel.samples());
    auto disp = integrate(vel);
    if (detrend_integrals) disp = detrend(disp, DetrendMode::linear);
    p.pgd = detail::peak_abs(disp.samples());
    return p;
}

/// Ia = pi / (2 g) * integral of a^2 dt.
inline double arias_intensity(const TimeSeries& acc)
{
    detail::require_unit(acc, Unit::acceleration, "arias_intensity");
    return std::numbers::pi / (2.0 * standard_gravity) * detail::cumulative_square(acc).back();
}

inline double arias_duration(const TimeSeries& acc, double lo = 0.05, double hi = 0.75)
{
    detail::require_unit(acc, Unit::acceleration, "arias_duration");
    return detail::significant_duration(acc, lo, hi);
}

/// Integral of squared velocity.
inline double energy_integral(const TimeSeries& vel)
{
    detail::require_unit(vel, Unit::velocity, "energy_integral");
    return detail::cumulative_square(vel).back();
}

inline double energy_duration(const TimeSeries& vel, double lo = 0.05, double hi = 0.75)
{
    detail::require_unit(vel, Unit::velocity, "energy_duration");
    return detail::significant_duration(vel, lo, hi);
}

/// 50 log-spaced periods from 0.02 s to 10 s with exact end points.
inline std::vector<double> default_periods(std::size_t n = 50, double t_min = 0.02, double t_max = 10.0)
{
    detail::require(n >= 2 && t_min > 0.0 && t_min < t_max, ErrorCode::invalid_argument, "bad period grid");
    std::vector<double> p(n);
    const double ratio = std::log(t_max / t_min);
    for (std::size_t i = 0; i < n; ++i)
        p[i] = t_min * std::exp(ratio * static_cast<double>(i) / static_cast<double>(n - 1));
    p.front() = t_min;
    p.back() = t_max;
    return p;
}

enum class SpectralResponse { pseudo, absolute };

struct ResponseSpectrum {
    std::vector<double> periods;
    std::vector<double> sa;
    std::vector<double> skipped; // periods not above 2*dt
};

namespace detail {

// Peak response of a damped SDOF oscillator to piecewise-linear base
// acceleration, advanced with the exact recurrence for linearly varying load.
inline double sdof_peak(std::span<const double> ag, double dt, double period, double zeta, SpectralResponse kind)
{
    using std::numbers::pi;
    const double w = 2.0 * pi / period;
    const double k = w * w;
    const double sq = std::sqrt(1.0 - zeta * zeta);
    const double wd = w * sq;
    const double e = std::exp(-zeta * w * dt);
    const double s = std::sin(wd * dt);
    const double c = std::cos(wd * dt);
    const double zs = zeta / sq;

    const double A = e * (zs * s + c);
    const double B = e * s / wd;
    const double C = (2.0 * zeta / (w * dt) + e * (((1.0 - 2.0 * zeta * zeta) / (wd * dt) - zs) * s
                                                  - (1.0 + 2.0 * zeta / (w * dt)) * c)) / k;
    const double D = (1.0 - 2.0 * zeta / (w * dt) + e * ((2.0 * zeta * zeta - 1.0) / (wd * dt) * s
                                                        + 2.0 * zeta / (w * dt) * c)) / k;
    const double Ap = -e * (w / sq) * s;
    const double Bp = e * (c - zs * s);
    const double Cp = (-1.0 / dt + e * ((w / sq + zeta / (dt * sq)) * s + c / dt)) / k;
    const double Dp = (1.0 - e * (zs * s + c)) / (k * dt);

    double u = 0.0, v = 0.0;
    double umax = 0.0, amax = 0.0;
    for (std::size_t i = 0; i + 1 < ag.size(); ++i) {
        const double p0 = -ag[i];
        const double p1 = -ag[i + 1];
        const double un = A * u + B * v + C * p0 + D * p1;
        const double vn = Ap * u + Bp * v + Cp * p0 + Dp * p1;
        u = un;
        v = vn;
        umax = std::max(umax, std::abs(u));
        if (kind == SpectralResponse::absolute) amax = std::max(amax, std::abs(2.0 * zeta * w * v + k * u));
    }
    return kind == SpectralResponse::pseudo ? k * umax : amax;
}

} // namespace detail

inline ResponseSpectrum response_spectrum(const TimeSeries& acc, double damping, std::span<const double> periods,
                                          SpectralResponse kind = SpectralResponse::pseudo)
{
    detail::require_unit(acc, Unit::acceleration, "response_spectrum");
    detail::require(damping >= 0.0 && damping < 1.0, ErrorCode::invalid_argument, "damping must lie in [0, 1)");
    ResponseSpectrum rs;
    for (double T : periods) {
        detail::require(T > 0.0, ErrorCode::invalid_argument, "periods must be positive");
        if (T <= 2.0 * acc.dt()) {
            rs.skipped.push_back(T);
            continue;
        }
        rs.periods.push_back(T);
        rs.sa.push_back(detail::sdof_peak(acc.samples(), acc.dt(), T, damping, kind));
    }
    return rs;
}

/// Maximum normalized cross-correlation over lags |tau| <= max_lag, after
/// removing each trace's mean. Traces must share a grid.
inline double cross_correlation(const TimeSeries& a, const TimeSeries& b, double max_lag = 0.5)
{
    detail::require(a.same_grid(b), ErrorCode::not_aligned, "cross_correlation needs aligned traces");
    detail::require(max_lag >= 0.0, ErrorCode::invalid_argument, "max_lag must be >= 0");
    const std::size_t n = a.size();
    auto demeaned = [n](std::span<const double> x) {
        double m = 0.0;
        for (double v : x) m += v;
        m /= static_cast<double>(n);
        std::vector<double> y(x.begin(), x.end());
        for (double& v : y) v -= m;
        return y;
    };
    const auto x = demeaned(a.samples());
    const auto y = demeaned(b.samples());
    double sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
    }
    detail::require(sxx > 0.0 && syy > 0.0, ErrorCode::zero_energy, "cross_correlation of a zero-variance trace");
    const double norm = std::sqrt(sxx * syy);

    const auto lags = static_cast<std::ptrdiff_t>(
        std::min(std::floor(max_lag / a.dt() + 1e-9), static_cast<double>(n - 1)));
    double best = -1.0;
    for (std::ptrdiff_t lag = -lags; lag <= lags; ++lag) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto j = static_cast<std::ptrdiff_t>(i) + lag;
            if (j < 0 || j >= static_cast<std::ptrdiff_t>(n)) continue;
            s += x[i] * y[static_cast<std::size_t>(j)];
        }
        best = std::max(best, s / norm);
    }
    return std::clamp(best, -1.0, 1.0);
}

struct IntensityConfig {
    double damping = 0.05;
    std::vector<double> periods = default_periods();
    SpectralResponse response = SpectralResponse::pseudo;
    double duration_lo = 0.05;
    double duration_hi = 0.75;
    double fs_smoothing_octaves = 0.0;
    bool detrend_integrals = true;
};

/// The nine single-trace intensity measures (C* is a pair metric).
struct IntensityVector {
    double pga = 0.0;
    double pgv = 0.0;
    double pgd = 0.0;
    double ia = 0.0;
    double da = 0.0;
    double de = 0.0;
    double iv = 0.0;
    ResponseSpectrum sa;
    Spectrum fs;
};

// Zero-energy traces report zero durations instead of failing.
inline IntensityVector intensity_vector(const TimeSeries& acc, const IntensityConfig& cfg)
{
    detail::require_unit(acc, Unit::acceleration, "intensity_vector");
    IntensityVector iv;
    iv.pga = detail::peak_abs(acc.samples());
    auto vel = integrate(acc);
    if (cfg.detrend_integrals) vel = detrend(vel, DetrendMode::linear);
    auto disp = integrate(vel);
    if (cfg.detrend_integrals) disp = detrend(disp, DetrendMode::linear);
    iv.pgv = detail::peak_abs(vel.samples());
    iv.pgd = detail::peak_abs(disp.samples());
    iv.ia = arias_intensity(acc);
    iv.da = iv.ia > 0.0 ? arias_duration(acc, cfg.duration_lo, cfg.duration_hi) : 0.0;
    iv.iv = energy_integral(vel);
    iv.de = iv.iv > 0.0 ? energy_duration(vel, cfg.duration_lo, cfg.duration_hi) : 0.0;
    iv.sa = response_spectrum(acc, cfg.damping, cfg.periods, cfg.response);
    iv.fs = fourier_amplitude(acc, cfg.fs_smoothing_octaves);
    return iv;
}

} // namespace gmv
