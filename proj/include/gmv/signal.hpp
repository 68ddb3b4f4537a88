#pragma once

#include "gmv/error.hpp"
#include "gmv/fft.hpp"
#include "gmv/filter.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gmv {

enum class Unit { acceleration, velocity, displacement };

constexpr std::string_view unit_symbol(Unit u)
{
    switch (u) {
    case Unit::acceleration: return "m/s^2";
    case Unit::velocity: return "m/s";
    case Unit::displacement: return "m";
    }
    return "?";
}

inline Unit parse_unit(std::string_view s)
{
    if (s == "m/s^2" || s == "m/s2" || s == "acceleration") return Unit::acceleration;
    if (s == "m/s" || s == "velocity") return Unit::velocity;
    if (s == "m" || s == "displacement") return Unit::displacement;
    throw Error(ErrorCode::parse, "unknown unit '" + std::string(s) + "'");
}

/// Uniformly sampled real waveform. Construction validates dt > 0, at least
/// two samples, and that every sample is finite.
class TimeSeries {
public:
    TimeSeries(double dt, double t0, std::vector<double> samples, Unit unit, std::string label = {})
        : dt_(dt), t0_(t0), samples_(std::move(samples)), unit_(unit), label_(std::move(label))
    {
        detail::require(dt_ > 0.0 && std::isfinite(dt_), ErrorCode::invalid_argument,
                        "time series dt must be positive");
        detail::require(std::isfinite(t0_), ErrorCode::invalid_argument, "time series t0 must be finite");
        detail::require(samples_.size() >= 2, ErrorCode::invalid_argument,
                        "time series needs at least two samples");
        detail::require(std::all_of(samples_.begin(), samples_.end(), [](double v) { return std::isfinite(v); }),
                        ErrorCode::invalid_argument, "time series samples must be finite");
    }

    double dt() const { return dt_; }
    double t0() const { return t0_; }
    std::size_t size() const { return samples_.size(); }
    std::span<const double> samples() const { return samples_; }
    double operator[](std::size_t i) const { return samples_[i]; }
    Unit unit() const { return unit_; }
    const std::string& label() const { return label_; }

    double time(std::size_t i) const { return t0_ + static_cast<double>(i) * dt_; }
    double duration() const { return static_cast<double>(samples_.size() - 1) * dt_; }
    double end_time() const { return time(samples_.size() - 1); }

    // Same grid and label, new values (and optionally a new unit).
    TimeSeries with_samples(std::vector<double> samples) const
    {
        return TimeSeries(dt_, t0_, std::move(samples), unit_, label_);
    }
    TimeSeries with_samples(std::vector<double> samples, Unit unit) const
    {
        return TimeSeries(dt_, t0_, std::move(samples), unit, label_);
    }
    TimeSeries with_label(std::string label) const
    {
        return TimeSeries(dt_, t0_, samples_, unit_, std::move(label));
    }

    bool same_grid(const TimeSeries& o) const
    {
        return dt_ == o.dt_ && t0_ == o.t0_ && samples_.size() == o.samples_.size();
    }

    bool operator==(const TimeSeries&) const = default;

private:
    double dt_;
    double t0_;
    std::vector<double> samples_;
    Unit unit_;
    std::string label_;
};

enum class Component { ew, ns, ud };
inline constexpr std::array<Component, 3> all_components{Component::ew, Component::ns, Component::ud};

constexpr std::string_view component_name(Component c)
{
    switch (c) {
    case Component::ew: return "ew";
    case Component::ns: return "ns";
    case Component::ud: return "ud";
    }
    return "?";
}

inline Component parse_component(std::string_view s)
{
    if (s == "ew" || s == "EW") return Component::ew;
    if (s == "ns" || s == "NS") return Component::ns;
    if (s == "ud" || s == "UD") return Component::ud;
    throw Error(ErrorCode::parse, "unknown component '" + std::string(s) + "'");
}

/// Three-component record. All components share dt, t0, length and unit.
struct Record3C {
    TimeSeries ew;
    TimeSeries ns;
    TimeSeries ud;
    std::string station_id;
    std::optional<double> epicentral_distance;

    Record3C(TimeSeries ew_, TimeSeries ns_, TimeSeries ud_, std::string station = {},
             std::optional<double> distance = std::nullopt)
        : ew(std::move(ew_)), ns(std::move(ns_)), ud(std::move(ud_)), station_id(std::move(station)),
          epicentral_distance(distance)
    {
        detail::require(ew.same_grid(ns) && ew.same_grid(ud), ErrorCode::invalid_argument,
                        "record components must share dt, t0 and length");
        detail::require(ew.unit() == ns.unit() && ew.unit() == ud.unit(), ErrorCode::unit_mismatch,
                        "record components must share a unit");
    }

    const TimeSeries& component(Component c) const
    {
        switch (c) {
        case Component::ew: return ew;
        case Component::ns: return ns;
        case Component::ud: return ud;
        }
        return ew;
    }

    Unit unit() const { return ew.unit(); }
    double dt() const { return ew.dt(); }
    std::size_t size() const { return ew.size(); }

    bool operator==(const Record3C&) const = default;
};

struct Spectrum {
    std::vector<double> freqs;
    std::vector<double> amplitudes;
    double smoothing_octaves = 0.0;
};

enum class DetrendMode { mean, linear };

inline TimeSeries detrend(const TimeSeries& ts, DetrendMode mode = DetrendMode::mean)
{
    const auto x = ts.samples();
    const std::size_t n = x.size();
    std::vector<double> out(x.begin(), x.end());

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);

    if (mode == DetrendMode::mean) {
        for (double& v : out) v -= mean;
        return ts.with_samples(std::move(out));
    }

    // Least squares on a centered index keeps the normal equations diagonal.
    const double ic = 0.5 * static_cast<double>(n - 1);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) - ic;
        sxy += u * (x[i] - mean);
        sxx += u * u;
    }
    const double slope = sxy / sxx;
    for (std::size_t i = 0; i < n; ++i) out[i] -= mean + slope * (static_cast<double>(i) - ic);
    return ts.with_samples(std::move(out));
}

/// Symmetric cosine (Tukey) taper. `fraction` is the tapered share of the
/// record at each end, so 0.5 yields a full Hann window.
inline TimeSeries taper(const TimeSeries& ts, double fraction)
{
    using std::numbers::pi;
    detail::require(fraction >= 0.0 && fraction <= 0.5, ErrorCode::invalid_argument,
                    "taper fraction must lie in [0, 0.5]");
    std::vector<double> out(ts.samples().begin(), ts.samples().end());
    if (fraction == 0.0) return ts.with_samples(std::move(out));

    const std::size_t n = out.size();
    const double m = fraction * static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = static_cast<double>(i);
        const double right = static_cast<double>(n - 1 - i);
        const double d = std::min(left, right);
        if (d < m) out[i] *= 0.5 * (1.0 - std::cos(pi * d / m));
    }
    return ts.with_samples(std::move(out));
}

inline TimeSeries bandpass(const TimeSeries& ts, double f_lo, double f_hi, int order = 4, bool zero_phase = true)
{
    const double fs = 1.0 / ts.dt();
    const auto sections = butterworth_bandpass(order, f_lo, f_hi, fs);
    std::vector<double> y(ts.samples().begin(), ts.samples().end());
    if (zero_phase)
        apply_sections_zero_phase(sections, y);
    else
        apply_sections(sections, y);
    return ts.with_samples(std::move(y));
}

/// Central differences with second-order one-sided stencils at the ends.
/// Displacement becomes velocity, velocity becomes acceleration.
inline TimeSeries differentiate(const TimeSeries& ts)
{
    detail::require(ts.unit() != Unit::acceleration, ErrorCode::unit_mismatch,
                    "cannot differentiate an acceleration trace");
    const Unit unit = ts.unit() == Unit::displacement ? Unit::velocity : Unit::acceleration;
    const auto x = ts.samples();
    const std::size_t n = x.size();
    const double h = ts.dt();
    std::vector<double> d(n);
    if (n == 2) {
        d[0] = d[1] = (x[1] - x[0]) / h;
    } else {
        d[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * h);
        for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (x[i + 1] - x[i - 1]) / (2.0 * h);
        d[n - 1] = (3.0 * x[n - 1] - 4.0 * x[n - 2] + x[n - 3]) / (2.0 * h);
    }
    return ts.with_samples(std::move(d), unit);
}

/// Cumulative trapezoidal integral starting at zero.
inline TimeSeries integrate(const TimeSeries& ts)
{
    detail::require(ts.unit() != Unit::displacement, ErrorCode::unit_mismatch,
                    "cannot integrate a displacement trace");
    const Unit unit = ts.unit() == Unit::acceleration ? Unit::velocity : Unit::displacement;
    const auto x = ts.samples();
    const double h2 = 0.5 * ts.dt();
    std::vector<double> y(x.size());
    y[0] = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) y[i] = y[i - 1] + h2 * (x[i - 1] + x[i]);
    return ts.with_samples(std::move(y), unit);
}

namespace detail {

// Boxcar mean over [f/2^(w/2), f*2^(w/2)] for every positive frequency.
inline std::vector<double> smooth_log_boxcar(std::span<const double> freqs, std::span<const double> amps,
                                             double octaves)
{
    std::vector<double> out(amps.begin(), amps.end());
    const double half = std::exp2(0.5 * octaves);
    std::size_t lo = 0, hi = 0;
    double sum = 0.0;
    for (std::size_t k = 0; k < freqs.size(); ++k) {
        if (freqs[k] <= 0.0) continue;
        const double f_lo = freqs[k] / half;
        const double f_hi = freqs[k] * half;
        while (hi < freqs.size() && freqs[hi] <= f_hi) {
            if (freqs[hi] > 0.0) sum += amps[hi];
            ++hi;
        }
        while (lo < hi && (freqs[lo] < f_lo || freqs[lo] <= 0.0)) {
            if (freqs[lo] > 0.0) sum -= amps[lo];
            ++lo;
        }
        // Recompute the window sum occasionally to bound drift.
        if ((k & 1023u) == 0) {
            sum = 0.0;
            for (std::size_t j = lo; j < hi; ++j) sum += amps[j];
        }
        out[k] = sum / static_cast<double>(hi - lo);
    }
    return out;
}

} // namespace detail

/// One-sided Fourier amplitude spectrum |X(f)|*dt on the native DFT grid
/// (k / (N dt), k = 0..N/2), optionally boxcar-smoothed in log frequency.
inline Spectrum fourier_amplitude(const TimeSeries& ts, double smoothing_octaves = 0.0)
{
    detail::require(smoothing_octaves >= 0.0, ErrorCode::invalid_argument, "smoothing width must be >= 0");
    const std::size_t n = ts.size();
    fft::ForwardReal forward(n);
    const auto X = forward(ts.samples());

    Spectrum s;
    s.smoothing_octaves = smoothing_octaves;
    s.freqs.resize(X.size());
    s.amplitudes.resize(X.size());
    const double df = 1.0 / (static_cast<double>(n) * ts.dt());
    for (std::size_t k = 0; k < X.size(); ++k) {
        s.freqs[k] = static_cast<double>(k) * df;
        s.amplitudes[k] = std::abs(X[k]) * ts.dt();
    }
    if (smoothing_octaves > 0.0) s.amplitudes = detail::smooth_log_boxcar(s.freqs, s.amplitudes, smoothing_octaves);
    return s;
}

namespace detail {

inline std::vector<double> resample_linear(const TimeSeries& ts, double start, double dt, std::size_t n)
{
    std::vector<double> out(n);
    const auto x = ts.samples();
    const std::size_t last = x.size() - 1;
    for (std::size_t k = 0; k < n; ++k) {
        const double pos = (start + static_cast<double>(k) * dt - ts.t0()) / ts.dt();
        double ip = std::floor(pos);
        double frac = pos - ip;
        if (frac > 1.0 - 1e-9) {
            ip += 1.0;
            frac = 0.0;
        } else if (frac < 1e-9) {
            frac = 0.0;
        }
        std::size_t i = ip <= 0.0 ? 0 : static_cast<std::size_t>(ip);
        if (i >= last) {
            out[k] = x[last];
            continue;
        }
        out[k] = frac == 0.0 ? x[i] : x[i] + frac * (x[i + 1] - x[i]);
    }
    return out;
}

} // namespace detail

/// Resample two traces onto a common grid (the finer dt) over their overlap.
inline std::pair<TimeSeries, TimeSeries> align(const TimeSeries& a, const TimeSeries& b)
{
    detail::require(a.unit() == b.unit(), ErrorCode::unit_mismatch, "cannot align traces with different units");
    if (a.same_grid(b)) return {a, b};

    const double dt = std::min(a.dt(), b.dt());
    const double start = std::max(a.t0(), b.t0());
    const double stop = std::min(a.end_time(), b.end_time());
    detail::require(stop - start >= dt * (1.0 - 1e-9), ErrorCode::no_overlap, "traces do not overlap");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / dt + 1e-9)) + 1;

    TimeSeries ra(dt, start, detail::resample_linear(a, start, dt, n), a.unit(), a.label());
    TimeSeries rb(dt, start, detail::resample_linear(b, start, dt, n), b.unit(), b.label());
    return {std::move(ra), std::move(rb)};
}

inline std::pair<Record3C, Record3C> align(const Record3C& a, const Record3C& b)
{
    auto [aew, bew] = align(a.ew, b.ew);
    auto [ans, bns] = align(a.ns, b.ns);
    auto [aud, bud] = align(a.ud, b.ud);
    return {Record3C(std::move(aew), std::move(ans), std::move(aud), a.station_id, a.epicentral_distance),
            Record3C(std::move(bew), std::move(bns), std::move(bud), b.station_id, b.epicentral_distance)};
}

} // namespace gmv
