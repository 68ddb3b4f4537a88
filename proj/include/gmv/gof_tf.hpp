#pragma once

#include "gmv/error.hpp"
#include "gmv/fft.hpp"
#include "gmv/grid.hpp"
#include "gmv/signal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace gmv {

/// Complex time-frequency plane; rows index time, columns frequency.
struct TFPlane {
    std::vector<double> times;
    std::vector<double> freqs;
    Grid<std::complex<double>> coefficients;
};

inline std::vector<double> log_frequencies(double f_lo, double f_hi, std::size_t n)
{
    detail::require(n >= 1 && f_lo > 0.0 && f_lo <= f_hi, ErrorCode::invalid_argument, "bad frequency grid");
    std::vector<double> f(n);
    if (n == 1) {
        f[0] = f_lo;
        return f;
    }
    const double r = std::log(f_hi / f_lo);
    for (std::size_t i = 0; i < n; ++i) f[i] = f_lo * std::exp(r * static_cast<double>(i) / static_cast<double>(n - 1));
    f.front() = f_lo;
    f.back() = f_hi;
    return f;
}

struct CwtConfig {
    double omega0 = 6.0;
    double taper_fraction = 0.05;
};

/// Continuous wavelet transform with the analytic Morlet wavelet
/// psi(t) = pi^-1/4 exp(i w0 t) exp(-t^2/2), scales s = w0 / (2 pi f),
/// and 1/sqrt(s) (L2) normalization. Computed in the Fourier domain on a
/// tapered, zero-padded copy long enough that the widest wavelet does not
/// wrap around.
inline TFPlane cwt(const TimeSeries& ts, std::span<const double> freqs, const CwtConfig& cfg = {})
{
    using std::numbers::pi;
    detail::require(!freqs.empty(), ErrorCode::invalid_argument, "cwt needs at least one frequency");
    const double nyquist = 0.5 / ts.dt();
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        detail::require(freqs[i] > 0.0 && freqs[i] < nyquist, ErrorCode::invalid_argument,
                        "cwt frequencies must lie in (0, Nyquist)");
        if (i > 0)
            detail::require(freqs[i] > freqs[i - 1], ErrorCode::invalid_argument,
                            "cwt frequencies must be strictly increasing");
    }
    detail::require(cfg.omega0 > 0.0, ErrorCode::invalid_argument, "wavelet omega0 must be positive");

    const std::size_t n = ts.size();
    const double dt = ts.dt();
    const double s_max = cfg.omega0 / (2.0 * pi * freqs.front());
    const auto pad = static_cast<std::size_t>(std::ceil(4.0 * s_max / dt));
    const std::size_t m = fft::next_pow2(n + pad);

    const auto tapered = taper(ts, cfg.taper_fraction);
    fft::ForwardReal forward(m);
    const auto X = forward(tapered.samples());

    TFPlane plane;
    plane.freqs.assign(freqs.begin(), freqs.end());
    plane.times.resize(n);
    for (std::size_t i = 0; i < n; ++i) plane.times[i] = ts.time(i);
    plane.coefficients = Grid<std::complex<double>>(n, freqs.size());

    const double norm = std::pow(pi, -0.25) * std::sqrt(2.0 * pi) / static_cast<double>(m);
    const double dw = 2.0 * pi / (static_cast<double>(m) * dt);
    fft::InverseComplex inverse(m);
    for (std::size_t fi = 0; fi < freqs.size(); ++fi) {
        const double s = cfg.omega0 / (2.0 * pi * freqs[fi]);
        const double gain = norm * std::sqrt(s);
        auto buf = inverse.input();
        std::fill(buf.begin(), buf.end(), std::complex<double>{});
        for (std::size_t k = 1; k < X.size(); ++k) {
            const double arg = s * dw * static_cast<double>(k) - cfg.omega0;
            if (std::abs(arg) > 38.0) continue; // exp(-arg^2/2) underflows below 1e-300
            buf[k] = X[k] * (gain * std::exp(-0.5 * arg * arg));
        }
        inverse.execute();
        const auto out = inverse.output();
        for (std::size_t ti = 0; ti < n; ++ti) plane.coefficients(ti, fi) = out[ti];
    }
    return plane;
}

/// Envelope and phase misfits with global normalization by max|W_ref|.
struct TfMisfits {
    std::vector<double> times;
    std::vector<double> freqs;
    Grid<double> tfem, tfpm;
    std::vector<double> tem, tpm; // per time
    std::vector<double> fem, fpm; // per frequency
    double em = 0.0;
    double pm = 0.0;
};

namespace detail {

// Arg(W_sim conj(W_ref)) in (-pi, pi], built from the individual arguments
// so that positive scaling of the simulation yields exactly zero.
inline double phase_difference(std::complex<double> sim, std::complex<double> ref)
{
    using std::numbers::pi;
    if (sim == std::complex<double>{} || ref == std::complex<double>{}) return 0.0;
    double d = std::arg(sim) - std::arg(ref);
    if (d > pi) d -= 2.0 * pi;
    if (d <= -pi) d += 2.0 * pi;
    return d;
}

} // namespace detail

inline TfMisfits tf_misfits(const TFPlane& ref, const TFPlane& sim)
{
    using std::numbers::pi;
    const auto& R = ref.coefficients;
    const auto& S = sim.coefficients;
    detail::require(R.rows() == S.rows() && R.cols() == S.cols() && ref.freqs == sim.freqs, ErrorCode::not_aligned,
                    "tf_misfits needs planes on a common grid");
    const std::size_t nt = R.rows(), nf = R.cols();

    double max_ref = 0.0;
    for (const auto& w : R) max_ref = std::max(max_ref, std::abs(w));
    detail::require(max_ref > 0.0, ErrorCode::zero_reference, "reference signal is identically zero");

    TfMisfits m;
    m.times = ref.times;
    m.freqs = ref.freqs;
    m.tfem = Grid<double>(nt, nf);
    m.tfpm = Grid<double>(nt, nf);
    m.tem.assign(nt, 0.0);
    m.tpm.assign(nt, 0.0);
    m.fem.assign(nf, 0.0);
    m.fpm.assign(nf, 0.0);

    std::vector<double> ref_t(nt, 0.0), ref_f(nf, 0.0);
    double de2 = 0.0, dp2 = 0.0, r2 = 0.0;
    for (std::size_t t = 0; t < nt; ++t) {
        for (std::size_t f = 0; f < nf; ++f) {
            const double ar = std::abs(R(t, f));
            const double de = std::abs(S(t, f)) - ar;
            const double dp = ar * detail::phase_difference(S(t, f), R(t, f)) / pi;
            m.tfem(t, f) = de / max_ref;
            m.tfpm(t, f) = dp / max_ref;
            m.tem[t] += de;
            m.tpm[t] += dp;
            m.fem[f] += de;
            m.fpm[f] += dp;
            ref_t[t] += ar;
            ref_f[f] += ar;
            de2 += de * de;
            dp2 += dp * dp;
            r2 += ar * ar;
        }
    }
    const double max_t = *std::max_element(ref_t.begin(), ref_t.end());
    const double max_f = *std::max_element(ref_f.begin(), ref_f.end());
    for (std::size_t t = 0; t < nt; ++t) {
        m.tem[t] /= max_t;
        m.tpm[t] /= max_t;
    }
    for (std::size_t f = 0; f < nf; ++f) {
        m.fem[f] /= max_f;
        m.fpm[f] /= max_f;
    }
    m.em = std::sqrt(de2 / r2);
    m.pm = std::sqrt(dp2 / r2);
    return m;
}

inline TfMisfits tf_misfits(const TimeSeries& ref, const TimeSeries& sim, std::span<const double> freqs,
                            const CwtConfig& cfg = {})
{
    detail::require(ref.same_grid(sim), ErrorCode::not_aligned, "tf_misfits needs aligned traces");
    return tf_misfits(cwt(ref, freqs, cfg), cwt(sim, freqs, cfg));
}

struct GofMapping {
    double a = 10.0;
    double k = 1.0;
    double operator()(double misfit) const { return a * std::exp(-k * std::abs(misfit)); }
};

/// Goodness-of-fit counterparts of every misfit, all on the 0-10 scale.
struct TfGof {
    double eg = 10.0;
    double pg = 10.0;
    std::vector<double> times;
    std::vector<double> freqs;
    std::vector<double> teg, tpg;
    std::vector<double> feg, fpg;
    Grid<double> tfeg, tfpg;

    void drop_planes()
    {
        tfeg.clear();
        tfpg.clear();
    }
};

inline TfGof to_gof(const TfMisfits& m, const GofMapping& g = {})
{
    auto map_vec = [&](const std::vector<double>& v) {
        std::vector<double> o(v.size());
        std::transform(v.begin(), v.end(), o.begin(), g);
        return o;
    };
    auto map_grid = [&](const Grid<double>& v) {
        Grid<double> o(v.rows(), v.cols());
        std::transform(v.begin(), v.end(), o.begin(), g);
        return o;
    };
    TfGof out;
    out.eg = g(m.em);
    out.pg = g(m.pm);
    out.times = m.times;
    out.freqs = m.freqs;
    out.teg = map_vec(m.tem);
    out.tpg = map_vec(m.tpm);
    out.feg = map_vec(m.fem);
    out.fpg = map_vec(m.fpm);
    out.tfeg = map_grid(m.tfem);
    out.tfpg = map_grid(m.tfpm);
    return out;
}

struct TfConfig {
    double f_lo = 0.05;
    double f_hi = 10.0;
    std::size_t n_freqs = 40;
    CwtConfig cwt;
    GofMapping mapping;

    std::vector<double> frequencies() const { return log_frequencies(f_lo, f_hi, n_freqs); }
};

inline TfGof tf_gof(const TimeSeries& ref, const TimeSeries& sim, const TfConfig& cfg = {})
{
    const auto freqs = cfg.frequencies();
    return to_gof(tf_misfits(ref, sim, freqs, cfg.cwt), cfg.mapping);
}

} // namespace gmv
