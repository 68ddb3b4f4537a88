#pragma once

#include "gmv/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace gmv {

// Second-order section, a0 normalized to 1.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;

    std::complex<double> response(double omega) const
    {
        const std::complex<double> z1 = std::polar(1.0, -omega);
        const std::complex<double> z2 = z1 * z1;
        return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
    }
};

// Digital Butterworth band-pass of the given prototype order, returned as
// `order` biquads, each normalized to unit gain at the (pre-warped) geometric
// center frequency. Poles come from the analog low-pass prototype, the
// low-pass to band-pass transform and the bilinear map; zeros sit at z = +-1.
inline std::vector<Biquad> butterworth_bandpass(int order, double f_lo, double f_hi, double fs)
{
    using std::numbers::pi;
    detail::require(order >= 1, ErrorCode::invalid_argument, "filter order must be >= 1");
    detail::require(fs > 0.0, ErrorCode::invalid_argument, "sampling rate must be positive");
    detail::require(f_lo > 0.0 && f_lo < f_hi && f_hi < fs / 2.0, ErrorCode::invalid_argument,
                    "band edges must satisfy 0 < f_lo < f_hi < Nyquist");

    const double w1 = 2.0 * fs * std::tan(pi * f_lo / fs);
    const double w2 = 2.0 * fs * std::tan(pi * f_hi / fs);
    const double bw = w2 - w1;
    const double w0 = std::sqrt(w1 * w2);

    std::vector<std::complex<double>> upper;
    std::vector<double> real;
    for (int k = 0; k < order; ++k) {
        const std::complex<double> p = std::polar(1.0, pi * (2.0 * k + order + 1.0) / (2.0 * order));
        const std::complex<double> h = p * (bw / 2.0);
        const std::complex<double> d = std::sqrt(h * h - w0 * w0);
        for (const auto s : {h + d, h - d}) {
            const std::complex<double> z = (2.0 * fs + s) / (2.0 * fs - s);
            const double tol = 1e-10 * std::max(1.0, std::abs(z));
            if (std::abs(z.imag()) <= tol)
                real.push_back(z.real());
            else if (z.imag() > 0.0)
                upper.push_back(z);
        }
    }
    std::sort(real.begin(), real.end());

    std::vector<Biquad> sections;
    sections.reserve(static_cast<std::size_t>(order));
    for (const auto& z : upper)
        sections.push_back({1.0, 0.0, -1.0, -2.0 * z.real(), std::norm(z)});
    for (std::size_t i = 0; i + 1 < real.size(); i += 2)
        sections.push_back({1.0, 0.0, -1.0, -(real[i] + real[i + 1]), real[i] * real[i + 1]});

    const double omega0 = 2.0 * std::atan(w0 / (2.0 * fs));
    for (auto& s : sections) {
        const double g = std::abs(s.response(omega0));
        s.b0 /= g;
        s.b1 /= g;
        s.b2 /= g;
    }
    return sections;
}

// Direct form II transposed, zero initial state, in place.
inline void apply_sections(std::span<const Biquad> sections, std::span<double> x)
{
    for (const auto& s : sections) {
        double z1 = 0.0, z2 = 0.0;
        for (double& v : x) {
            const double in = v;
            const double out = s.b0 * in + z1;
            z1 = s.b1 * in - s.a1 * out + z2;
            z2 = s.b2 * in - s.a2 * out;
            v = out;
        }
    }
}

// Forward-backward application: squared magnitude, zero phase.
inline void apply_sections_zero_phase(std::span<const Biquad> sections, std::span<double> x)
{
    apply_sections(sections, x);
    std::reverse(x.begin(), x.end());
    apply_sections(sections, x);
    std::reverse(x.begin(), x.end());
}

} // namespace gmv
