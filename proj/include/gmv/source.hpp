#pragma once

#include "gmv/error.hpp"
#include "gmv/signal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace gmv {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

namespace detail {

// Degree-argument trig returning exact values on multiples of 90 degrees.
inline double sind(double deg)
{
    double r = std::fmod(deg, 360.0);
    if (r < 0.0) r += 360.0;
    if (r == 0.0 || r == 180.0) return 0.0;
    if (r == 90.0) return 1.0;
    if (r == 270.0) return -1.0;
    return std::sin(r * std::numbers::pi / 180.0);
}

inline double cosd(double deg) { return sind(deg + 90.0); }

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

} // namespace detail

/// Strike in [0, 360), dip in [0, 90], rake in (-180, 180], degrees.
/// Strike and rake are wrapped into range on construction; dip is checked.
class FocalMechanism {
public:
    FocalMechanism() = default;
    FocalMechanism(double strike, double dip, double rake)
    {
        detail::require(std::isfinite(strike) && std::isfinite(dip) && std::isfinite(rake),
                        ErrorCode::invalid_argument, "focal mechanism angles must be finite");
        detail::require(dip >= 0.0 && dip <= 90.0, ErrorCode::invalid_argument, "dip must lie in [0, 90] degrees");
        strike_ = std::fmod(strike, 360.0);
        if (strike_ < 0.0) strike_ += 360.0;
        rake_ = std::fmod(rake, 360.0);
        if (rake_ > 180.0) rake_ -= 360.0;
        if (rake_ <= -180.0) rake_ += 360.0;
        dip_ = dip;
    }

    double strike() const { return strike_; }
    double dip() const { return dip_; }
    double rake() const { return rake_; }

    auto operator<=>(const FocalMechanism&) const = default;

private:
    double strike_ = 0.0;
    double dip_ = 90.0;
    double rake_ = 0.0;
};

/// Symmetric moment tensor in N*m, x = north, y = east, z = down.
struct MomentTensor {
    double mxx = 0.0, myy = 0.0, mzz = 0.0;
    double mxy = 0.0, mxz = 0.0, myz = 0.0;

    double trace() const { return mxx + myy + mzz; }

    Mat3 matrix() const { return {{{mxx, mxy, mxz}, {mxy, myy, myz}, {mxz, myz, mzz}}}; }
};

// Double-couple components (Aki & Richards, Box 4.4).
inline MomentTensor moment_tensor(const FocalMechanism& fm, double m0)
{
    using detail::cosd;
    using detail::sind;
    detail::require(m0 > 0.0, ErrorCode::invalid_argument, "seismic moment must be positive");
    const double phi = fm.strike(), delta = fm.dip(), lambda = fm.rake();
    const double sd = sind(delta), cd = cosd(delta), s2d = sind(2.0 * delta), c2d = cosd(2.0 * delta);
    const double sl = sind(lambda), cl = cosd(lambda);
    const double sp = sind(phi), cp = cosd(phi), s2p = sind(2.0 * phi), c2p = cosd(2.0 * phi);

    MomentTensor m;
    m.mxx = -m0 * (sd * cl * s2p + s2d * sl * sp * sp);
    m.mxy = m0 * (sd * cl * c2p + 0.5 * s2d * sl * s2p);
    m.mxz = -m0 * (cd * cl * cp + c2d * sl * sp);
    m.myy = m0 * (sd * cl * s2p - s2d * sl * cp * cp);
    m.myz = -m0 * (cd * cl * sp - c2d * sl * cp);
    m.mzz = m0 * s2d * sl;
    return m;
}

struct RadiationPattern {
    double p = 0.0;
    double s = 0.0;
};

/// Far-field P and S amplitude factors of the unit-moment tensor along a
/// unit direction: A_P = g.M.g, A_S = |M.g - A_P g|.
inline RadiationPattern radiation_pattern(const FocalMechanism& fm, const Vec3& direction)
{
    const double len = detail::norm(direction);
    detail::require(len > 0.0, ErrorCode::invalid_argument, "direction must be non-zero");
    const Vec3 g{direction[0] / len, direction[1] / len, direction[2] / len};
    const Mat3 m = moment_tensor(fm, 1.0).matrix();
    Vec3 mg{};
    for (int i = 0; i < 3; ++i) mg[i] = detail::dot(m[i], g);
    RadiationPattern rp;
    rp.p = detail::dot(g, mg);
    const Vec3 t{mg[0] - rp.p * g[0], mg[1] - rp.p * g[1], mg[2] - rp.p * g[2]};
    rp.s = detail::norm(t);
    return rp;
}

enum class StfShape { liu, boxcar };

constexpr std::string_view stf_shape_name(StfShape s) { return s == StfShape::liu ? "liu" : "boxcar"; }

inline StfShape parse_stf_shape(std::string_view s)
{
    if (s == "liu") return StfShape::liu;
    if (s == "boxcar") return StfShape::boxcar;
    throw Error(ErrorCode::parse, "unknown source time function '" + std::string(s) + "'");
}

/// Normalized moment-rate samples on [0, rise_time].
struct SourceTimeFunction {
    double rise_time = 1.0;
    double dt = 0.0;
    std::vector<double> samples;

    double time(std::size_t i) const { return static_cast<double>(i) * dt; }
};

namespace detail {

inline SourceTimeFunction normalized_stf(double rise_time, double dt, auto&& shape)
{
    require(rise_time > 0.0, ErrorCode::invalid_argument, "rise time must be positive");
    require(dt > 0.0 && dt <= rise_time / 20.0, ErrorCode::invalid_argument,
            "source time function dt must not exceed rise_time / 20");
    SourceTimeFunction stf;
    stf.rise_time = rise_time;
    stf.dt = dt;
    const auto n = static_cast<std::size_t>(std::floor(rise_time / dt + 1e-9)) + 1;
    stf.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) stf.samples[i] = std::max(0.0, shape(static_cast<double>(i) * dt));
    double area = 0.0;
    for (std::size_t i = 1; i < n; ++i) area += 0.5 * dt * (stf.samples[i - 1] + stf.samples[i]);
    for (double& v : stf.samples) v /= area;
    return stf;
}

} // namespace detail

/// Piecewise-cosine slip-rate shape of Liu, Archuleta & Hartzell (2006):
/// tau1 = 0.13 tau, tau2 = tau - tau1, rising on [0, tau1], then a cosine
/// decay to zero at tau. Samples are rescaled to unit trapezoidal area.
inline SourceTimeFunction liu_stf(double rise_time = 1.0, double dt = 1e-3)
{
    using std::numbers::pi;
    const double t1 = 0.13 * rise_time;
    const double t2 = rise_time - t1;
    const double cn = pi / (1.4 * pi * t1 + 1.2 * t1 + 0.3 * pi * t2);
    return detail::normalized_stf(rise_time, dt, [=](double t) {
        if (t < t1) return cn * (0.7 - 0.7 * std::cos(pi * t / t1) + 0.6 * std::sin(0.5 * pi * t / t1));
        if (t < 2.0 * t1) return cn * (1.0 - 0.7 * std::cos(pi * t / t1) + 0.3 * std::cos(pi * (t - t1) / t2));
        if (t <= rise_time) return cn * (0.3 + 0.3 * std::cos(pi * (t - t1) / t2));
        return 0.0;
    });
}

inline SourceTimeFunction boxcar_stf(double rise_time = 1.0, double dt = 1e-3)
{
    return detail::normalized_stf(rise_time, dt, [=](double) { return 1.0 / rise_time; });
}

inline SourceTimeFunction make_stf(StfShape shape, double rise_time, double dt)
{
    return shape == StfShape::liu ? liu_stf(rise_time, dt) : boxcar_stf(rise_time, dt);
}

struct Medium {
    double rho = 2500.0;
    double vp = 3366.0;
    double vs = 2047.0;
};

/// Point source and surface receiver in a homogeneous full space.
struct PointSourceScenario {
    Vec3 hypocenter{0.0, 0.0, 1000.0}; // x north, y east, depth (m)
    std::array<double, 2> receiver{14966.629547095765, 0.0};
    Medium medium;
    double m0 = 2.81e16;
    FocalMechanism mechanism{45.0, 55.0, 90.0};
    double rise_time = 1.0;
    StfShape stf_shape = StfShape::liu;
    double duration = 12.0;
    double dt = 0.005;
    std::string station_id = "SYN";

    Vec3 offset() const
    {
        return {receiver[0] - hypocenter[0], receiver[1] - hypocenter[1], -hypocenter[2]};
    }
    double hypocentral_distance() const { return detail::norm(offset()); }
    double epicentral_distance() const { return std::hypot(receiver[0] - hypocenter[0], receiver[1] - hypocenter[1]); }

    void validate() const
    {
        detail::require(hypocenter[2] > 0.0, ErrorCode::invalid_argument, "hypocenter depth must be positive");
        detail::require(medium.rho > 0.0, ErrorCode::invalid_argument, "density must be positive");
        detail::require(medium.vp > medium.vs && medium.vs > 0.0, ErrorCode::invalid_argument,
                        "medium needs vp > vs > 0");
        detail::require(m0 > 0.0, ErrorCode::invalid_argument, "seismic moment must be positive");
        detail::require(dt > 0.0 && rise_time > 0.0, ErrorCode::invalid_argument, "dt and rise time must be positive");
        detail::require(duration >= hypocentral_distance() / medium.vs + 2.0 * rise_time, ErrorCode::invalid_argument,
                        "duration must cover the S arrival plus twice the rise time");
    }
};

/// Which displacement terms of the full-space solution to include.
namespace terms {
inline constexpr unsigned near_field = 1u << 0;
inline constexpr unsigned intermediate_p = 1u << 1;
inline constexpr unsigned intermediate_s = 1u << 2;
inline constexpr unsigned far_p = 1u << 3;
inline constexpr unsigned far_s = 1u << 4;
inline constexpr unsigned all = 0x1fu;
} // namespace terms

namespace detail {

// Moment function m(t) (0 -> 1), moment rate and the running integrals
// I0 = int m, I1 = int s m ds, sampled on the STF grid and extended in
// closed form past the rise time.
class MomentHistory {
public:
    explicit MomentHistory(const SourceTimeFunction& stf) : dt_(stf.dt), rate_(stf.samples)
    {
        const std::size_t n = rate_.size();
        m_.assign(n, 0.0);
        i0_.assign(n, 0.0);
        i1_.assign(n, 0.0);
        for (std::size_t i = 1; i < n; ++i) {
            const double t0 = static_cast<double>(i - 1) * dt_, t1 = static_cast<double>(i) * dt_;
            m_[i] = m_[i - 1] + 0.5 * dt_ * (rate_[i - 1] + rate_[i]);
            i0_[i] = i0_[i - 1] + 0.5 * dt_ * (m_[i - 1] + m_[i]);
            i1_[i] = i1_[i - 1] + 0.5 * dt_ * (t0 * m_[i - 1] + t1 * m_[i]);
        }
        t_end_ = static_cast<double>(n - 1) * dt_;
        m_end_ = m_.back();
    }

    double rate(double t) const { return t >= t_end_ ? 0.0 : interp(rate_, t); }
    double moment(double t) const { return t >= t_end_ ? m_end_ : interp(m_, t); }
    double int0(double t) const { return t >= t_end_ ? i0_.back() + m_end_ * (t - t_end_) : interp(i0_, t); }
    double int1(double t) const
    {
        return t >= t_end_ ? i1_.back() + 0.5 * m_end_ * (t * t - t_end_ * t_end_) : interp(i1_, t);
    }

private:
    double interp(const std::vector<double>& v, double t) const
    {
        if (t <= 0.0) return 0.0;
        const double pos = t / dt_;
        const auto i = static_cast<std::size_t>(pos);
        if (i + 1 >= v.size()) return v.back();
        const double f = pos - static_cast<double>(i);
        return v[i] + f * (v[i + 1] - v[i]);
    }

    double dt_;
    std::vector<double> rate_;
    std::vector<double> m_, i0_, i1_;
    double t_end_ = 0.0;
    double m_end_ = 0.0;
};

} // namespace detail

/// Displacement (unit acceleration not yet applied) of the complete
/// full-space moment-tensor solution, Aki & Richards eq. 4.29, sampled on
/// [0, duration] with step dt. Returns components along x, y, z.
inline std::array<std::vector<double>, 3> fullspace_displacement(const PointSourceScenario& sc,
                                                                 const FocalMechanism& fm,
                                                                 const SourceTimeFunction& stf, double dt,
                                                                 unsigned which = terms::all)
{
    using std::numbers::pi;
    const Vec3 d = sc.offset();
    const double r = detail::norm(d);
    detail::require(r > 1e-6, ErrorCode::invalid_argument, "receiver coincides with the hypocenter");
    const Vec3 g{d[0] / r, d[1] / r, d[2] / r};
    const Mat3 M = moment_tensor(fm, 1.0).matrix();
    const double a = sc.medium.vp, b = sc.medium.vs;

    // Radiation coefficients per component n, summed over p, q.
    std::array<double, 3> cn{}, cip{}, cis{}, cfp{}, cfs{};
    for (int n = 0; n < 3; ++n) {
        for (int p = 0; p < 3; ++p) {
            for (int q = 0; q < 3; ++q) {
                const double dpq = p == q ? 1.0 : 0.0, dnq = n == q ? 1.0 : 0.0, dnp = n == p ? 1.0 : 0.0;
                const double ggg = g[n] * g[p] * g[q];
                const double mpq = M[p][q];
                cn[n] += (15.0 * ggg - 3.0 * g[n] * dpq - 3.0 * g[p] * dnq - 3.0 * g[q] * dnp) * mpq;
                cip[n] += (6.0 * ggg - g[n] * dpq - g[p] * dnq - g[q] * dnp) * mpq;
                cis[n] += (6.0 * ggg - g[n] * dpq - g[p] * dnq - 2.0 * g[q] * dnp) * mpq;
                cfp[n] += ggg * mpq;
                cfs[n] += (g[n] * g[p] - dnp) * g[q] * mpq;
            }
        }
    }

    const detail::MomentHistory h(stf);
    const double ta = r / a, tb = r / b;
    const double scale = sc.m0 / (4.0 * pi * sc.medium.rho);
    const auto count = static_cast<std::size_t>(std::floor(sc.duration / dt + 1e-9)) + 1;
    std::array<std::vector<double>, 3> u;
    for (auto& c : u) c.assign(count, 0.0);

    for (std::size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) * dt;
        if (t <= ta) continue;
        // int_{r/a}^{r/b} tau m(t - tau) dtau, via s = t - tau
        const double lo = t - tb, hi = t - ta;
        const double near = t * (h.int0(hi) - h.int0(lo)) - (h.int1(hi) - h.int1(lo));
        const double mp = h.moment(t - ta), ms = h.moment(t - tb);
        const double rp = h.rate(t - ta), rs = h.rate(t - tb);
        for (int n = 0; n < 3; ++n) {
            double v = 0.0;
            if (which & terms::near_field) v += cn[n] / (r * r * r * r) * near;
            if (which & terms::intermediate_p) v += cip[n] / (a * a * r * r) * mp;
            if (which & terms::intermediate_s) v -= cis[n] / (b * b * r * r) * ms;
            if (which & terms::far_p) v += cfp[n] / (a * a * a * r) * rp;
            if (which & terms::far_s) v -= cfs[n] / (b * b * b * r) * rs;
            u[n][i] = scale * v;
        }
    }
    return u;
}

/// Three-component acceleration at the receiver: the displacement field is
/// sampled at dt/2, differentiated twice with central differences and
/// decimated back to dt. EW = y, NS = x, UD = -z.
inline Record3C synth_fullspace(const PointSourceScenario& sc, const FocalMechanism& fm,
                                const SourceTimeFunction& stf, unsigned which = terms::all)
{
    sc.validate();
    const double fine = 0.5 * sc.dt;
    auto u = fullspace_displacement(sc, fm, stf, fine, which);

    auto to_acc = [&](std::vector<double>& disp, double sign, std::string label) {
        if (sign < 0.0)
            for (double& v : disp) v = -v;
        const TimeSeries ds(fine, 0.0, std::move(disp), Unit::displacement);
        const auto acc = differentiate(differentiate(ds));
        std::vector<double> coarse;
        coarse.reserve(acc.size() / 2 + 1);
        for (std::size_t i = 0; i < acc.size(); i += 2) coarse.push_back(acc[i]);
        return TimeSeries(sc.dt, 0.0, std::move(coarse), Unit::acceleration, std::move(label));
    };
    auto ew = to_acc(u[1], 1.0, "ew");
    auto ns = to_acc(u[0], 1.0, "ns");
    auto ud = to_acc(u[2], -1.0, "ud");
    return Record3C(std::move(ew), std::move(ns), std::move(ud), sc.station_id, sc.epicentral_distance());
}

inline Record3C synth_fullspace(const PointSourceScenario& sc, const FocalMechanism& fm)
{
    const double stf_dt = std::min(0.25 * sc.dt, sc.rise_time / 200.0);
    return synth_fullspace(sc, fm, make_stf(sc.stf_shape, sc.rise_time, stf_dt));
}

inline Record3C synth_fullspace(const PointSourceScenario& sc) { return synth_fullspace(sc, sc.mechanism); }

} // namespace gmv
