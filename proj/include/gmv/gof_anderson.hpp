#pragma once

#include "gmv/error.hpp"
#include "gmv/grid.hpp"
#include "gmv/imeasures.hpp"
#include "gmv/signal.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gmv {

// The ten intensity measures scored by the IM-based criterion.
enum class Im { pga, pgv, pgd, ia, da, de, iv, sa, fs, cstar };
inline constexpr std::size_t im_count = 10;
inline constexpr std::array<Im, im_count> all_ims{Im::pga, Im::pgv, Im::pgd, Im::ia, Im::da,
                                                  Im::de,  Im::iv,  Im::sa,  Im::fs, Im::cstar};

constexpr std::string_view im_name(Im im)
{
    constexpr std::array<std::string_view, im_count> names{"PGA", "PGV", "PGD", "Ia", "Da",
                                                           "De",  "Iv",  "Sa",  "Fs", "C*"};
    return names[static_cast<std::size_t>(im)];
}

inline Im parse_im(std::string_view s)
{
    for (Im im : all_ims)
        if (im_name(im) == s) return im;
    throw Error(ErrorCode::parse, "unknown intensity measure '" + std::string(s) + "'");
}

struct Band {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double f) const { return f >= lo && f <= hi; }
    bool operator==(const Band&) const = default;
};

struct BandSpec {
    std::vector<Band> edges;

    static BandSpec defaults()
    {
        return {{{0.05, 0.1}, {0.1, 0.25}, {0.25, 0.5}, {0.5, 1.0}, {1.0, 2.0}, {2.0, 5.0}, {5.0, 10.0}}};
    }

    void validate() const
    {
        detail::require(!edges.empty(), ErrorCode::invalid_argument, "band list is empty");
        for (std::size_t i = 0; i < edges.size(); ++i) {
            detail::require(edges[i].lo > 0.0 && edges[i].lo < edges[i].hi, ErrorCode::invalid_argument,
                            "each band needs 0 < f_lo < f_hi");
            if (i > 0)
                detail::require(edges[i - 1].lo < edges[i].lo, ErrorCode::invalid_argument,
                                "bands must be ordered ascending");
        }
    }

    bool operator==(const BandSpec&) const = default;
};

/// 10 * exp(-((p1 - p2) / min(|p1|, |p2|))^2). Identical inputs (including
/// both zero) score 10; a zero denominator otherwise scores 0.
inline double score_scalar(double p1, double p2)
{
    if (p1 == p2) return 10.0;
    const double denom = std::min(std::abs(p1), std::abs(p2));
    if (denom == 0.0) return 0.0;
    const double x = (p1 - p2) / denom;
    return 10.0 * std::exp(-x * x);
}

enum class Quality { poor, fair, good, excellent };

inline Quality quality(double score)
{
    if (score >= 8.0) return Quality::excellent;
    if (score >= 6.0) return Quality::good;
    if (score >= 4.0) return Quality::fair;
    return Quality::poor;
}

constexpr std::string_view quality_name(Quality q)
{
    switch (q) {
    case Quality::poor: return "poor";
    case Quality::fair: return "fair";
    case Quality::good: return "good";
    case Quality::excellent: return "excellent";
    }
    return "?";
}

struct AndersonConfig {
    BandSpec bands = BandSpec::defaults();
    int filter_order = 4;
    double taper_fraction = 0.05;
    double max_lag = 0.5;
    IntensityConfig im;
};

struct ImAggregate {
    double max = 0.0;
    double mean = 0.0;
    double min = 0.0;
    std::size_t bands = 0;
};

/// Per-IM x per-band score matrix for one component. Cells without spectral
/// samples inside the band are left empty and noted in `flags`.
struct AndersonScores {
    Component component = Component::ew;
    BandSpec bands;
    Grid<std::optional<double>> cells; // im_count rows x band columns
    std::vector<std::string> flags;

    std::optional<double> score(Im im, std::size_t band) const { return cells(static_cast<std::size_t>(im), band); }

    std::optional<ImAggregate> aggregate(Im im) const
    {
        ImAggregate agg{-1.0, 0.0, 11.0, 0};
        double sum = 0.0;
        for (std::size_t b = 0; b < cells.cols(); ++b) {
            const auto& s = cells(static_cast<std::size_t>(im), b);
            if (!s) continue;
            agg.max = std::max(agg.max, *s);
            agg.min = std::min(agg.min, *s);
            sum += *s;
            ++agg.bands;
        }
        if (agg.bands == 0) return std::nullopt;
        agg.mean = std::clamp(sum / static_cast<double>(agg.bands), agg.min, agg.max);
        return agg;
    }
};

namespace detail {

inline std::optional<double> mean_pointwise_score(std::span<const double> x, std::span<const double> a,
                                                  std::span<const double> b, const Band& band, bool reciprocal)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = reciprocal ? 1.0 / x[i] : x[i];
        if (!band.contains(f)) continue;
        sum += score_scalar(a[i], b[i]);
        ++n;
    }
    if (n == 0) return std::nullopt;
    return std::min(10.0, sum / static_cast<double>(n));
}

inline std::string shortest(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double cstar_score(const TimeSeries& a, const TimeSeries& b, double max_lag)
{
    const auto variance_free = [](const TimeSeries& t) {
        const auto x = t.samples();
        return std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
    };
    const bool za = variance_free(a), zb = variance_free(b);
    if (za || zb) return za && zb ? 10.0 : 0.0;
    return 10.0 * std::max(0.0, cross_correlation(a, b, max_lag));
}

} // namespace detail

/// Scores one component of a recorded/simulated pair band by band.
inline AndersonScores score_component(const TimeSeries& rec, const TimeSeries& sim, Component component,
                                      const AndersonConfig& cfg)
{
    detail::require(rec.same_grid(sim), ErrorCode::not_aligned, "score_pair needs aligned traces");
    detail::require(rec.unit() == sim.unit(), ErrorCode::unit_mismatch, "score_pair needs equal units");
    detail::require(rec.unit() == Unit::acceleration, ErrorCode::unit_mismatch,
                    "score_pair expects acceleration traces");
    cfg.bands.validate();

    AndersonScores out;
    out.component = component;
    out.bands = cfg.bands;
    out.cells = Grid<std::optional<double>>(im_count, cfg.bands.edges.size());

    const auto prep = [&](const TimeSeries& t) { return taper(detrend(t, DetrendMode::mean), cfg.taper_fraction); };
    const TimeSeries rec0 = prep(rec);
    const TimeSeries sim0 = prep(sim);

    for (std::size_t b = 0; b < cfg.bands.edges.size(); ++b) {
        const Band band = cfg.bands.edges[b];
        const auto fr = bandpass(rec0, band.lo, band.hi, cfg.filter_order, true);
        const auto fsim = bandpass(sim0, band.lo, band.hi, cfg.filter_order, true);

        IntensityConfig imc = cfg.im;
        imc.periods.clear();
        for (double T : cfg.im.periods)
            if (band.contains(1.0 / T)) imc.periods.push_back(T);

        const auto ir = intensity_vector(fr, imc);
        const auto is = intensity_vector(fsim, imc);

        auto set = [&](Im im, std::optional<double> v) { out.cells(static_cast<std::size_t>(im), b) = v; };
        set(Im::pga, score_scalar(ir.pga, is.pga));
        set(Im::pgv, score_scalar(ir.pgv, is.pgv));
        set(Im::pgd, score_scalar(ir.pgd, is.pgd));
        set(Im::ia, score_scalar(ir.ia, is.ia));
        set(Im::da, score_scalar(ir.da, is.da));
        set(Im::de, score_scalar(ir.de, is.de));
        set(Im::iv, score_scalar(ir.iv, is.iv));
        set(Im::sa, detail::mean_pointwise_score(ir.sa.periods, ir.sa.sa, is.sa.sa, band, true));
        set(Im::fs, detail::mean_pointwise_score(ir.fs.freqs, ir.fs.amplitudes, is.fs.amplitudes, band, false));
        set(Im::cstar, detail::cstar_score(fr, fsim, cfg.max_lag));

        for (Im im : {Im::sa, Im::fs})
            if (!out.score(im, b))
                out.flags.push_back(std::string(im_name(im)) + " skipped in band " + detail::shortest(band.lo) + "-"
                                    + detail::shortest(band.hi) + " Hz: no spectral samples");
    }
    return out;
}

inline std::array<AndersonScores, 3> score_pair(const Record3C& rec, const Record3C& sim, const AndersonConfig& cfg)
{
    return {score_component(rec.ew, sim.ew, Component::ew, cfg), score_component(rec.ns, sim.ns, Component::ns, cfg),
            score_component(rec.ud, sim.ud, Component::ud, cfg)};
}

} // namespace gmv
