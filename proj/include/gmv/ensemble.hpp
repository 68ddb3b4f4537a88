#pragma once

#include "gmv/error.hpp"
#include "gmv/gof_anderson.hpp"
#include "gmv/gof_tf.hpp"
#include "gmv/grid.hpp"
#include "gmv/signal.hpp"
#include "gmv/source.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace gmv {

// ---------------------------------------------------------------------------
// Focal-mechanism grid

struct AngleDeltas {
    double strike = 5.0;
    double dip = 5.0;
    double rake = 10.0;
};

struct SweepGrid {
    std::vector<double> strikes;
    std::vector<double> dips;
    std::vector<double> rakes;

    std::size_t size() const { return strikes.size() * dips.size() * rakes.size(); }

    // Cartesian product ordered by (strike, dip, rake).
    std::vector<FocalMechanism> mechanisms() const
    {
        std::vector<FocalMechanism> out;
        out.reserve(size());
        for (double s : strikes)
            for (double d : dips)
                for (double r : rakes) out.emplace_back(s, d, r);
        return out;
    }
};

/// {c - delta, c, c + delta} per angle (a single value when delta is 0).
/// Values leaving the valid angle ranges are rejected rather than wrapped.
inline SweepGrid build_grid(const FocalMechanism& center, const AngleDeltas& deltas = {})
{
    auto values = [](double c, double d, const char* name, auto&& valid) {
        detail::require(d >= 0.0 && std::isfinite(d), ErrorCode::invalid_argument,
                        std::string(name) + " delta must be non-negative");
        std::vector<double> v = d == 0.0 ? std::vector<double>{c} : std::vector<double>{c - d, c, c + d};
        for (double x : v)
            detail::require(valid(x), ErrorCode::invalid_argument,
                            std::string(name) + " value " + std::to_string(x) + " leaves the valid range");
        return v;
    };
    SweepGrid g;
    g.strikes = values(center.strike(), deltas.strike, "strike", [](double x) { return x >= 0.0 && x < 360.0; });
    g.dips = values(center.dip(), deltas.dip, "dip", [](double x) { return x >= 0.0 && x <= 90.0; });
    g.rakes = values(center.rake(), deltas.rake, "rake", [](double x) { return x > -180.0 && x <= 180.0; });
    return g;
}

// ---------------------------------------------------------------------------
// Per-run evaluation

struct GofConfig {
    AndersonConfig anderson;
    TfConfig tf;
};

struct ComponentResult {
    TfGof tf;
    AndersonScores anderson;
};

struct RunResult {
    FocalMechanism fm;
    std::optional<std::string> error;
    std::array<ComponentResult, 3> components;

    bool ok() const { return !error.has_value(); }
    const ComponentResult& component(Component c) const { return components[static_cast<std::size_t>(c)]; }
};

/// Both frameworks on every component of one reference/simulation pair.
inline RunResult evaluate_pair(const FocalMechanism& fm, const Record3C& reference, const Record3C& simulated,
                               const GofConfig& cfg, bool keep_planes = false)
{
    auto [ref, sim] = align(reference, simulated);
    RunResult r;
    r.fm = fm;
    const auto freqs = cfg.tf.frequencies();
    for (Component c : all_components) {
        auto& out = r.components[static_cast<std::size_t>(c)];
        out.tf = to_gof(tf_misfits(ref.component(c), sim.component(c), freqs, cfg.tf.cwt), cfg.tf.mapping);
        if (!keep_planes) out.tf.drop_planes();
        out.anderson = score_component(ref.component(c), sim.component(c), c, cfg.anderson);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Metrics used for grouping and correlation: EG, PG and the ten per-IM
// means over bands.

inline constexpr std::size_t metric_count = 2 + im_count;

inline std::string_view metric_name(std::size_t m)
{
    if (m == 0) return "EG";
    if (m == 1) return "PG";
    return im_name(all_ims[m - 2]);
}

inline std::size_t parse_metric(std::string_view s)
{
    for (std::size_t m = 0; m < metric_count; ++m)
        if (metric_name(m) == s) return m;
    throw Error(ErrorCode::parse, "unknown metric '" + std::string(s) + "'");
}

using MetricRow = std::array<std::optional<double>, metric_count>;

/// What grouping and correlation need from a run.
struct RunSummary {
    FocalMechanism fm;
    std::optional<std::string> error;
    std::array<MetricRow, 3> metrics{};

    bool ok() const { return !error.has_value(); }
    const MetricRow& row(Component c) const { return metrics[static_cast<std::size_t>(c)]; }
};

inline RunSummary summarize(const RunResult& r)
{
    RunSummary s;
    s.fm = r.fm;
    s.error = r.error;
    if (!r.ok()) return s;
    for (Component c : all_components) {
        const auto& cr = r.component(c);
        auto& row = s.metrics[static_cast<std::size_t>(c)];
        row[0] = cr.tf.eg;
        row[1] = cr.tf.pg;
        for (std::size_t i = 0; i < im_count; ++i)
            if (const auto agg = cr.anderson.aggregate(all_ims[i])) row[2 + i] = agg->mean;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Sweep execution

using RunProducer = std::function<Record3C(const FocalMechanism&)>;

/// Evaluates every grid mechanism against `reference`. Runs are independent
/// and written to fixed slots, so the output is identical for any worker
/// count. A failing run is recorded in its slot, not rethrown.
inline std::vector<RunResult> run_sweep(const SweepGrid& grid, const Record3C& reference, const RunProducer& produce,
                                        const GofConfig& cfg, unsigned workers = 1)
{
    const auto mechs = grid.mechanisms();
    std::vector<RunResult> results(mechs.size());
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (std::size_t i = next++; i < mechs.size(); i = next++) {
            try {
                results[i] = evaluate_pair(mechs[i], reference, produce(mechs[i]), cfg);
            } catch (const std::exception& e) {
                results[i] = RunResult{};
                results[i].fm = mechs[i];
                results[i].error = e.what();
            }
        }
    };

    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, mechs.size()))));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    return results;
}

inline std::vector<RunResult> run_sweep(const PointSourceScenario& scenario, const SweepGrid& grid,
                                        const Record3C& reference, const GofConfig& cfg, unsigned workers = 1)
{
    return run_sweep(grid, reference, [&](const FocalMechanism& fm) { return synth_fullspace(scenario, fm); }, cfg,
                     workers);
}

// ---------------------------------------------------------------------------
// Correlation statistics

/// Pearson's r; empty when n < 3 or either input is constant. Spread at the
/// level of rounding noise (relative 1e-12) counts as constant.
inline std::optional<double> pearson(std::span<const double> x, std::span<const double> y)
{
    detail::require(x.size() == y.size(), ErrorCode::invalid_argument, "pearson needs equal-length inputs");
    const std::size_t n = x.size();
    if (n < 3) return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    auto flat = [n](double ss, std::span<const double> v) {
        double scale = 0.0;
        for (double e : v) scale = std::max(scale, std::abs(e));
        return std::sqrt(ss / static_cast<double>(n)) <= 1e-12 * scale;
    };
    if (sxx == 0.0 || syy == 0.0 || flat(sxx, x) || flat(syy, y)) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Two-sided p-value of r under H0: rho = 0, from t = r sqrt((n-2)/(1-r^2)).
inline double p_value(double r, std::size_t n)
{
    detail::require(n >= 3, ErrorCode::invalid_argument, "p_value needs n >= 3");
    detail::require(std::abs(r) <= 1.0, ErrorCode::invalid_argument, "correlation must lie in [-1, 1]");
    if (std::abs(r) == 1.0) return 0.0;
    const double dof = static_cast<double>(n - 2);
    const double t = std::abs(r) * std::sqrt(dof / (1.0 - r * r));
    const boost::math::students_t_distribution<double> dist(dof);
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
}

enum class FaultParameter { strike, dip, rake };
inline constexpr std::array<FaultParameter, 3> all_parameters{FaultParameter::strike, FaultParameter::dip,
                                                              FaultParameter::rake};

constexpr std::string_view parameter_name(FaultParameter p)
{
    switch (p) {
    case FaultParameter::strike: return "strike";
    case FaultParameter::dip: return "dip";
    case FaultParameter::rake: return "rake";
    }
    return "?";
}

inline double parameter_value(const FocalMechanism& fm, FaultParameter p)
{
    switch (p) {
    case FaultParameter::strike: return fm.strike();
    case FaultParameter::dip: return fm.dip();
    case FaultParameter::rake: return fm.rake();
    }
    return 0.0;
}

struct Correlation {
    double r = 0.0;
    double p = 1.0;
};

/// `value` is empty either because the cell is undefined (constant column,
/// too few runs) or, after `significant`, because it was masked.
struct CorrelationCell {
    std::size_t n = 0;
    std::optional<Correlation> value;
    bool masked = false;
};

struct CorrelationTable {
    Component component = Component::ew;
    Grid<CorrelationCell> cells{3, metric_count}; // parameter x metric
    std::size_t max_distinct_values = 0;

    // Three or fewer sampled values per parameter only support trend reading.
    bool qualitative() const { return max_distinct_values <= 3; }

    const CorrelationCell& cell(FaultParameter p, std::size_t metric) const
    {
        return cells(static_cast<std::size_t>(p), metric);
    }
};

/// Correlates each fault angle with each metric over all successful runs.
inline CorrelationTable correlate(std::span<const RunSummary> runs, Component component)
{
    CorrelationTable t;
    t.component = component;
    for (FaultParameter p : all_parameters) {
        std::set<double> distinct;
        for (const auto& run : runs)
            if (run.ok()) distinct.insert(parameter_value(run.fm, p));
        t.max_distinct_values = std::max(t.max_distinct_values, distinct.size());

        for (std::size_t m = 0; m < metric_count; ++m) {
            std::vector<double> x, y;
            for (const auto& run : runs) {
                if (!run.ok()) continue;
                const auto& v = run.row(component)[m];
                if (!v) continue;
                x.push_back(parameter_value(run.fm, p));
                y.push_back(*v);
            }
            auto& cell = t.cells(static_cast<std::size_t>(p), m);
            cell.n = x.size();
            if (const auto r = pearson(x, y)) cell.value = Correlation{*r, p_value(*r, x.size())};
        }
    }
    return t;
}

/// Blanks (does not zero) every cell whose p-value exceeds alpha.
inline CorrelationTable significant(CorrelationTable table, double alpha = 0.05)
{
    for (auto& cell : table.cells) {
        if (cell.value && cell.value->p > alpha) {
            cell.value.reset();
            cell.masked = true;
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// Scores grouped by fault-parameter value

struct GroupRow {
    FaultParameter parameter = FaultParameter::strike;
    double value = 0.0;
    Component component = Component::ew;
    std::size_t metric = 0;
    std::vector<double> scores; // in run order
    double min = 0.0;
    double mean = 0.0;
    double max = 0.0;

    Quality quality() const { return gmv::quality(mean); }
};

/// For every (parameter, value, component, metric), the distribution of the
/// metric across all successful runs sharing that parameter value.
inline std::vector<GroupRow> group_report(std::span<const RunSummary> runs)
{
    std::vector<GroupRow> rows;
    for (FaultParameter p : all_parameters) {
        std::set<double> values;
        for (const auto& run : runs)
            if (run.ok()) values.insert(parameter_value(run.fm, p));
        for (double v : values) {
            for (Component c : all_components) {
                for (std::size_t m = 0; m < metric_count; ++m) {
                    GroupRow row;
                    row.parameter = p;
                    row.value = v;
                    row.component = c;
                    row.metric = m;
                    for (const auto& run : runs) {
                        if (!run.ok() || parameter_value(run.fm, p) != v) continue;
                        if (const auto& s = run.row(c)[m]) row.scores.push_back(*s);
                    }
                    if (row.scores.empty()) continue;
                    row.min = *std::min_element(row.scores.begin(), row.scores.end());
                    row.max = *std::max_element(row.scores.begin(), row.scores.end());
                    double sum = 0.0;
                    for (double s : row.scores) sum += s;
                    row.mean = std::clamp(sum / static_cast<double>(row.scores.size()), row.min, row.max);
                    rows.push_back(std::move(row));
                }
            }
        }
    }
    return rows;
}

} // namespace gmv
