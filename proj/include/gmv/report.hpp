#pragma once

#include "gmv/ensemble.hpp"
#include "gmv/error.hpp"
#include "gmv/gof_anderson.hpp"
#include "gmv/gof_tf.hpp"
#include "gmv/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace gmv::report {

namespace fs = std::filesystem;
using nlohmann::json;
using io::format_double;

inline std::string run_name(const FocalMechanism& fm)
{
    return format_double(fm.strike()) + "_" + format_double(fm.dip()) + "_" + format_double(fm.rake());
}

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// ---------------------------------------------------------------------------
// GOF results

inline json anderson_json(const AndersonScores& s)
{
    json bands = json::array();
    for (const auto& b : s.bands.edges) bands.push_back({b.lo, b.hi});
    json scores = json::object(), aggregates = json::object();
    for (Im im : all_ims) {
        json row = json::array();
        for (std::size_t b = 0; b < s.cells.cols(); ++b) row.push_back(optional_json(s.score(im, b)));
        const std::string key(im_name(im));
        scores[key] = row;
        if (const auto agg = s.aggregate(im))
            aggregates[key] = {{"max", agg->max},
                               {"mean", agg->mean},
                               {"min", agg->min},
                               {"bands", agg->bands},
                               {"quality", std::string(quality_name(quality(agg->mean)))}};
        else
            aggregates[key] = nullptr;
    }
    return {{"bands", bands}, {"scores", scores}, {"aggregates", aggregates}, {"flags", s.flags}};
}

inline json tf_json(const TfGof& g, bool marginals)
{
    json j = {{"EG", g.eg},
              {"PG", g.pg},
              {"EG_quality", std::string(quality_name(quality(g.eg)))},
              {"PG_quality", std::string(quality_name(quality(g.pg)))}};
    if (marginals) {
        j["times"] = g.times;
        j["freqs"] = g.freqs;
        j["TEG"] = g.teg;
        j["TPG"] = g.tpg;
        j["FEG"] = g.feg;
        j["FPG"] = g.fpg;
    }
    return j;
}

inline json run_json(const RunResult& r, std::span<const Component> components, bool marginals = false)
{
    json j;
    j["mechanism"] = io::mechanism_json(r.fm);
    if (!r.ok()) {
        j["status"] = "failed";
        j["error"] = *r.error;
        return j;
    }
    j["status"] = "ok";
    json comps = json::object();
    for (Component c : components) {
        const auto& cr = r.component(c);
        comps[std::string(component_name(c))] = {{"tf", tf_json(cr.tf, marginals)},
                                                 {"anderson", anderson_json(cr.anderson)}};
    }
    j["components"] = comps;
    return j;
}

/// Reads back the summary a `run_json` document carries.
inline RunSummary parse_run_summary(const json& j)
{
    RunSummary s;
    try {
        s.fm = io::parse_mechanism(j.at("mechanism"));
        if (j.value("status", std::string("ok")) != "ok") {
            s.error = j.value("error", std::string("failed"));
            return s;
        }
        const auto& comps = j.at("components");
        for (Component c : all_components) {
            const std::string key(component_name(c));
            if (!comps.contains(key)) continue;
            const auto& cj = comps.at(key);
            auto& row = s.metrics[static_cast<std::size_t>(c)];
            row[0] = cj.at("tf").at("EG").get<double>();
            row[1] = cj.at("tf").at("PG").get<double>();
            const auto& aggs = cj.at("anderson").at("aggregates");
            for (std::size_t i = 0; i < im_count; ++i) {
                const std::string name(im_name(all_ims[i]));
                if (aggs.contains(name) && !aggs.at(name).is_null()) row[2 + i] = aggs.at(name).at("mean").get<double>();
            }
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse, std::string("run summary: ") + e.what());
    }
    return s;
}

inline std::string anderson_csv(std::span<const AndersonScores> all)
{
    std::string out = "component,im,band_lo,band_hi,score\n";
    for (const auto& s : all) {
        for (Im im : all_ims) {
            for (std::size_t b = 0; b < s.bands.edges.size(); ++b) {
                const auto v = s.score(im, b);
                out += std::string(component_name(s.component)) + "," + std::string(im_name(im)) + ","
                       + format_double(s.bands.edges[b].lo) + "," + format_double(s.bands.edges[b].hi) + ","
                       + (v ? format_double(*v) : std::string()) + "\n";
            }
        }
    }
    return out;
}

/// Dense (t, f, value) export of a real time-frequency grid.
inline std::string plane_csv(std::span<const double> times, std::span<const double> freqs, const Grid<double>& g)
{
    std::string out = "t,f,value\n";
    out.reserve(g.rows() * g.cols() * 40);
    for (std::size_t t = 0; t < g.rows(); ++t)
        for (std::size_t f = 0; f < g.cols(); ++f)
            out += format_double(times[t]) + "," + format_double(freqs[f]) + "," + format_double(g(t, f)) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Sweep tables

inline std::string correlation_csv(const CorrelationTable& full, double alpha)
{
    std::string out = "parameter,metric,n,r,p,significant\n";
    for (FaultParameter p : all_parameters) {
        for (std::size_t m = 0; m < metric_count; ++m) {
            const auto& c = full.cell(p, m);
            out += std::string(parameter_name(p)) + "," + std::string(metric_name(m)) + "," + std::to_string(c.n) + ",";
            if (c.value)
                out += format_double(c.value->r) + "," + format_double(c.value->p) + ","
                       + (c.value->p <= alpha ? "1" : "0");
            else
                out += ",,";
            out += "\n";
        }
    }
    return out;
}

inline std::string grouped_csv(std::span<const GroupRow> rows)
{
    std::string out = "parameter,value,component,metric,n,min,mean,max,quality\n";
    for (const auto& r : rows)
        out += std::string(parameter_name(r.parameter)) + "," + format_double(r.value) + ","
               + std::string(component_name(r.component)) + "," + std::string(metric_name(r.metric)) + ","
               + std::to_string(r.scores.size()) + "," + format_double(r.min) + "," + format_double(r.mean) + ","
               + format_double(r.max) + "," + std::string(quality_name(r.quality())) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// SVG

namespace svg {

inline std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    std::string s(buf);
    if (s == "-0.00" || s == "-0.0" || s == "-0") s.erase(0, 1);
    return s;
}

inline std::string hex(int r, int g, int b)
{
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

// Diverging blue-white-red for r in [-1, 1].
inline std::string correlation_color(double r)
{
    r = std::clamp(r, -1.0, 1.0);
    const std::array<int, 3> lo{33, 102, 172}, hi{178, 24, 43};
    const auto& end = r < 0.0 ? lo : hi;
    const double t = std::abs(r);
    auto mix = [&](int c) { return static_cast<int>(std::lround(255.0 + (c - 255.0) * t)); };
    return hex(mix(end[0]), mix(end[1]), mix(end[2]));
}

// Poor is red, fair and good share yellow, excellent is white.
inline std::string quality_color(Quality q)
{
    switch (q) {
    case Quality::poor: return "#d73027";
    case Quality::fair:
    case Quality::good: return "#fee08b";
    case Quality::excellent: return "#ffffff";
    }
    return "#ffffff";
}

inline std::string escape(std::string_view s)
{
    std::string o;
    for (char c : s) {
        switch (c) {
        case '<': o += "&lt;"; break;
        case '>': o += "&gt;"; break;
        case '&': o += "&amp;"; break;
        default: o += c;
        }
    }
    return o;
}

inline std::string text(double x, double y, std::string_view s, std::string_view anchor = "middle",
                        int size = 11, std::string_view fill = "#000000")
{
    return "<text x=\"" + fixed(x, 1) + "\" y=\"" + fixed(y, 1) + "\" font-size=\"" + std::to_string(size)
           + "\" text-anchor=\"" + std::string(anchor) + "\" fill=\"" + std::string(fill) + "\">" + escape(s)
           + "</text>\n";
}

inline std::string rect(double x, double y, double w, double h, std::string_view fill,
                        std::string_view stroke = "#bbbbbb")
{
    return "<rect x=\"" + fixed(x, 1) + "\" y=\"" + fixed(y, 1) + "\" width=\"" + fixed(w, 1) + "\" height=\""
           + fixed(h, 1) + "\" fill=\"" + std::string(fill) + "\" stroke=\"" + std::string(stroke) + "\"/>\n";
}

inline std::string open(double w, double h)
{
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(w, 0) + "\" height=\"" + fixed(h, 0)
           + "\" viewBox=\"0 0 " + fixed(w, 0) + " " + fixed(h, 0) + "\" font-family=\"sans-serif\">\n"
           + rect(0, 0, w, h, "#ffffff", "none");
}

} // namespace svg

/// Parameter x metric heatmap of a significance-masked table. Masked and
/// undefined cells are left blank.
inline std::string heatmap_svg(const CorrelationTable& masked, double alpha)
{
    constexpr double left = 70, top = 64, cw = 52, ch = 36;
    const double width = left + cw * metric_count + 20;
    const double height = top + ch * 3 + 48;
    std::string s = svg::open(width, height);
    std::string comp(component_name(masked.component));
    std::transform(comp.begin(), comp.end(), comp.begin(), [](char c) { return static_cast<char>(std::toupper(c)); });
    s += svg::text(width / 2, 22, "Correlation between fault angles and GOF scores (" + comp + ")", "middle", 14);
    s += svg::text(width / 2, 40,
                   "Pearson r, shown where p <= " + svg::fixed(alpha, 2)
                       + (masked.qualitative() ? "; few sampled values: read as qualitative trends" : ""),
                   "middle", 10, "#444444");
    for (std::size_t m = 0; m < metric_count; ++m)
        s += svg::text(left + cw * (static_cast<double>(m) + 0.5), top - 6, metric_name(m));
    for (FaultParameter p : all_parameters) {
        const double y = top + ch * static_cast<double>(p);
        s += svg::text(left - 8, y + ch / 2 + 4, parameter_name(p), "end");
        for (std::size_t m = 0; m < metric_count; ++m) {
            const double x = left + cw * static_cast<double>(m);
            const auto& cell = masked.cell(p, m);
            if (cell.value) {
                s += svg::rect(x, y, cw, ch, svg::correlation_color(cell.value->r));
                const double r = cell.value->r;
                s += svg::text(x + cw / 2, y + ch / 2 + 4, svg::fixed(r, 2), "middle", 11,
                               std::abs(r) > 0.6 ? "#ffffff" : "#000000");
            } else {
                s += svg::rect(x, y, cw, ch, "none");
            }
        }
    }
    // Colour scale
    const double ly = top + ch * 3 + 16;
    for (int i = 0; i <= 20; ++i) {
        const double r = -1.0 + 0.1 * i;
        s += svg::rect(left + 12.0 * i, ly, 12, 10, svg::correlation_color(r), "none");
    }
    s += svg::text(left, ly + 24, "-1", "middle", 10);
    s += svg::text(left + 126, ly + 24, "0", "middle", 10);
    s += svg::text(left + 252, ly + 24, "+1", "middle", 10);
    s += "</svg>\n";
    return s;
}

/// Mean score per (parameter value, metric), coloured by quality class.
inline std::string grouped_svg(std::span<const GroupRow> rows, Component component)
{
    constexpr double left = 110, top = 56, cw = 52, ch = 26, gap = 22;
    std::array<std::vector<const GroupRow*>, 3> per_param;
    std::array<std::vector<double>, 3> values;
    for (const auto& r : rows) {
        if (r.component != component) continue;
        const auto pi = static_cast<std::size_t>(r.parameter);
        per_param[pi].push_back(&r);
        if (std::find(values[pi].begin(), values[pi].end(), r.value) == values[pi].end()) values[pi].push_back(r.value);
    }
    double height = top + 60;
    for (const auto& v : values) height += ch * static_cast<double>(v.size()) + gap;
    const double width = left + cw * metric_count + 20;

    std::string s = svg::open(width, height);
    std::string comp(component_name(component));
    std::transform(comp.begin(), comp.end(), comp.begin(), [](char c) { return static_cast<char>(std::toupper(c)); });
    s += svg::text(width / 2, 22, "GOF scores grouped by fault parameter (" + comp + ")", "middle", 14);
    for (std::size_t m = 0; m < metric_count; ++m)
        s += svg::text(left + cw * (static_cast<double>(m) + 0.5), top - 6, metric_name(m));

    double y = top;
    for (FaultParameter p : all_parameters) {
        const auto pi = static_cast<std::size_t>(p);
        for (double v : values[pi]) {
            s += svg::text(left - 8, y + ch / 2 + 4, std::string(parameter_name(p)) + " " + format_double(v), "end");
            for (std::size_t m = 0; m < metric_count; ++m) {
                const double x = left + cw * static_cast<double>(m);
                const auto it = std::find_if(per_param[pi].begin(), per_param[pi].end(),
                                             [&](const GroupRow* r) { return r->value == v && r->metric == m; });
                if (it == per_param[pi].end()) {
                    s += svg::rect(x, y, cw, ch, "none");
                    continue;
                }
                s += svg::rect(x, y, cw, ch, svg::quality_color((*it)->quality()));
                s += svg::text(x + cw / 2, y + ch / 2 + 4, svg::fixed((*it)->mean, 1));
            }
            y += ch;
        }
        y += gap;
    }
    // Legend
    const std::array<std::pair<Quality, const char*>, 3> legend{
        {{Quality::poor, "poor"}, {Quality::fair, "fair to good"}, {Quality::excellent, "excellent"}}};
    double lx = left;
    for (const auto& [q, label] : legend) {
        s += svg::rect(lx, y, 14, 14, svg::quality_color(q), "#888888");
        s += svg::text(lx + 20, y + 11, label, "start", 11);
        lx += 120;
    }
    s += "</svg>\n";
    return s;
}

// ---------------------------------------------------------------------------
// Run directory

/// Per-run summaries found under `<run_dir>/runs/*/gof.json`, sorted by
/// (strike, dip, rake).
inline std::vector<RunSummary> load_run_summaries(const fs::path& run_dir)
{
    const fs::path runs = run_dir / "runs";
    if (!fs::is_directory(runs)) throw Error(ErrorCode::io, "no runs/ directory under " + run_dir.string());
    std::vector<RunSummary> out;
    for (const auto& entry : fs::directory_iterator(runs)) {
        const auto gof = entry.path() / "gof.json";
        if (entry.is_directory() && fs::exists(gof)) out.push_back(parse_run_summary(io::read_json(gof)));
    }
    std::sort(out.begin(), out.end(), [](const RunSummary& a, const RunSummary& b) { return a.fm < b.fm; });
    return out;
}

struct ReportSummary {
    std::size_t runs = 0;
    std::size_t failed = 0;
    std::vector<std::string> files;
};

/// Writes correlation tables, grouped scores, SVG figures and a manifest
/// into `run_dir`. Everything except the manifest's `generated_at` field is
/// a pure function of the per-run summaries.
inline ReportSummary write_report(const fs::path& run_dir, std::span<const RunSummary> runs,
                                  std::span<const Component> components, double alpha,
                                  const std::string& generated_at)
{
    ReportSummary rs;
    rs.runs = runs.size();
    json failed = json::array();
    for (const auto& r : runs)
        if (!r.ok()) {
            ++rs.failed;
            failed.push_back({{"run", run_name(r.fm)}, {"error", *r.error}});
        }

    const auto groups = group_report(runs);
    io::write_text(run_dir / "grouped_scores.csv", grouped_csv(groups));
    rs.files.push_back("grouped_scores.csv");

    bool qualitative = false;
    for (Component c : components) {
        const std::string name(component_name(c));
        const auto table = correlate(runs, c);
        qualitative = qualitative || table.qualitative();
        io::write_text(run_dir / ("correlations_" + name + ".csv"), correlation_csv(table, alpha));
        io::write_text(run_dir / ("heatmap_" + name + ".svg"), heatmap_svg(significant(table, alpha), alpha));
        io::write_text(run_dir / ("grouped_" + name + ".svg"), grouped_svg(groups, c));
        rs.files.push_back("correlations_" + name + ".csv");
        rs.files.push_back("heatmap_" + name + ".svg");
        rs.files.push_back("grouped_" + name + ".svg");
    }
    std::sort(rs.files.begin(), rs.files.end());

    json comps = json::array();
    for (Component c : components) comps.push_back(std::string(component_name(c)));
    json manifest = {
        {"generated_at", generated_at},
        {"files", rs.files},
        {"components", comps},
        {"runs", {{"total", rs.runs}, {"ok", rs.runs - rs.failed}, {"failed", failed}}},
        {"correlation",
         {{"method", "pearson"},
          {"samples", "all successful runs, parameter value against metric"},
          {"metrics", "EG, PG and the per-IM mean over bands"},
          {"alpha", alpha},
          {"interpretation", qualitative ? "qualitative trends" : "quantitative"}}},
    };
    io::write_text(run_dir / "manifest.json", manifest.dump(2) + "\n");
    rs.files.push_back("manifest.json");
    return rs;
}

} // namespace gmv::report
