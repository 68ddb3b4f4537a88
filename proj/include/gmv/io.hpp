#pragma once

#include "gmv/earthmodel.hpp"
#include "gmv/error.hpp"
#include "gmv/signal.hpp"
#include "gmv/source.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace gmv::io {

namespace fs = std::filesystem;
using nlohmann::json;

// Shortest representation that round-trips exactly.
inline std::string format_double(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw Error(ErrorCode::parse, "not a number: '" + std::string(s) + "'");
    return v;
}

inline std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const fs::path& path, std::string_view text)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

inline json read_json(const fs::path& path)
{
    try {
        return json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse, path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Trace files: `t,ew,ns,ud` CSV plus a `<basename>.meta.json` sidecar.

inline fs::path meta_path(const fs::path& csv)
{
    fs::path p = csv;
    p.replace_extension(".meta.json");
    return p;
}

inline constexpr double trace_jitter_tolerance = 1e-9;

inline Record3C parse_trace_csv(std::string_view text, const json& meta = json::object())
{
    std::vector<double> t, ew, ns, ud;
    std::size_t line_no = 0;
    bool header = false;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!header) {
            if (line != "t,ew,ns,ud")
                throw Error(ErrorCode::parse, "trace CSV header must be 't,ew,ns,ud'");
            header = true;
            continue;
        }
        if (line.empty()) continue;
        std::array<double, 4> v{};
        std::size_t col = 0;
        while (true) {
            const auto comma = line.find(',');
            if (col >= 4) throw Error(ErrorCode::parse, "line " + std::to_string(line_no) + ": too many columns");
            try {
                v[col++] = parse_double(line.substr(0, comma));
            } catch (const Error& e) {
                throw Error(ErrorCode::parse, "line " + std::to_string(line_no) + ": " + e.what());
            }
            if (comma == std::string_view::npos) break;
            line = line.substr(comma + 1);
        }
        if (col != 4) throw Error(ErrorCode::parse, "line " + std::to_string(line_no) + ": expected 4 columns");
        t.push_back(v[0]);
        ew.push_back(v[1]);
        ns.push_back(v[2]);
        ud.push_back(v[3]);
    }
    if (!header) throw Error(ErrorCode::parse, "trace CSV is empty");
    if (t.size() < 2) throw Error(ErrorCode::parse, "trace CSV needs at least two rows");

    const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    if (!(dt > 0.0)) throw Error(ErrorCode::parse, "trace times must increase");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (std::abs((t[i] - t[i - 1]) - dt) > trace_jitter_tolerance)
            throw Error(ErrorCode::parse, "non-uniform sampling at row " + std::to_string(i + 1));

    Unit unit = Unit::acceleration;
    std::string station;
    std::optional<double> distance;
    if (meta.contains("units")) unit = parse_unit(meta.at("units").get<std::string>());
    if (meta.contains("station_id")) station = meta.at("station_id").get<std::string>();
    if (meta.contains("epicentral_distance") && !meta.at("epicentral_distance").is_null())
        distance = meta.at("epicentral_distance").get<double>();

    return Record3C(TimeSeries(dt, t.front(), std::move(ew), unit, "ew"),
                    TimeSeries(dt, t.front(), std::move(ns), unit, "ns"),
                    TimeSeries(dt, t.front(), std::move(ud), unit, "ud"), station, distance);
}

inline Record3C read_trace(const fs::path& csv)
{
    json meta = json::object();
    if (const auto mp = meta_path(csv); fs::exists(mp)) meta = read_json(mp);
    try {
        return parse_trace_csv(read_text(csv), meta);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse, meta_path(csv).string() + ": " + e.what());
    }
}

inline std::string format_trace_csv(const Record3C& rec)
{
    std::string out = "t,ew,ns,ud\n";
    out.reserve(rec.size() * 64);
    for (std::size_t i = 0; i < rec.size(); ++i) {
        out += format_double(rec.ew.time(i));
        out += ',';
        out += format_double(rec.ew[i]);
        out += ',';
        out += format_double(rec.ns[i]);
        out += ',';
        out += format_double(rec.ud[i]);
        out += '\n';
    }
    return out;
}

inline json trace_meta(const Record3C& rec)
{
    json m;
    m["station_id"] = rec.station_id;
    m["units"] = std::string(unit_symbol(rec.unit()));
    m["epicentral_distance"] = rec.epicentral_distance ? json(*rec.epicentral_distance) : json(nullptr);
    return m;
}

inline void write_trace(const fs::path& csv, const Record3C& rec)
{
    write_text(csv, format_trace_csv(rec));
    write_text(meta_path(csv), trace_meta(rec).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Layer model JSON: array of {depth_top, rho, vp, vs, qp, qs}.

inline CrustalModel parse_layer_model(const json& j)
{
    if (!j.is_array()) throw Error(ErrorCode::parse, "layer model must be a JSON array");
    std::vector<CrustalLayer> layers;
    try {
        for (const auto& l : j)
            layers.push_back({l.at("depth_top").get<double>(), l.at("rho").get<double>(), l.at("vp").get<double>(),
                              l.at("vs").get<double>(), l.at("qp").get<double>(), l.at("qs").get<double>()});
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse, std::string("layer model: ") + e.what());
    }
    return CrustalModel(std::move(layers));
}

inline json layer_model_json(const CrustalModel& m)
{
    json a = json::array();
    for (const auto& l : m.layers())
        a.push_back({{"depth_top", l.depth_top}, {"rho", l.rho}, {"vp", l.vp}, {"vs", l.vs}, {"qp", l.qp}, {"qs", l.qs}});
    return a;
}

// ---------------------------------------------------------------------------
// Scenario JSON. Every key is optional and falls back to the defaults of
// PointSourceScenario; a missing medium is taken from the top layer of
// `model`.

inline json mechanism_json(const FocalMechanism& fm)
{
    return {{"strike", fm.strike()}, {"dip", fm.dip()}, {"rake", fm.rake()}};
}

inline FocalMechanism parse_mechanism(const json& j)
{
    return FocalMechanism(j.at("strike").get<double>(), j.at("dip").get<double>(), j.at("rake").get<double>());
}

inline PointSourceScenario parse_scenario(const json& j, const CrustalModel& model = CrustalModel::defaults())
{
    PointSourceScenario sc;
    sc.medium = model.medium_at(0.0);
    try {
        if (j.contains("hypocenter")) {
            const auto& h = j.at("hypocenter");
            sc.hypocenter = {h.at("x").get<double>(), h.at("y").get<double>(), h.at("depth").get<double>()};
        }
        if (j.contains("receiver")) {
            const auto& r = j.at("receiver");
            sc.receiver = {r.at("x").get<double>(), r.at("y").get<double>()};
        }
        if (j.contains("medium")) {
            const auto& m = j.at("medium");
            sc.medium = {m.at("rho").get<double>(), m.at("vp").get<double>(), m.at("vs").get<double>()};
        }
        if (j.contains("m0")) sc.m0 = j.at("m0").get<double>();
        if (j.contains("mechanism")) sc.mechanism = parse_mechanism(j.at("mechanism"));
        if (j.contains("rise_time")) sc.rise_time = j.at("rise_time").get<double>();
        if (j.contains("stf")) sc.stf_shape = parse_stf_shape(j.at("stf").get<std::string>());
        if (j.contains("dt")) sc.dt = j.at("dt").get<double>();
        if (j.contains("duration")) sc.duration = j.at("duration").get<double>();
        if (j.contains("station_id")) sc.station_id = j.at("station_id").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse, std::string("scenario: ") + e.what());
    }
    sc.validate();
    return sc;
}

inline json scenario_json(const PointSourceScenario& sc)
{
    return {
        {"hypocenter", {{"x", sc.hypocenter[0]}, {"y", sc.hypocenter[1]}, {"depth", sc.hypocenter[2]}}},
        {"receiver", {{"x", sc.receiver[0]}, {"y", sc.receiver[1]}}},
        {"medium", {{"rho", sc.medium.rho}, {"vp", sc.medium.vp}, {"vs", sc.medium.vs}}},
        {"m0", sc.m0},
        {"mechanism", mechanism_json(sc.mechanism)},
        {"rise_time", sc.rise_time},
        {"stf", std::string(stf_shape_name(sc.stf_shape))},
        {"dt", sc.dt},
        {"duration", sc.duration},
        {"station_id", sc.station_id},
    };
}

} // namespace gmv::io
