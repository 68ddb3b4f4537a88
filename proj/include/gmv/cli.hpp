#pragma once

#include "gmv/earthmodel.hpp"
#include "gmv/ensemble.hpp"
#include "gmv/error.hpp"
#include "gmv/io.hpp"
#include "gmv/report.hpp"
#include "gmv/source.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gmv::cli {

namespace fs = std::filesystem;
using nlohmann::json;

struct Config {
    CrustalModel model = CrustalModel::defaults();
    PointSourceScenario scenario;
    std::optional<FocalMechanism> grid_center; // scenario mechanism when empty
    AngleDeltas deltas;
    std::optional<fs::path> reference;         // synthetic of the grid center when empty
    GofConfig gof;
    double alpha = 0.05;
    unsigned workers = 1;
    fs::path out = "out";

    FocalMechanism center() const { return grid_center.value_or(scenario.mechanism); }
};

namespace detail {

inline void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where)
{
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw Error(ErrorCode::parse, "unknown key '" + key + "' in " + where);
    }
}

inline fs::path resolve(const fs::path& base, const std::string& p)
{
    fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

inline fs::path existing(const fs::path& p, const std::string& what)
{
    if (!fs::exists(p)) throw Error(ErrorCode::io, what + " not found: " + p.string());
    return p;
}

inline void range(bool ok, const std::string& msg)
{
    if (!ok) throw Error(ErrorCode::invalid_argument, msg);
}

} // namespace detail

/// Builds a Config from its JSON form. Relative paths resolve against
/// `base_dir` (the config file's directory).
inline Config parse_config(const json& j, const fs::path& base_dir = ".")
{
    using detail::range;
    if (!j.is_object()) throw Error(ErrorCode::parse, "config must be a JSON object");
    detail::check_keys(j,
                       {"scenario", "layer_model", "grid", "reference", "bands", "damping", "duration_thresholds",
                        "periods", "response", "fs_smoothing_octaves", "filter_order", "taper_fraction", "max_lag",
                        "detrend_integrals", "gof", "tf", "alpha", "workers", "out"},
                       "config");
    Config c;
    try {
        if (j.contains("layer_model"))
            c.model = io::parse_layer_model(io::read_json(
                detail::existing(detail::resolve(base_dir, j.at("layer_model").get<std::string>()), "layer model")));

        json sc = json::object();
        if (j.contains("scenario")) {
            const auto& s = j.at("scenario");
            sc = s.is_string()
                     ? io::read_json(detail::existing(detail::resolve(base_dir, s.get<std::string>()), "scenario"))
                     : s;
        }
        c.scenario = io::parse_scenario(sc, c.model);

        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            detail::check_keys(g, {"center", "deltas"}, "grid");
            if (g.contains("center")) c.grid_center = io::parse_mechanism(g.at("center"));
            if (g.contains("deltas")) {
                const auto& d = g.at("deltas");
                c.deltas = {d.value("strike", c.deltas.strike), d.value("dip", c.deltas.dip),
                            d.value("rake", c.deltas.rake)};
            }
        }
        if (j.contains("reference"))
            c.reference = detail::existing(detail::resolve(base_dir, j.at("reference").get<std::string>()),
                                           "reference trace");

        auto& a = c.gof.anderson;
        if (j.contains("bands")) {
            a.bands.edges.clear();
            for (const auto& b : j.at("bands")) {
                range(b.is_array() && b.size() == 2, "each band must be [lo, hi]");
                a.bands.edges.push_back({b[0].get<double>(), b[1].get<double>()});
            }
            a.bands.validate();
        }
        if (j.contains("damping")) a.im.damping = j.at("damping").get<double>();
        range(a.im.damping >= 0.0 && a.im.damping < 1.0, "damping must lie in [0, 1)");
        if (j.contains("duration_thresholds")) {
            const auto& t = j.at("duration_thresholds");
            range(t.is_array() && t.size() == 2, "duration_thresholds must be [lo, hi]");
            a.im.duration_lo = t[0].get<double>();
            a.im.duration_hi = t[1].get<double>();
        }
        range(a.im.duration_lo >= 0.0 && a.im.duration_lo < a.im.duration_hi && a.im.duration_hi <= 1.0,
              "duration thresholds must satisfy 0 <= lo < hi <= 1");
        if (j.contains("periods")) {
            const auto& p = j.at("periods");
            a.im.periods = default_periods(p.value("n", std::size_t{50}), p.value("min", 0.02), p.value("max", 10.0));
        }
        if (j.contains("response")) {
            const auto r = j.at("response").get<std::string>();
            range(r == "pseudo" || r == "absolute", "response must be 'pseudo' or 'absolute'");
            a.im.response = r == "pseudo" ? SpectralResponse::pseudo : SpectralResponse::absolute;
        }
        if (j.contains("fs_smoothing_octaves")) a.im.fs_smoothing_octaves = j.at("fs_smoothing_octaves").get<double>();
        range(a.im.fs_smoothing_octaves >= 0.0, "fs_smoothing_octaves must be non-negative");
        if (j.contains("detrend_integrals")) a.im.detrend_integrals = j.at("detrend_integrals").get<bool>();
        if (j.contains("filter_order")) a.filter_order = j.at("filter_order").get<int>();
        range(a.filter_order >= 1 && a.filter_order <= 8, "filter_order must lie in [1, 8]");
        if (j.contains("taper_fraction")) a.taper_fraction = j.at("taper_fraction").get<double>();
        range(a.taper_fraction >= 0.0 && a.taper_fraction <= 0.5, "taper_fraction must lie in [0, 0.5]");
        if (j.contains("max_lag")) a.max_lag = j.at("max_lag").get<double>();
        range(a.max_lag >= 0.0, "max_lag must be non-negative");

        auto& tf = c.gof.tf;
        if (j.contains("gof")) {
            const auto& g = j.at("gof");
            detail::check_keys(g, {"A", "k"}, "gof");
            tf.mapping.a = g.value("A", tf.mapping.a);
            tf.mapping.k = g.value("k", tf.mapping.k);
        }
        range(tf.mapping.a > 0.0 && tf.mapping.a <= 10.0, "gof.A must lie in (0, 10]");
        range(tf.mapping.k > 0.0, "gof.k must be positive");
        if (j.contains("tf")) {
            const auto& t = j.at("tf");
            detail::check_keys(t, {"f_lo", "f_hi", "n_freqs", "omega0", "taper_fraction"}, "tf");
            tf.f_lo = t.value("f_lo", tf.f_lo);
            tf.f_hi = t.value("f_hi", tf.f_hi);
            tf.n_freqs = t.value("n_freqs", tf.n_freqs);
            tf.cwt.omega0 = t.value("omega0", tf.cwt.omega0);
            tf.cwt.taper_fraction = t.value("taper_fraction", tf.cwt.taper_fraction);
        }
        range(tf.f_lo > 0.0 && tf.f_lo < tf.f_hi && tf.n_freqs >= 2, "tf needs 0 < f_lo < f_hi and n_freqs >= 2");
        range(tf.f_hi < 0.5 / c.scenario.dt, "tf.f_hi must stay below the Nyquist frequency");
        range(tf.cwt.omega0 > 0.0, "tf.omega0 must be positive");

        if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
        range(c.alpha > 0.0 && c.alpha < 1.0, "alpha must lie in (0, 1)");
        if (j.contains("workers")) {
            const auto w = j.at("workers").get<long long>();
            range(w >= 1 && w <= 1024, "workers must lie in [1, 1024]");
            c.workers = static_cast<unsigned>(w);
        }
        if (j.contains("out")) c.out = detail::resolve(base_dir, j.at("out").get<std::string>());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse, std::string("config: ") + e.what());
    }
    build_grid(c.center(), c.deltas); // range check only
    return c;
}

inline Config load_config(const std::optional<fs::path>& path)
{
    if (!path) return parse_config(json::object());
    const auto j = io::read_json(detail::existing(*path, "config"));
    return parse_config(j, path->parent_path().empty() ? fs::path(".") : path->parent_path());
}

inline unsigned parse_workers(const std::string& s)
{
    std::size_t pos = 0;
    long long w = 0;
    try {
        w = std::stoll(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || w < 1 || w > 1024) throw Error(ErrorCode::invalid_argument, "bad worker count '" + s + "'");
    return static_cast<unsigned>(w);
}

/// GMV_WORKERS and GMV_OUT override the config file; flags override both.
inline void apply_env(Config& c)
{
    if (const char* w = std::getenv("GMV_WORKERS"); w && *w) c.workers = parse_workers(w);
    if (const char* o = std::getenv("GMV_OUT"); o && *o) c.out = o;
}

inline std::vector<Component> parse_components(const std::string& s)
{
    if (s == "all") return {all_components.begin(), all_components.end()};
    return {parse_component(s)};
}

inline std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------------------
// Commands. Each returns the process exit code.

/// One synthetic for the scenario mechanism: <out>/synthetic.csv + meta.
inline int cmd_synth(const Config& c)
{
    io::write_trace(c.out / "synthetic.csv", synth_fullspace(c.scenario));
    io::write_text(c.out / "scenario.json", io::scenario_json(c.scenario).dump(2) + "\n");
    return 0;
}

/// Both frameworks on one pair: gof.json (with marginals), anderson.csv and
/// the TF GOF planes per component.
inline int cmd_gof(const fs::path& record_path, const fs::path& synthetic_path, const Config& c,
                   const std::vector<Component>& components)
{
    const auto rec = io::read_trace(record_path);
    const auto sim = io::read_trace(synthetic_path);
    const auto r = evaluate_pair(c.scenario.mechanism, rec, sim, c.gof, true);

    auto j = report::run_json(r, components, true);
    j.erase("mechanism");
    j["record"] = record_path.string();
    j["synthetic"] = synthetic_path.string();
    io::write_text(c.out / "gof.json", j.dump(2) + "\n");

    std::vector<AndersonScores> scores;
    for (Component comp : components) {
        const auto& cr = r.component(comp);
        scores.push_back(cr.anderson);
        const std::string name(component_name(comp));
        io::write_text(c.out / ("tfeg_" + name + ".csv"), report::plane_csv(cr.tf.times, cr.tf.freqs, cr.tf.tfeg));
        io::write_text(c.out / ("tfpg_" + name + ".csv"), report::plane_csv(cr.tf.times, cr.tf.freqs, cr.tf.tfpg));
    }
    io::write_text(c.out / "anderson.csv", report::anderson_csv(scores));
    return 0;
}

inline int cmd_report(const fs::path& run_dir, const std::vector<Component>& components, double alpha = 0.05,
                      const std::string& generated_at = utc_timestamp())
{
    const auto runs = report::load_run_summaries(run_dir);
    if (runs.empty()) throw Error(ErrorCode::io, "no runs found under " + run_dir.string());
    const auto rs = report::write_report(run_dir, runs, components, alpha, generated_at);
    return rs.failed == 0 ? 0 : 2;
}

/// Synthesizes (or reads from `external_runs/<s>_<d>_<r>/synthetic.csv`)
/// one record per grid mechanism, scores each against the reference and
/// writes the per-run directories and the report. Returns 2 when any run
/// failed.
inline int cmd_sweep(const Config& c, const std::optional<fs::path>& external_runs,
                     const std::vector<Component>& components, const std::string& generated_at = utc_timestamp())
{
    const auto grid = build_grid(c.center(), c.deltas);
    if (external_runs && !fs::is_directory(*external_runs))
        throw Error(ErrorCode::io, "external runs directory not found: " + external_runs->string());

    PointSourceScenario ref_scenario = c.scenario;
    ref_scenario.mechanism = c.center();
    const Record3C reference = c.reference ? io::read_trace(*c.reference) : synth_fullspace(ref_scenario);

    const auto mechs = grid.mechanisms();
    std::vector<std::optional<Record3C>> traces(mechs.size());
    RunProducer produce = [&](const FocalMechanism& fm) {
        if (external_runs) return io::read_trace(*external_runs / report::run_name(fm) / "synthetic.csv");
        return synth_fullspace(c.scenario, fm);
    };
    // Keep each trace so it can be written next to its scores.
    RunProducer keep = [&](const FocalMechanism& fm) {
        auto rec = produce(fm);
        const auto idx = static_cast<std::size_t>(std::find(mechs.begin(), mechs.end(), fm) - mechs.begin());
        traces[idx] = rec;
        return rec;
    };
    const auto results = run_sweep(grid, reference, keep, c.gof, c.workers);

    if (fs::exists(c.out / "runs")) fs::remove_all(c.out / "runs");
    std::vector<RunSummary> summaries;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto dir = c.out / "runs" / report::run_name(mechs[i]);
        if (traces[i]) io::write_trace(dir / "synthetic.csv", *traces[i]);
        io::write_text(dir / "gof.json", report::run_json(results[i], all_components).dump(2) + "\n");
        summaries.push_back(summarize(results[i]));
    }
    io::write_trace(c.out / "reference.csv", reference);
    const auto rs = report::write_report(c.out, summaries, components, c.alpha, generated_at);
    return rs.failed == 0 ? 0 : 2;
}

inline std::string error_json(const Error& e)
{
    return json{{"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}}}.dump();
}

} // namespace gmv::cli
