// gmv: synthesize, score and summarize ground-motion ensembles.
#include "gmv/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace gmv;
namespace fs = std::filesystem;

struct Options {
    std::string config;
    std::string out;
    std::string workers;
    std::string external_runs;
    std::string component = "all";
    std::string record, synthetic, run_dir;
};

cli::Config load(const Options& o)
{
    auto c = cli::load_config(o.config.empty() ? std::nullopt : std::optional<fs::path>(o.config));
    cli::apply_env(c);
    if (!o.workers.empty()) c.workers = cli::parse_workers(o.workers);
    if (!o.out.empty()) c.out = o.out;
    return c;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Ground-motion synthesis and goodness-of-fit toolkit"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON config file");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--component", o.component, "ew, ns, ud or all")
            ->check(CLI::IsMember({"ew", "ns", "ud", "all"}));
    };

    auto* synth = app.add_subcommand("synth", "synthesize one three-component record");
    common(synth);

    auto* gof = app.add_subcommand("gof", "score a synthetic against a record");
    common(gof);
    gof->add_option("record", o.record, "recorded trace CSV")->required();
    gof->add_option("synthetic", o.synthetic, "synthetic trace CSV")->required();

    auto* sweep = app.add_subcommand("sweep", "run the focal-mechanism sweep");
    common(sweep);
    sweep->add_option("--workers", o.workers, "parallel runs");
    sweep->add_option("--external-runs", o.external_runs, "read <dir>/<strike>_<dip>_<rake>/synthetic.csv");

    auto* report = app.add_subcommand("report", "rebuild tables, figures and manifest of a sweep directory");
    common(report);
    report->add_option("run_dir", o.run_dir, "sweep output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << cli::error_json(Error(ErrorCode::invalid_argument, e.what())) << "\n";
        return 1;
    }

    try {
        const auto components = cli::parse_components(o.component);
        if (synth->parsed()) return cli::cmd_synth(load(o));
        if (gof->parsed()) return cli::cmd_gof(o.record, o.synthetic, load(o), components);
        if (sweep->parsed()) {
            const auto c = load(o);
            std::optional<fs::path> ext;
            if (!o.external_runs.empty()) ext = o.external_runs;
            const int rc = cli::cmd_sweep(c, ext, components);
            if (rc == 2)
                std::cerr << cli::error_json(Error(ErrorCode::partial_sweep, "one or more runs failed; see manifest.json"))
                          << "\n";
            return rc;
        }
        if (report->parsed()) {
            const auto c = load(o);
            const int rc = cli::cmd_report(o.run_dir, components, c.alpha);
            if (rc == 2)
                std::cerr << cli::error_json(Error(ErrorCode::partial_sweep, "run directory contains failed runs"))
                          << "\n";
            return rc;
        }
    } catch (const Error& e) {
        std::cerr << cli::error_json(e) << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << cli::error_json(Error(ErrorCode::io, e.what())) << "\n";
        return 1;
    }
    return 1;
}
