// enhvi: build spatial environmental-health vulnerability indices from
// region-by-time panels. See README.md for the pipeline walkthrough.

#include "enhvi/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSelfCheck = 3;

struct GlobalOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> level;
    std::optional<std::string> resolution;  // restricts build/indicators to one resolution
};

enhvi::pipeline::PipelineConfig load_config(const GlobalOpts& g) {
    using enhvi::pipeline::PipelineConfig;
    PipelineConfig cfg;
    if (!g.config_path.empty()) {
        cfg = PipelineConfig::from_file(g.config_path);
    } else {
        cfg.apply_defaults();
    }
    // Flags override config scalars.
    if (g.seed) {
        cfg.seed = *g.seed;
        cfg.synth.seed = *g.seed;
        if (cfg.missing_policy.kind == enhvi::MissingPolicy::Kind::MultipleImpute)
            cfg.missing_policy.seed = *g.seed;
    }
    if (g.out_dir) {
        const bool fixture_was_default = cfg.fixture_dir.empty();
        cfg.out_dir = *g.out_dir;
        if (fixture_was_default) {
            // re-derive fixture-relative defaults against the new out dir
            PipelineConfig fresh;
            fresh.out_dir = cfg.out_dir;
            fresh.seed = cfg.seed;
            fresh.level = cfg.level;
            fresh.start_year = cfg.start_year;
            fresh.years = cfg.years;
            fresh.synth = cfg.synth;
            fresh.resolutions = cfg.resolutions;
            fresh.climatology = cfg.climatology;
            fresh.missing_policy = cfg.missing_policy;
            fresh.method_override = cfg.method_override;
            fresh.spec_paths = cfg.spec_paths;
            fresh.apply_defaults();
            cfg = fresh;
        }
    }
    if (g.level) cfg.level = enhvi::level_from_string(*g.level);
    if (g.resolution) cfg.resolutions = {enhvi::resolution_from_string(*g.resolution)};
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"environmental-health vulnerability index pipeline"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "pipeline config JSON");
    app.add_option("--seed", g.seed, "seed override");
    app.add_option("--out", g.out_dir, "output directory override");
    app.add_option("--level", g.level, "region level override (sa2|sa3|sa4|lga)");
    app.add_option("--resolution", g.resolution,
                   "restrict to one resolution (weekly|monthly|yearly)");

    auto* synth = app.add_subcommand("synth", "generate a seeded synthetic input fixture");
    auto* indicators =
        app.add_subcommand("indicators", "derive EHF/ECF/temperature/pollutant panels");
    auto* weights = app.add_subcommand("weights", "compute Kendall's Tau weight tables");
    auto* build = app.add_subcommand("build", "build index result files");

    auto* breakdown = app.add_subcommand("breakdown", "region drill-down report");
    std::string bd_index, bd_region, bd_out = "breakdown.json";
    int bd_year = 0, bd_sub = 0;
    std::string bd_res = "yearly";
    breakdown->add_option("--index", bd_index, "index id")->required();
    breakdown->add_option("--region", bd_region, "region code")->required();
    breakdown->add_option("--year", bd_year, "year")->required();
    breakdown->add_option("--sub", bd_sub, "month/week (0 for yearly)");
    breakdown->add_option("--at", bd_res, "resolution of the built index");
    breakdown->add_option("--out-file", bd_out, "report path");

    auto* exp = app.add_subcommand("export", "GeoJSON property-join export");
    std::string ex_index, ex_out = "choropleth.json";
    int ex_year = 0, ex_sub = 0;
    std::string ex_res = "yearly";
    exp->add_option("--index", ex_index, "index id")->required();
    exp->add_option("--year", ex_year, "year")->required();
    exp->add_option("--sub", ex_sub, "month/week (0 for yearly)");
    exp->add_option("--at", ex_res, "resolution of the built index");
    exp->add_option("--out-file", ex_out, "export path");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = load_config(g);
        if (synth->parsed()) {
            enhvi::pipeline::run_synth(cfg);
            std::cout << "fixture written to " << cfg.fixture().string() << "\n";
        } else if (indicators->parsed()) {
            enhvi::pipeline::run_indicators(cfg);
            std::cout << "indicator panels written to "
                      << (cfg.out_dir / "indicators").string() << "\n";
        } else if (weights->parsed()) {
            enhvi::pipeline::run_weights(cfg);
            std::cout << "weight tables written to " << (cfg.out_dir / "weights").string()
                      << "\n";
        } else if (build->parsed()) {
            enhvi::pipeline::run_build(cfg);
            std::cout << "index results written to " << (cfg.out_dir / "index").string() << "\n";
        } else if (breakdown->parsed()) {
            auto report = enhvi::pipeline::run_breakdown(
                cfg, bd_index, bd_region, enhvi::resolution_from_string(bd_res), bd_year,
                bd_sub, bd_out);
            std::cout << "breakdown written to " << bd_out
                      << " (reconstruction error " << report.reconstruction_error << ")\n";
        } else if (exp->parsed()) {
            enhvi::pipeline::run_export(cfg, ex_index, enhvi::resolution_from_string(ex_res),
                                        ex_year, ex_sub, ex_out);
            std::cout << "export written to " << ex_out << "\n";
        }
    } catch (const enhvi::pipeline::SelfCheckError& e) {
        std::cerr << "self-check failure: " << e.what() << "\n";
        return kExitSelfCheck;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
