// Command-line front end: generate-data, reconstruct, verify, metrics.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "eitshape/errors.hpp"
#include "eitshape/experiment.hpp"
#include "eitshape/format.hpp"
#include "eitshape/metrics.hpp"

namespace {

using eitshape::ExitStatus;

struct CommonArgs {
    std::string config;
    std::string preset;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool force = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config, "Configuration file (key = value)");
    cmd->add_option("--preset", args.preset, "Built-in configuration: sphere-to-sphere, sphere-to-sphere-noisy, bumpy");
    cmd->add_option("--out", args.out, "Output directory")->required();
    cmd->add_option("--seed", args.seed, "Overrides both the noise and the optimizer seed");
    cmd->add_flag("--force", args.force, "Overwrite existing measurement data");
}

// The configuration file wins over the preset key by key.
eitshape::ExperimentConfig load_config(const CommonArgs& args) {
    eitshape::ExperimentConfig config =
        args.preset.empty() ? eitshape::ExperimentConfig{} : eitshape::preset_config(args.preset);
    if (!args.config.empty()) {
        eitshape::KeyValueConfig merged = eitshape::KeyValueConfig::parse(config.resolved_text());
        const auto overrides = eitshape::KeyValueConfig::parse(eitshape::read_text_file(args.config));
        for (const auto& [k, v] : overrides.entries()) merged.set(k, v);
        config = eitshape::ExperimentConfig::from_entries(merged);
    }
    if (args.seed) {
        config.noise_seed = *args.seed;
        config.optimizer.seed = *args.seed;
    }
    return config;
}

int to_code(ExitStatus s) { return static_cast<int>(s); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shape reconstruction for high-contrast impedance tomography"};
    app.require_subcommand(1);

    CommonArgs gen_args;
    CLI::App* gen = app.add_subcommand("generate-data", "Simulate boundary measurements for a phantom");
    add_common(gen, gen_args);

    CommonArgs rec_args;
    CLI::App* rec = app.add_subcommand("reconstruct", "Recover the inclusion from measurements in --out");
    add_common(rec, rec_args);

    std::string suite;
    CLI::App* ver = app.add_subcommand("verify", "Run oracle checks");
    ver->add_option("suite", suite, "bem, gradient, unbiased, metrics or all")->required();

    std::string mesh_a;
    std::string mesh_b;
    CLI::App* met = app.add_subcommand("metrics", "Compare two closed OBJ meshes");
    met->add_option("a", mesh_a, "First mesh")->required();
    met->add_option("b", mesh_b, "Second mesh")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : to_code(ExitStatus::configuration_error);
    }

    eitshape::RunOptions options;
    options.log = &std::cerr;
    try {
        if (*gen) {
            options.force = gen_args.force;
            return to_code(eitshape::generate_data(load_config(gen_args), gen_args.out, options));
        }
        if (*rec) {
            options.force = rec_args.force;
            return to_code(eitshape::run_experiment(load_config(rec_args), rec_args.out, options));
        }
        if (*ver) {
            bool ok = true;
            for (const auto& report : eitshape::verify(suite)) {
                report.print(std::cout);
                ok = ok && report.passed();
            }
            return ok ? 0 : to_code(ExitStatus::pipeline_error);
        }
        if (*met) {
            for (const auto& path : {mesh_a, mesh_b})
                if (!std::filesystem::exists(path)) throw eitshape::ConfigError("mesh file " + path + " does not exist");
            const eitshape::TriangleMesh a = eitshape::read_obj(std::filesystem::path(mesh_a));
            const eitshape::TriangleMesh b = eitshape::read_obj(std::filesystem::path(mesh_b));
            if (!a.is_watertight() || !b.is_watertight())
                throw eitshape::ConfigError("metrics require watertight meshes");
            const eitshape::EvaluationGrid grid;
            const auto indicator = eitshape::indicator_error(eitshape::mesh_inside(a), eitshape::mesh_inside(b), grid);
            std::cout << "hausdorff=" << eitshape::format_double(eitshape::hausdorff_distance(a, b)) << '\n';
            std::cout << "volume_difference=" << eitshape::format_double(eitshape::volume_difference(a, b)) << '\n';
            std::cout << "indicator_error_count=" << indicator.mismatches << '\n';
            std::cout << "indicator_error_volume=" << eitshape::format_double(indicator.volume) << '\n';
            return 0;
        }
    } catch (const eitshape::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return to_code(ExitStatus::configuration_error);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return to_code(ExitStatus::pipeline_error);
    }
    return to_code(ExitStatus::configuration_error);
}
