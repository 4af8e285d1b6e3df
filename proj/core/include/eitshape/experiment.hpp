#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eitshape/implicit_shape.hpp"
#include "eitshape/io.hpp"
#include "eitshape/optimizer.hpp"

namespace eitshape {

// Flat `key = value` text, `#` starts a comment. Keys carry a section prefix such
// as `optimizer.learning_rate`; unknown keys are rejected by ExperimentConfig.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view text);

    void set(const std::string& key, const std::string& value) { entries_[key] = value; }
    bool contains(const std::string& key) const { return entries_.contains(key); }
    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

struct ExperimentConfig {
    // Phantom: "sphere", "bumpy", "latent" (phantom.latent holds a JSON array) or
    // "mesh" (phantom.mesh names an OBJ file).
    std::string phantom_preset = "sphere";
    double phantom_radius = 0.6;
    Vec3 phantom_center = Vec3::Zero();
    std::string phantom_latent;
    std::string phantom_mesh;

    double sigma_radius = 1.5;
    int sigma_data_level = 4;
    int sigma_solver_level = 3;

    double grid_spacing = 0.06;
    double data_grid_spacing = 0.0424;
    double box_half_width = 1.2;

    std::string pattern_preset = "yl12";

    double noise_level = 0.0;
    std::uint64_t noise_seed = 1;

    OptimizerConfig optimizer;

    // Initial iterate: "sphere" (init.radius, init.center) or "latent" (init.latent JSON array).
    std::string init_preset = "sphere";
    double init_radius = 0.45;
    Vec3 init_center = Vec3::Zero();
    std::string init_latent;

    int dump_every = 0;
    bool record_timing = false;
    bool allow_inverse_crime = false;
    double metrics_grid_spacing = 0.06;

    static ExperimentConfig from_text(std::string_view text);
    static ExperimentConfig from_file(const std::filesystem::path& path);
    static ExperimentConfig from_entries(const KeyValueConfig& config);

    // Canonical text with every key; parsing it back yields the same configuration.
    std::string resolved_text() const;
    void validate() const;

    // Throws ConfigError unless the data discretization is strictly finer than the
    // solver's or the override is set.
    void check_inverse_crime() const;

    PipelineSettings solver_settings() const;
    PipelineSettings data_settings() const;
};

// Built-in configurations.
ExperimentConfig preset_config(std::string_view name);
std::vector<std::string> preset_names();

LatentCode phantom_latent(const ExperimentConfig& config, const LatentShapeModel& model);
LatentCode initial_latent(const ExperimentConfig& config, const LatentShapeModel& model);

// Fine-mesh forward solves for the phantom, nearest-centroid transfer onto the
// solver's measurement mesh, multiplicative noise.
StoredMeasurements simulate_measurements(const ExperimentConfig& config, const LatentShapeModel& model);

// Index of the nearest `from` panel centroid for each `to` panel centroid.
std::vector<std::size_t> nearest_centroids(const TriangleMesh& from, const TriangleMesh& to);

enum class ExitStatus : int { success = 0, pipeline_error = 1, configuration_error = 2 };

struct RunOptions {
    bool force = false;
    std::ostream* log = nullptr;
};

// Writes measurements.json, target.obj, config.resolved.txt and provenance.txt.
ExitStatus generate_data(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                         const RunOptions& options = {});

// Reads measurements.json from out_dir and writes trace.csv, final.obj,
// target.obj, final_latent.json, metrics.txt, config.resolved.txt and
// provenance.txt (plus iterates/ when dumping is enabled). On failure a FAILED
// marker holds the error.
ExitStatus run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                          const RunOptions& options = {});

struct VerificationCheck {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    bool passed = false;
};

struct VerificationReport {
    std::string suite;
    std::vector<VerificationCheck> checks;

    bool passed() const;
    void print(std::ostream& out) const;
};

// Oracle suites: "bem", "gradient", "unbiased", "metrics"; "all" runs every suite.
std::vector<VerificationReport> verify(std::string_view suite);

}  // namespace eitshape
