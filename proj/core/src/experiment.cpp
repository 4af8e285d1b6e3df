#include "eitshape/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "eitshape/errors.hpp"
#include "eitshape/format.hpp"
#include "eitshape/marching_cubes.hpp"
#include "eitshape/metrics.hpp"

namespace eitshape {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& key, const std::string& text) {
    double value = 0.0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc() || result.ptr != text.data() + text.size() || !std::isfinite(value))
        throw ConfigError("'" + key + "' expects a number, got '" + text + "'");
    return value;
}

template <typename Int>
Int parse_integer(const std::string& key, const std::string& text) {
    Int value = 0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc() || result.ptr != text.data() + text.size())
        throw ConfigError("'" + key + "' expects an integer, got '" + text + "'");
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true") return true;
    if (text == "false") return false;
    throw ConfigError("'" + key + "' expects true or false, got '" + text + "'");
}

Vec3 parse_vec3(const std::string& key, const std::string& text) {
    Vec3 v;
    std::stringstream fields(text);
    std::string part;
    int n = 0;
    while (std::getline(fields, part, ',')) {
        if (n == 3) break;
        v[n++] = parse_double(key, trim(part));
    }
    if (n != 3 || std::getline(fields, part)) throw ConfigError("'" + key + "' expects three comma-separated numbers");
    return v;
}

std::string print_vec3(const Vec3& v) {
    return format_double(v.x()) + ", " + format_double(v.y()) + ", " + format_double(v.z());
}

std::string print_bool(bool b) { return b ? "true" : "false"; }

struct Field {
    const char* key;
    std::function<void(ExperimentConfig&, const std::string&, const std::string&)> read;
    std::function<std::string(const ExperimentConfig&)> write;
};

template <typename Member>
Field number_field(const char* key, Member ExperimentConfig::*member) {
    return {key, [member](ExperimentConfig& c, const std::string& k, const std::string& v) { c.*member = parse_double(k, v); },
            [member](const ExperimentConfig& c) { return format_double(c.*member); }};
}

template <typename Member>
Field optimizer_number(const char* key, Member OptimizerConfig::*member) {
    return {key,
            [member](ExperimentConfig& c, const std::string& k, const std::string& v) {
                c.optimizer.*member = parse_double(k, v);
            },
            [member](const ExperimentConfig& c) { return format_double(c.optimizer.*member); }};
}

template <typename Member>
Field string_field(const char* key, Member ExperimentConfig::*member) {
    return {key, [member](ExperimentConfig& c, const std::string&, const std::string& v) { c.*member = v; },
            [member](const ExperimentConfig& c) { return c.*member; }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        string_field("phantom.preset", &ExperimentConfig::phantom_preset),
        number_field("phantom.radius", &ExperimentConfig::phantom_radius),
        {"phantom.center",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.phantom_center = parse_vec3(k, v); },
         [](const ExperimentConfig& c) { return print_vec3(c.phantom_center); }},
        string_field("phantom.latent", &ExperimentConfig::phantom_latent),
        string_field("phantom.mesh", &ExperimentConfig::phantom_mesh),
        number_field("sigma.radius", &ExperimentConfig::sigma_radius),
        {"sigma.data_level",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.sigma_data_level = parse_integer<int>(k, v); },
         [](const ExperimentConfig& c) { return std::to_string(c.sigma_data_level); }},
        {"sigma.solver_level",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.sigma_solver_level = parse_integer<int>(k, v); },
         [](const ExperimentConfig& c) { return std::to_string(c.sigma_solver_level); }},
        number_field("gamma.grid_spacing", &ExperimentConfig::grid_spacing),
        number_field("gamma.data_grid_spacing", &ExperimentConfig::data_grid_spacing),
        number_field("gamma.box_half_width", &ExperimentConfig::box_half_width),
        string_field("patterns.preset", &ExperimentConfig::pattern_preset),
        number_field("noise.level", &ExperimentConfig::noise_level),
        {"noise.seed",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.noise_seed = parse_integer<std::uint64_t>(k, v); },
         [](const ExperimentConfig& c) { return std::to_string(c.noise_seed); }},
        {"optimizer.rule",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             if (v == "adam")
                 c.optimizer.rule = UpdateRule::adam;
             else if (v == "sgd")
                 c.optimizer.rule = UpdateRule::sgd;
             else
                 throw ConfigError("'" + k + "' expects adam or sgd");
         },
         [](const ExperimentConfig& c) { return std::string(c.optimizer.rule == UpdateRule::adam ? "adam" : "sgd"); }},
        optimizer_number("optimizer.learning_rate", &OptimizerConfig::learning_rate),
        optimizer_number("optimizer.beta1", &OptimizerConfig::beta1),
        optimizer_number("optimizer.beta2", &OptimizerConfig::beta2),
        optimizer_number("optimizer.epsilon", &OptimizerConfig::epsilon),
        {"optimizer.max_iterations",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.optimizer.max_iterations = parse_integer<int>(k, v);
         },
         [](const ExperimentConfig& c) { return std::to_string(c.optimizer.max_iterations); }},
        optimizer_number("optimizer.sample_fraction", &OptimizerConfig::sample_fraction),
        {"optimizer.window",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.optimizer.window = parse_integer<int>(k, v); },
         [](const ExperimentConfig& c) { return std::to_string(c.optimizer.window); }},
        optimizer_number("optimizer.relative_tolerance", &OptimizerConfig::relative_tolerance),
        {"optimizer.seed",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.optimizer.seed = parse_integer<std::uint64_t>(k, v);
         },
         [](const ExperimentConfig& c) { return std::to_string(c.optimizer.seed); }},
        string_field("init.preset", &ExperimentConfig::init_preset),
        number_field("init.radius", &ExperimentConfig::init_radius),
        {"init.center",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.init_center = parse_vec3(k, v); },
         [](const ExperimentConfig& c) { return print_vec3(c.init_center); }},
        string_field("init.latent", &ExperimentConfig::init_latent),
        {"output.dump_every",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.dump_every = parse_integer<int>(k, v); },
         [](const ExperimentConfig& c) { return std::to_string(c.dump_every); }},
        {"output.record_timing",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.record_timing = parse_bool(k, v); },
         [](const ExperimentConfig& c) { return print_bool(c.record_timing); }},
        {"guard.allow_inverse_crime",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.allow_inverse_crime = parse_bool(k, v); },
         [](const ExperimentConfig& c) { return print_bool(c.allow_inverse_crime); }},
        number_field("metrics.grid_spacing", &ExperimentConfig::metrics_grid_spacing),
    };
    return table;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Exclusive per-directory lock held for the lifetime of the object.
class DirectoryLock {
public:
    explicit DirectoryLock(const fs::path& dir) : path_(dir / ".lock") {
        std::FILE* f = std::fopen(path_.c_str(), "wx");
        if (!f) throw ConfigError("output directory " + dir.string() + " is locked by another run (" +
                                  path_.string() + ")");
        std::fclose(f);
    }
    ~DirectoryLock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }
    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

private:
    fs::path path_;
};

TriangleMesh load_phantom_mesh(const ExperimentConfig& config) {
    TriangleMesh mesh = read_obj(fs::path(config.phantom_mesh));
    if (!mesh.is_watertight()) throw ConfigError("phantom mesh " + config.phantom_mesh + " is not watertight");
    return mesh.signed_volume() < 0 ? mesh.flipped() : mesh;
}

void log_line(const RunOptions& options, const std::string& line) {
    if (options.log) *options.log << line << std::endl;
}

std::string provenance_text(const ExperimentConfig& config, std::string_view command,
                            const std::vector<std::pair<std::string, std::string>>& extra) {
    std::ostringstream out;
    out << "tool = eitshape 0.1.0\n";
    out << "command = " << command << '\n';
    out << "config_hash = " << hex64(fnv1a64(config.resolved_text())) << '\n';
    out << "noise_seed = " << config.noise_seed << '\n';
    out << "optimizer_seed = " << config.optimizer.seed << '\n';
    for (const auto& [k, v] : extra) out << k << " = " << v << '\n';
    return out.str();
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
    KeyValueConfig config;
    std::istringstream lines{std::string(text)};
    std::string line;
    int number = 0;
    while (std::getline(lines, line)) {
        ++number;
        const auto hash = line.find('#');
        const std::string content = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected key = value");
        const std::string key = trim(content.substr(0, eq));
        const std::string value = trim(content.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(number) + ": empty key");
        if (config.entries_.contains(key)) throw ConfigError("line " + std::to_string(number) + ": duplicate key " + key);
        config.entries_[key] = value;
    }
    return config;
}

ExperimentConfig ExperimentConfig::from_entries(const KeyValueConfig& config) {
    ExperimentConfig out;
    for (const auto& [key, value] : config.entries()) {
        const auto& table = fields();
        const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return key == f.key; });
        if (it == table.end()) throw ConfigError("unknown configuration key '" + key + "'");
        it->read(out, key, value);
    }
    out.validate();
    return out;
}

ExperimentConfig ExperimentConfig::from_text(std::string_view text) { return from_entries(KeyValueConfig::parse(text)); }

ExperimentConfig ExperimentConfig::from_file(const fs::path& path) { return from_text(read_text_file(path)); }

std::string ExperimentConfig::resolved_text() const {
    std::vector<std::pair<std::string, std::string>> lines;
    for (const Field& f : fields()) lines.emplace_back(f.key, f.write(*this));
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& [k, v] : lines) out += k + " = " + v + "\n";
    return out;
}

void ExperimentConfig::validate() const {
    static const std::vector<std::string> phantoms = {"sphere", "bumpy", "latent", "mesh"};
    if (std::find(phantoms.begin(), phantoms.end(), phantom_preset) == phantoms.end())
        throw ConfigError("unknown phantom preset '" + phantom_preset + "'");
    if (phantom_preset == "latent" && phantom_latent.empty()) throw ConfigError("phantom.latent is required");
    if (phantom_preset == "mesh" && phantom_mesh.empty()) throw ConfigError("phantom.mesh is required");
    if (phantom_preset == "mesh" && !fs::exists(phantom_mesh))
        throw ConfigError("phantom mesh file " + phantom_mesh + " does not exist");
    if (init_preset != "sphere" && init_preset != "latent") throw ConfigError("unknown init preset '" + init_preset + "'");
    if (init_preset == "latent" && init_latent.empty()) throw ConfigError("init.latent is required");
    if (!(sigma_radius > 0)) throw ConfigError("sigma.radius must be positive");
    if (sigma_solver_level < 0 || sigma_data_level < 0 || sigma_data_level > 6)
        throw ConfigError("sigma levels must lie in [0, 6]");
    if (!(grid_spacing > 0) || !(data_grid_spacing > 0) || !(metrics_grid_spacing > 0))
        throw ConfigError("grid spacings must be positive");
    if (!(box_half_width > 0) || box_half_width >= sigma_radius)
        throw ConfigError("gamma.box_half_width must lie in (0, sigma.radius)");
    if (pattern_preset != "yl1" && pattern_preset != "yl12" && pattern_preset != "single-cos")
        throw ConfigError("unknown pattern preset '" + pattern_preset + "'");
    if (!(noise_level >= 0)) throw ConfigError("noise.level must be non-negative");
    if (dump_every < 0) throw ConfigError("output.dump_every must be non-negative");
    try {
        optimizer.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
}

void ExperimentConfig::check_inverse_crime() const {
    if (allow_inverse_crime) return;
    if (sigma_data_level <= sigma_solver_level || data_grid_spacing >= grid_spacing)
        throw ConfigError("data discretization must be strictly finer than the solver's "
                          "(sigma.data_level > sigma.solver_level and gamma.data_grid_spacing < gamma.grid_spacing); "
                          "set guard.allow_inverse_crime = true to override");
}

PipelineSettings ExperimentConfig::solver_settings() const {
    PipelineSettings s;
    s.grid_spacing = grid_spacing;
    s.box = BoundingBox::cube(box_half_width);
    return s;
}

PipelineSettings ExperimentConfig::data_settings() const {
    PipelineSettings s = solver_settings();
    s.grid_spacing = data_grid_spacing;
    return s;
}

ExperimentConfig preset_config(std::string_view name) {
    ExperimentConfig c;
    if (name == "sphere-to-sphere" || name == "sphere-to-sphere-noisy") {
        c.phantom_preset = "sphere";
        c.phantom_radius = 0.6;
        c.init_radius = 0.4;
        c.noise_level = name == "sphere-to-sphere-noisy" ? 0.2 : 0.0;
        // Full-gradient descent with a fixed step: Adam's momentum overshoots the
        // optimum on this problem and the loss stops decreasing monotonically.
        c.optimizer.rule = UpdateRule::sgd;
        c.optimizer.learning_rate = 0.2;
        c.optimizer.max_iterations = 120;
        return c;
    }
    if (name == "bumpy") {
        c.phantom_preset = "bumpy";
        return c;
    }
    throw ConfigError("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() { return {"sphere-to-sphere", "sphere-to-sphere-noisy", "bumpy"}; }

LatentCode phantom_latent(const ExperimentConfig& config, const LatentShapeModel& model) {
    LatentCode z;
    if (config.phantom_preset == "sphere") {
        z = model.sphere(config.phantom_center, config.phantom_radius);
    } else if (config.phantom_preset == "bumpy") {
        Vector v = model.sphere(Vec3(0.05, -0.03, 0.02), 0.5).values();
        v[model.harmonic_slot(1, 1)] = 0.04;
        v[model.harmonic_slot(2, 0)] = 0.15;
        v[model.harmonic_slot(2, 2)] = -0.08;
        v[model.harmonic_slot(3, -2)] = 0.10;
        z = LatentCode(std::move(v));
    } else if (config.phantom_preset == "latent") {
        z = latent_from_json(config.phantom_latent);
    } else {
        throw ConfigError("phantom preset '" + config.phantom_preset + "' has no latent code");
    }
    model.check_dimension(z);
    if (!model.is_admissible(z)) throw ConfigError("phantom latent code is not admissible");
    return z;
}

LatentCode initial_latent(const ExperimentConfig& config, const LatentShapeModel& model) {
    const LatentCode z = config.init_preset == "latent" ? latent_from_json(config.init_latent)
                                                        : model.sphere(config.init_center, config.init_radius);
    model.check_dimension(z);
    if (!model.is_admissible(z)) throw ConfigError("initial latent code is not admissible");
    return z;
}

std::vector<std::size_t> nearest_centroids(const TriangleMesh& from, const TriangleMesh& to) {
    std::vector<std::size_t> out(to.panel_count());
    for (std::size_t i = 0; i < to.panel_count(); ++i) {
        const Vec3& x = to.panels()[i].centroid;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < from.panel_count(); ++j) {
            const double d = (from.panels()[j].centroid - x).squaredNorm();
            if (d < best) {
                best = d;
                out[i] = j;
            }
        }
    }
    return out;
}

StoredMeasurements simulate_measurements(const ExperimentConfig& config, const LatentShapeModel& model) {
    const TriangleMesh sigma_data = make_sphere_mesh(config.sigma_radius, config.sigma_data_level);
    const TriangleMesh sigma_solver = make_sphere_mesh(config.sigma_radius, config.sigma_solver_level);
    const PipelineSettings settings = config.data_settings();
    const TriangleMesh gamma_data =
        config.phantom_preset == "mesh"
            ? load_phantom_mesh(config).flipped()
            : extract_mesh(model, phantom_latent(config, model), settings.grid_spacing, settings.box).flipped();

    const BieSystem system(gamma_data, sigma_data, settings.assembly);
    const std::vector<CurrentPattern> fine_patterns = pattern_set(sigma_data, config.pattern_preset);
    const std::vector<std::size_t> nearest = nearest_centroids(sigma_data, sigma_solver);

    StoredMeasurements stored;
    stored.sigma_radius = config.sigma_radius;
    stored.sigma_level = config.sigma_solver_level;
    stored.pattern_preset = config.pattern_preset;
    stored.noise_seed = config.noise_seed;
    stored.measurements.noise_level = config.noise_level;
    stored.measurements.patterns = pattern_set(sigma_solver, config.pattern_preset);
    for (std::size_t k = 0; k < fine_patterns.size(); ++k) {
        const FieldSolution u = solve_forward(system, fine_patterns[k]);
        Vector clean(static_cast<Eigen::Index>(sigma_solver.panel_count()));
        for (std::size_t i = 0; i < nearest.size(); ++i)
            clean[static_cast<Eigen::Index>(i)] = u.trace_on_sigma[static_cast<Eigen::Index>(nearest[i])];
        stored.measurements.data.push_back(add_noise(clean, config.noise_level, mix_seed(config.noise_seed, k)));
    }
    return stored;
}

ExitStatus generate_data(const ExperimentConfig& config, const fs::path& out_dir, const RunOptions& options) {
    try {
        config.validate();
        config.check_inverse_crime();
        fs::create_directories(out_dir);
        const DirectoryLock lock(out_dir);
        const fs::path data_path = out_dir / "measurements.json";
        if (fs::exists(data_path) && !options.force)
            throw ConfigError(data_path.string() + " exists; pass --force to overwrite");
        try {
            const LatentShapeModel model;
            log_line(options, "simulating measurements on the fine meshes");
            const StoredMeasurements stored = simulate_measurements(config, model);
            const std::string data_text = measurements_to_json(stored);
            write_text_file(data_path, data_text);
            const TriangleMesh target = config.phantom_preset == "mesh"
                                            ? load_phantom_mesh(config)
                                            : extract_mesh(model, phantom_latent(config, model), config.grid_spacing,
                                                           BoundingBox::cube(config.box_half_width));
            write_obj(out_dir / "target.obj", target);
            write_text_file(out_dir / "config.resolved.txt", config.resolved_text());
            write_text_file(out_dir / "provenance.txt",
                            provenance_text(config, "generate-data",
                                            {{"measurements_hash", hex64(fnv1a64(data_text))}}));
            log_line(options, "wrote " + data_path.string());
            return ExitStatus::success;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            write_text_file(out_dir / "FAILED", std::string(e.what()) + "\n");
            log_line(options, std::string("error: ") + e.what());
            return ExitStatus::pipeline_error;
        }
    } catch (const ConfigError& e) {
        log_line(options, std::string("configuration error: ") + e.what());
        return ExitStatus::configuration_error;
    } catch (const fs::filesystem_error& e) {
        log_line(options, std::string("configuration error: ") + e.what());
        return ExitStatus::configuration_error;
    }
}

ExitStatus run_experiment(const ExperimentConfig& config, const fs::path& out_dir, const RunOptions& options) {
    try {
        config.validate();
        config.check_inverse_crime();
        const fs::path data_path = out_dir / "measurements.json";
        if (!fs::exists(data_path)) throw ConfigError("missing data file " + data_path.string());
        const DirectoryLock lock(out_dir);
        const std::string data_text = read_text_file(data_path);
        const StoredMeasurements stored = measurements_from_json(data_text);
        if (stored.sigma_level != config.sigma_solver_level || stored.sigma_radius != config.sigma_radius ||
            stored.pattern_preset != config.pattern_preset)
            throw ConfigError("measurement file does not match the configured solver mesh or pattern set");

        const LatentShapeModel model;
        const LatentCode z0 = initial_latent(config, model);
        ReconstructionProblem problem;
        problem.sigma = make_sphere_mesh(config.sigma_radius, config.sigma_solver_level);
        problem.measurements = stored.measurements;
        problem.settings = config.solver_settings();
        try {
            problem.measurements.validate(problem.sigma);
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }

        std::error_code ec;
        fs::remove(out_dir / "FAILED", ec);
        fs::remove_all(out_dir / "iterates", ec);
        try {
            if (config.dump_every > 0) fs::create_directories(out_dir / "iterates");
            const IterationObserver observer = [&](const IterationRecord& r, const TriangleMesh& mesh) {
                std::ostringstream line;
                line << "iteration " << r.iteration << " loss " << format_double(r.loss) << " |g| "
                     << format_double(r.grad_norm) << " panels " << r.gamma_panels;
                log_line(options, line.str());
                if (config.dump_every > 0 && r.iteration % config.dump_every == 0) {
                    char name[32];
                    std::snprintf(name, sizeof(name), "iter_%04d.obj", r.iteration);
                    write_obj(out_dir / "iterates" / name, mesh);
                }
            };
            const ReconstructionTrace trace = run_reconstruction(problem, model, z0, config.optimizer, observer);

            {
                std::ofstream csv(out_dir / "trace.csv", std::ios::binary);
                write_trace_csv(csv, trace, config.record_timing);
            }
            write_text_file(out_dir / "config.resolved.txt", config.resolved_text());
            if (trace.records.empty()) throw Error(trace.error.value_or("no iterations completed"));

            write_obj(out_dir / "final.obj", trace.final_mesh);
            write_latent_json(out_dir / "final_latent.json", trace.final_z);

            const BoundingBox box = BoundingBox::cube(config.box_half_width);
            TriangleMesh target;
            InsideOracle target_inside;
            std::optional<LatentCode> target_z;
            if (config.phantom_preset == "mesh") {
                target = load_phantom_mesh(config);
            } else {
                target_z = phantom_latent(config, model);
                target = extract_mesh(model, *target_z, config.grid_spacing, box);
            }
            write_obj(out_dir / "target.obj", target);
            target_inside = target_z ? latent_inside(model, *target_z) : mesh_inside(target);

            const EvaluationGrid grid(box, config.metrics_grid_spacing);
            const IndicatorError indicator = indicator_error(latent_inside(model, trace.final_z), target_inside, grid);
            std::ostringstream metrics;
            metrics << "indicator_error_count=" << indicator.mismatches << '\n';
            metrics << "indicator_error_volume=" << format_double(indicator.volume) << '\n';
            metrics << "hausdorff=" << format_double(hausdorff_distance(trace.final_mesh, target)) << '\n';
            metrics << "volume_difference=" << format_double(volume_difference(trace.final_mesh, target)) << '\n';
            metrics << "initial_loss=" << format_double(trace.records.front().loss) << '\n';
            metrics << "final_loss=" << format_double(trace.records.back().loss) << '\n';
            metrics << "iterations=" << trace.records.size() << '\n';
            metrics << "converged=" << print_bool(trace.converged) << '\n';
            metrics << "stop_reason=" << trace.stop_reason << '\n';
            metrics << "final_radius=" << format_double(trace.final_z.radius()) << '\n';
            metrics << "final_center=" << print_vec3(trace.final_z.center()) << '\n';
            if (trace.records.size() >= 10)
                metrics << "stepsize_diagnostic=" << stepsize_diagnostic(trace).summary() << '\n';
            write_text_file(out_dir / "metrics.txt", metrics.str());
            write_text_file(out_dir / "provenance.txt",
                            provenance_text(config, "reconstruct",
                                            {{"measurements_hash", hex64(fnv1a64(data_text))},
                                             {"iterations", std::to_string(trace.records.size())}}));
            if (trace.error) {
                write_text_file(out_dir / "FAILED", *trace.error + "\n");
                log_line(options, "error: " + *trace.error);
                return ExitStatus::pipeline_error;
            }
            log_line(options, "finished: " + trace.stop_reason);
            return ExitStatus::success;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            write_text_file(out_dir / "FAILED", std::string(e.what()) + "\n");
            log_line(options, std::string("error: ") + e.what());
            return ExitStatus::pipeline_error;
        }
    } catch (const ConfigError& e) {
        log_line(options, std::string("configuration error: ") + e.what());
        return ExitStatus::configuration_error;
    } catch (const fs::filesystem_error& e) {
        log_line(options, std::string("configuration error: ") + e.what());
        return ExitStatus::configuration_error;
    }
}

}  // namespace eitshape
