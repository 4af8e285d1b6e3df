#include "eitshape/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "eitshape/errors.hpp"

namespace eitshape {

namespace {

using json = nlohmann::json;

json vector_to_json(const Vector& v) {
    json array = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) array.push_back(v[i]);
    return array;
}

Vector vector_from_json(const json& array) {
    if (!array.is_array()) throw ConfigError("expected a JSON array of numbers");
    Vector v(static_cast<Eigen::Index>(array.size()));
    for (std::size_t i = 0; i < array.size(); ++i) {
        if (!array[i].is_number()) throw ConfigError("expected a JSON array of numbers");
        v[static_cast<Eigen::Index>(i)] = array[i].get<double>();
    }
    return v;
}

json parse(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace

std::string latent_to_json(const LatentCode& z) { return vector_to_json(z.values()).dump() + "\n"; }

LatentCode latent_from_json(std::string_view text) { return LatentCode(vector_from_json(parse(text))); }

void write_latent_json(const std::filesystem::path& path, const LatentCode& z) {
    write_text_file(path, latent_to_json(z));
}

LatentCode read_latent_json(const std::filesystem::path& path) { return latent_from_json(read_text_file(path)); }

std::string measurements_to_json(const StoredMeasurements& stored) {
    json root;
    root["format"] = "eitshape-measurements-1";
    root["sigma_radius"] = stored.sigma_radius;
    root["sigma_level"] = stored.sigma_level;
    root["pattern_preset"] = stored.pattern_preset;
    root["noise_level"] = stored.measurements.noise_level;
    root["noise_seed"] = stored.noise_seed;
    json patterns = json::array();
    for (const CurrentPattern& p : stored.measurements.patterns)
        patterns.push_back({{"label", p.label}, {"values", vector_to_json(p.values)}});
    root["patterns"] = std::move(patterns);
    json data = json::array();
    for (const Vector& f : stored.measurements.data) data.push_back(vector_to_json(f));
    root["data"] = std::move(data);
    return root.dump(1) + "\n";
}

StoredMeasurements measurements_from_json(std::string_view text) {
    const json root = parse(text);
    try {
        if (root.at("format") != "eitshape-measurements-1") throw ConfigError("unsupported measurement file format");
        StoredMeasurements out;
        out.sigma_radius = root.at("sigma_radius").get<double>();
        out.sigma_level = root.at("sigma_level").get<int>();
        out.pattern_preset = root.at("pattern_preset").get<std::string>();
        out.noise_seed = root.at("noise_seed").get<std::uint64_t>();
        out.measurements.noise_level = root.at("noise_level").get<double>();
        for (const json& p : root.at("patterns"))
            out.measurements.patterns.push_back({p.at("label").get<std::string>(), vector_from_json(p.at("values"))});
        for (const json& f : root.at("data")) out.measurements.data.push_back(vector_from_json(f));
        return out;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed measurement file: ") + e.what());
    }
}

void write_measurements(const std::filesystem::path& path, const StoredMeasurements& stored) {
    write_text_file(path, measurements_to_json(stored));
}

StoredMeasurements read_measurements(const std::filesystem::path& path) {
    return measurements_from_json(read_text_file(path));
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const char c : bytes) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string hex64(std::uint64_t value) {
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(value));
    return buffer;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("failed writing " + path.string());
}

}  // namespace eitshape
