#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "eitshape/implicit_shape.hpp"
#include "eitshape/shape_gradient.hpp"

namespace eitshape {

// Latent codes as flat JSON arrays of length d.
std::string latent_to_json(const LatentCode& z);
LatentCode latent_from_json(std::string_view text);
void write_latent_json(const std::filesystem::path& path, const LatentCode& z);
LatentCode read_latent_json(const std::filesystem::path& path);

// Persisted measurement set with the metadata needed to rebuild the solver mesh.
struct StoredMeasurements {
    MeasurementSet measurements;
    double sigma_radius = 1.5;
    int sigma_level = 3;
    std::string pattern_preset;
    std::uint64_t noise_seed = 0;
};

std::string measurements_to_json(const StoredMeasurements& stored);
StoredMeasurements measurements_from_json(std::string_view text);
void write_measurements(const std::filesystem::path& path, const StoredMeasurements& stored);
StoredMeasurements read_measurements(const std::filesystem::path& path);

// 64-bit FNV-1a, used for provenance fingerprints.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace eitshape
