#pragma once

#include "pulsegabor/filters.hpp"
#include "pulsegabor/kernel.hpp"
#include "pulsegabor/oracle.hpp"
#include "pulsegabor/plasticity.hpp"
#include "pulsegabor/retina.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace pulsegabor {

// Values of the small TOML subset accepted in config files.
using ConfigValue = std::variant<bool, double, std::string, std::vector<double>>;

// "section.key" -> value. Supports [section] headers, key = value lines,
// # comments, numbers, booleans, quoted strings and flat number arrays.
using ConfigTable = std::map<std::string, ConfigValue>;

ConfigTable parse_config_text(const std::string& text);
ConfigTable read_config_file(const std::filesystem::path& path);

struct RunConfig {
    SimConfig sim{};
    PlasticityParams plasticity = default_plasticity();
    RetinaConfig retina{};
    double sum_divisor = PyramidConfig{}.sum_divisor;

    // Mask source: a JSON file, or the quantized built-in Gabor.
    std::optional<std::filesystem::path> mask_file;
    GaborMaskParams gabor{};

    std::filesystem::path output_dir = "out";
    // Brightest-pixel pulse counts that trigger early response snapshots.
    std::vector<std::uint64_t> snapshot_pulses;

    RunConfig();

    // Overwrites fields named in `table`; unknown keys are rejected.
    void apply(const ConfigTable& table);
    // Applies "key=value,key=value" Gabor overrides (wavelength, orientation, ...).
    void apply_gabor_spec(const std::string& spec);
    void validate() const;

    PyramidConfig pyramid() const;
    IntegerMask mask() const;

    // Fully resolved config in the same section/key layout as the file.
    nlohmann::json to_json() const;
};

// Seed fallback read from PULSEGABOR_SEED; nullopt when unset.
std::optional<std::uint64_t> seed_from_environment();

}  // namespace pulsegabor
