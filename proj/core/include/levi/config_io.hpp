#pragma once

#include <string>
#include <string_view>

#include "levi/constants.hpp"
#include "levi/ramsey.hpp"

namespace levi {

struct LoadedConfig {
    ExperimentConfig experiment;
    // Present when the document carries a "sequence" block.
    bool has_sequence = false;
    PulseSequence sequence;
};

/// Parses a JSON config. Missing fields keep their defaults; unknown keys,
/// wrong types and violated invariants throw ConfigError naming the key.
/// "sequence" step durations resolve against the derived couplings.
LoadedConfig parse_config(std::string_view json_text);
LoadedConfig load_config_file(const std::string& path);

std::string config_to_json(const ExperimentConfig& config, int indent = 2);
std::string couplings_to_json(const DerivedCouplings& couplings, int indent = 2);

}  // namespace levi
