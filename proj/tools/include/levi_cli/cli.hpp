#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "levi/constants.hpp"

namespace levi::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2 };

/// Entry point shared by main() and the tests. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct VerifyCheck {
    std::string name;
    double deviation = 0;
    double tolerance = 0;
    bool passed = false;
};

struct VerifyOptions {
    bool full = false;
    // Negates lambda in the couplings handed to the closed-form engine only.
    bool flip_lambda_sign = false;
};

std::vector<VerifyCheck> run_verify(const ExperimentConfig& config, const VerifyOptions& options);
std::string verify_report_json(const std::vector<VerifyCheck>& checks, std::string_view suite);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// Writes to a sibling temporary and renames over path.
void write_atomic(const std::string& path, std::string_view content);

// %.12g
std::string csv_number(double x);

struct RunManifest {
    std::string command;
    std::string config_path;
    std::string config_hash;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> outputs;
    std::string version;

    std::string to_json() const;
};

std::string tool_version();

}  // namespace levi::cli
