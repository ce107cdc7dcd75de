#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace conemult::cli {

constexpr const char* kToolVersion = "0.1.0";

enum ExitCode { kOk = 0, kCheckFailure = 1, kUsage = 2, kInternal = 3 };

// Bad flags, unknown config keys, missing seed, malformed values.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);
std::string read_file(const std::filesystem::path& p);
nlohmann::json load_config(const std::filesystem::path& p);

struct StepTiming {
    std::string name;
    double ms = 0;
};

struct RunManifest {
    std::string command;
    std::string config_hash;
    std::vector<StepTiming> steps;
    std::vector<std::pair<std::string, std::string>> outputs; // file name, digest

    nlohmann::json to_json() const;
};

// Family JSON, SVG and a stats CSV in out_dir; h is the raster step of the union measure.
RunManifest cmd_besicovitch(int k, const std::filesystem::path& out_dir, double h, std::ostream& log);

// Keys: seed (required), out_dir (required), k_list, p_list, mc_samples, union_h, lhs_tol, c_p, record_wall_ms.
RunManifest cmd_ratio(const nlohmann::json& config, bool fast, std::ostream& log);

// Keys: seed (required), out_dir (required), n, kernel_samples, tol, budget, conformal_samples, relation_pairs.
RunManifest cmd_szego(const nlohmann::json& config, bool fast, std::ostream& log);

// TAP lines on out; returns kOk or kCheckFailure.
int cmd_validate(const std::string& suite, bool fast, std::uint64_t seed, double boundary_value, std::ostream& out);

// Determinant, principal minors and cone membership of one element; algebra is "spin:<n>" or "sym:<r>".
int cmd_jordan_check(const std::string& algebra, const std::vector<double>& coords, std::ostream& out);

} // namespace conemult::cli
