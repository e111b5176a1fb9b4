#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scarma/calibration.hpp"

namespace scarma {

// Run-level configuration read from a JSON file. Keys (all optional): mode,
// u_star_min, u_star_max, v, M_f, h, seed, rng_streams. "mode" is applied
// first so the remaining defaults follow it; unknown keys are rejected.
struct RunConfig {
    CalibrationConfig calib;
    std::uint64_t seed = 20260819;
    int rng_streams = 8;
};

bool operator==(const RunConfig& a, const RunConfig& b);

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Emits every key explicitly; parse_config returns the identical RunConfig.
std::string serialize_config(const RunConfig& config);

// Parameter summary of a finished calibration: one JSON object per pipeline
// stage, every number grouped under the stage that produced it. Key order is
// fixed, so the text parses back to an identical document.
std::string summary_json(const CalibrationResult& result);

// Writes z_path.csv, states.csv, premium_curves.csv, error_function.csv and
// summary.json under out_dir (created if needed). Returns the paths written.
std::vector<std::string> emit_report(const CalibrationResult& result, const std::string& out_dir);

}  // namespace scarma
