#pragma once

// Experiment configuration shared by every CLI command, its canonical
// serialization, and the content hash embedded into reports.  The hash covers
// exactly the fields that influence computed numbers; presentation choices
// (output path, format, worker count) stay outside it.

#include <cstdint>
#include <string>
#include <vector>

namespace nflab {

struct ExperimentConfig {
    std::string command;
    std::string field = "Q";    // preset name or JSON path
    int m = 1;
    int n = 1;
    std::string weights = "equal"; // "equal" or flat comma list, x rows then y rows
    std::vector<double> theta;     // row-major m*n entries, broadcast to every place
    bool theta_from_seed = true;   // ignored when theta is given explicitly
    std::uint64_t theta_seed = 0;
    double c = 1.0;
    std::vector<double> t_grid;    // window sizes; single entry for one window
    std::string cap_x = "full";    // "full" | "hemisphere:+i" | "cap:x,..,x:r"
    std::string cap_y = "full";
    std::int64_t samples = 200000;
    std::uint64_t seed = 0;

    // presentation only (outside the hash)
    int workers = 1; // accepted for orchestration; results never depend on it
    std::string out = "-";
    std::string format = "csv"; // csv | json
};

// Stable key=value serialization of the semantically meaningful fields, one
// per line, numbers at 12 significant digits.
std::string canonical_config_string(const ExperimentConfig& cfg);

// FNV-1a hash of the canonical string.
std::string config_hash(const ExperimentConfig& cfg);

} // namespace nflab
