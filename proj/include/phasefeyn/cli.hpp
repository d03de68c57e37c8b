#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace phasefeyn::cli {

// Flat run configuration; every field has a flag twin and a key=value twin in
// the optional config file (flags override the file).
struct RunConfig {
    std::string command;

    // grid
    double t_window = 1.0;
    double t_total = 2.0;
    int m = 512;

    // physics
    double y = 0.0;
    double k = 0.0;
    double s = 0.5;
    double epsilon = 0.05;
    double t = 1.0;

    // oracle / sweep controls
    std::string y_range;              // "start:end:step"
    std::vector<int> n_slices;        // oracle-compare resolutions
    std::string schedule = "default"; // ccr schedule, "default" or "eps:width,..."
    int n_modes = 10000;

    // verification
    std::string suite = "identities";
    std::uint64_t seed = 1;

    // output
    std::string output;               // empty = stdout
    std::string format = "csv";       // csv | json
    std::string f_csv;                // t-transform input field
    std::string dump_matrix;          // optional operator dump (determinant)
};

// Exit status: 0 success, 1 precondition failure, 2 verification failure.
int run(const RunConfig& config);

}  // namespace phasefeyn::cli
