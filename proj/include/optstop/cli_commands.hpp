#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

// Command implementations behind the `optstop` binary, separated from flag
// parsing so they can be driven directly by tests.  Each returns a process
// exit code: 0 success, 2 config or validation error, 3 mathematical domain
// error, 4 I/O error.

namespace optstop {

struct CliOptions {
    std::string config_path;  // empty: built-in defaults

    // Simulation overrides (empty optional: keep the config default).
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> paths;
    std::optional<double> dt;
    std::optional<double> t_max;
    bool no_bridge = false;
    std::string quantiles;  // comma-separated levels, e.g. "0.1,0.5,0.9"
    std::optional<std::size_t> bins;
    unsigned threads = 0;  // 0: hardware concurrency

    std::string out_dir = "out";
    bool json = false;  // machine-readable stdout

    // simulate: exactly one must be chosen
    bool never_act = false;
    bool immediate = false;
    std::optional<double> barrier;
    bool optimal = false;

    // sweep
    double h_min = 1.0;
    double h_max = 20.0;
    std::size_t h_count = 39;
    std::string q_list;              // comma-separated; empty: 0..0.04 step 0.01
    std::string engine = "closed_form";  // closed_form | monte_carlo | both

    // hitting-time
    std::optional<double> ht_barrier;
    std::optional<double> tau_max;  // default: 4x the mean hitting time
    std::size_t density_points = 400;
};

int cmd_calibrate(const CliOptions& opt);
int cmd_solve(const CliOptions& opt);
int cmd_simulate(const CliOptions& opt);
int cmd_sweep(const CliOptions& opt);
int cmd_hitting_time(const CliOptions& opt);

}  // namespace optstop
