#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "optstop/config.hpp"
#include "optstop/model.hpp"
#include "optstop/montecarlo.hpp"
#include "optstop/sweep.hpp"

// Serialization helpers shared by the command-line tool and the test
// harness.  Everything is deterministic: the same inputs produce the same
// bytes, so ensemble summaries can be compared bit-for-bit across runs.
// Only the run manifest carries a timestamp.

namespace optstop {

inline constexpr const char* library_version = "0.1.0";

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

// Current time as an ISO-8601 UTC string, e.g. "2024-05-01T12:00:00Z".
std::string iso_utc_now();

const char* to_string(StrategyKind kind);

// Ensemble summary as a JSON object: mean, std_error, quantiles,
// act_fraction, mean_tau_given_acted (null when no path acted),
// overflow_paths, the strategy and a full config echo.  Pretty-printed,
// trailing newline.
std::string summary_json(const DamageDistribution& dist, const SimConfig& cfg,
                         const DamageDynamics& dyn, const CostSchedule& cost,
                         StrategyKind requested,
                         std::optional<double> resolved_barrier);

// Argmins per cost growth rate plus any sweep warnings.
std::string sweep_argmin_json(const SweepResult& result);

// Run manifest: command line, library version, timestamp, seed, resolved
// parameters and the files the command wrote.
std::string manifest_json(const std::string& command, const Parameters& params,
                          const SimConfig* sim, const Strategy* strategy,
                          const std::vector<std::string>& outputs);

// CSV builders, header row first.
std::string quantile_csv(const DamageDistribution& dist);             // level,value
std::string histogram_csv(const DamageDistribution& dist);            // bin_left,bin_right,density
std::string sweep_csv(const SweepResult& result);                     // q,H,cf_damage,mc_damage,mc_se
std::string density_csv(const std::vector<std::pair<double, double>>& points);  // tau,density

// Writes `text` to `path`, creating parent directories as needed.
// Throws std::runtime_error on failure.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace optstop
