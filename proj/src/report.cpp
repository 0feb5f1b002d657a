#include "optstop/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include <json.hpp>

namespace optstop {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json json_or_null(const std::optional<double>& v) {
    if (v) return *v;
    return nullptr;
}

ordered_json dynamics_json(const DamageDynamics& dyn) {
    ordered_json j;
    j["alpha1"] = dyn.alpha1;
    j["alpha2"] = dyn.alpha2;
    j["sigma1"] = dyn.sigma1;
    j["sigma2"] = dyn.sigma2;
    j["s0"] = dyn.S0;
    j["r"] = dyn.r;
    return j;
}

ordered_json cost_json(const CostSchedule& cost) {
    ordered_json j;
    j["k"] = cost.K;
    j["q"] = cost.q;
    return j;
}

ordered_json temperature_json(const TemperatureModel& m) {
    ordered_json j;
    j["mu1"] = m.mu1;
    j["mu2"] = m.mu2;
    j["xi1"] = m.xi1;
    j["xi2"] = m.xi2;
    j["gamma"] = m.gamma;
    j["c0"] = m.C0;
    j["s0"] = m.S0;
    return j;
}

ordered_json sim_json(const SimConfig& cfg) {
    ordered_json j;
    j["paths"] = cfg.paths;
    j["dt"] = cfg.dt;
    j["t_max"] = cfg.t_max;
    j["seed"] = cfg.seed;
    j["bridge_correction"] = cfg.bridge_correction;
    j["quantile_levels"] = cfg.quantile_levels;
    j["histogram_bins"] = cfg.histogram_bins;
    j["overflow_ceiling"] = cfg.overflow_ceiling;
    return j;
}

}  // namespace

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string iso_utc_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

const char* to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::never_act: return "never_act";
        case StrategyKind::immediate: return "immediate";
        case StrategyKind::barrier: return "barrier";
        case StrategyKind::optimal_barrier: return "optimal_barrier";
    }
    return "unknown";
}

std::string summary_json(const DamageDistribution& dist, const SimConfig& cfg,
                         const DamageDynamics& dyn, const CostSchedule& cost,
                         StrategyKind requested,
                         std::optional<double> resolved_barrier) {
    ordered_json j;
    j["mean"] = dist.mean;
    j["std_error"] = dist.std_error;
    ordered_json q = ordered_json::object();
    for (const auto& [level, value] : dist.quantiles) q[format_double(level)] = value;
    j["quantiles"] = q;
    j["act_fraction"] = dist.act_fraction;
    j["mean_tau_given_acted"] = json_or_null(dist.mean_tau_given_acted);
    j["overflow_paths"] = dist.overflow_paths;
    ordered_json s;
    s["kind"] = to_string(requested);
    s["barrier"] = json_or_null(resolved_barrier);
    j["strategy"] = s;
    ordered_json c;
    c["dynamics"] = dynamics_json(dyn);
    c["cost"] = cost_json(cost);
    c["simulation"] = sim_json(cfg);
    j["config"] = c;
    return j.dump(2) + "\n";
}

std::string sweep_argmin_json(const SweepResult& result) {
    ordered_json j;
    ordered_json arr = ordered_json::array();
    for (const auto& a : result.argmins) {
        ordered_json e;
        e["q"] = a.q;
        e["engine"] = a.engine;
        e["h_best"] = a.H_best;
        e["damage_best"] = a.damage_best;
        e["on_grid_boundary"] = a.boundary;
        arr.push_back(e);
    }
    j["argmins"] = arr;
    j["warnings"] = result.warnings;
    return j.dump(2) + "\n";
}

std::string manifest_json(const std::string& command, const Parameters& params,
                          const SimConfig* sim, const Strategy* strategy,
                          const std::vector<std::string>& outputs) {
    ordered_json j;
    j["command"] = command;
    j["version"] = library_version;
    j["timestamp"] = iso_utc_now();
    ordered_json u;
    u["time"] = "years";
    u["money"] = "billion USD";
    u["rates"] = "per year";
    j["units"] = u;
    ordered_json p;
    p["temperature"] =
        params.temperature ? temperature_json(*params.temperature) : ordered_json(nullptr);
    p["dynamics"] = dynamics_json(params.dynamics);
    p["cost"] = cost_json(params.cost);
    j["parameters"] = p;
    if (sim) {
        j["simulation"] = sim_json(*sim);
        j["seed"] = sim->seed;
    } else {
        j["simulation"] = nullptr;
        j["seed"] = nullptr;
    }
    if (strategy) {
        ordered_json s;
        s["kind"] = to_string(strategy->kind);
        if (strategy->kind == StrategyKind::barrier)
            s["barrier"] = strategy->H;
        else
            s["barrier"] = nullptr;
        j["strategy"] = s;
    } else {
        j["strategy"] = nullptr;
    }
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

std::string quantile_csv(const DamageDistribution& dist) {
    std::string out = "level,value\n";
    for (const auto& [level, value] : dist.quantiles)
        out += format_double(level) + "," + format_double(value) + "\n";
    return out;
}

std::string histogram_csv(const DamageDistribution& dist) {
    std::string out = "bin_left,bin_right,density\n";
    for (const auto& bin : dist.histogram) {
        double width = bin.right - bin.left;
        double density = width > 0 ? bin.mass / width : bin.mass;
        out += format_double(bin.left) + "," + format_double(bin.right) + "," +
               format_double(density) + "\n";
    }
    return out;
}

std::string sweep_csv(const SweepResult& result) {
    std::string out = "q,H,cf_damage,mc_damage,mc_se\n";
    auto field = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string();
    };
    for (const auto& p : result.points)
        out += format_double(p.q) + "," + format_double(p.H) + "," + field(p.cf_damage) +
               "," + field(p.mc_damage) + "," + field(p.mc_se) + "\n";
    return out;
}

std::string density_csv(const std::vector<std::pair<double, double>>& points) {
    std::string out = "tau,density\n";
    for (const auto& [tau, g] : points)
        out += format_double(tau) + "," + format_double(g) + "\n";
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::filesystem::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec)
            throw std::runtime_error("cannot create directory " +
                                     p.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("failed while writing " + path);
}

}  // namespace optstop
