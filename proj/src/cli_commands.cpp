#include "optstop/cli_commands.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "optstop/closed_form.hpp"
#include "optstop/config.hpp"
#include "optstop/model.hpp"
#include "optstop/montecarlo.hpp"
#include "optstop/report.hpp"
#include "optstop/sweep.hpp"

namespace optstop {
namespace {

using ordered_json = nlohmann::ordered_json;

template <typename F>
int guarded(F&& body) {
    try {
        body();
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}

Parameters load(const CliOptions& opt) {
    if (opt.config_path.empty()) return default_parameters();
    std::vector<std::string> warnings;
    Parameters p = load_parameters(opt.config_path, warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    return p;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string item = text.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        std::size_t b = item.find_first_not_of(" \t");
        std::size_t e = item.find_last_not_of(" \t");
        if (b == std::string::npos)
            throw std::invalid_argument(what + ": empty entry in '" + text + "'");
        item = item.substr(b, e - b + 1);
        const char* begin = item.c_str();
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin || *end != '\0')
            throw std::invalid_argument(what + ": '" + item + "' is not a number");
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

SimConfig make_sim_config(const CliOptions& opt, std::uint64_t default_paths) {
    SimConfig cfg;
    cfg.paths = opt.paths.value_or(default_paths);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.dt) cfg.dt = *opt.dt;
    if (opt.t_max) cfg.t_max = *opt.t_max;
    if (opt.no_bridge) cfg.bridge_correction = false;
    if (!opt.quantiles.empty())
        cfg.quantile_levels = parse_double_list(opt.quantiles, "--quantiles");
    if (opt.bins) cfg.histogram_bins = *opt.bins;
    cfg.validate();
    return cfg;
}

std::string join_path(const std::string& dir, const char* name) {
    return (std::filesystem::path(dir) / name).string();
}

void emit(const std::string& text) { std::cout << text; }

}  // namespace

int cmd_calibrate(const CliOptions& opt) {
    return guarded([&] {
        Parameters p = load(opt);
        if (!p.temperature)
            throw std::invalid_argument(
                "calibrate requires a [temperature] section; this config supplies "
                "the damage dynamics directly");
        const DamageDynamics& d = p.dynamics;
        double nu = d.alpha1 - p.cost.q - 0.5 * d.sigma1 * d.sigma1;
        if (opt.json) {
            ordered_json j;
            j["alpha1"] = d.alpha1;
            j["alpha2"] = d.alpha2;
            j["sigma1"] = d.sigma1;
            j["sigma2"] = d.sigma2;
            j["nu"] = nu;
            emit(j.dump(2) + "\n");
        } else {
            emit("alpha1 = " + format_double(d.alpha1) + "\n");
            emit("alpha2 = " + format_double(d.alpha2) + "\n");
            emit("sigma1 = " + format_double(d.sigma1) + "\n");
            emit("sigma2 = " + format_double(d.sigma2) + "\n");
            emit("nu     = " + format_double(nu) + "  (drift of the detrended log damage rate)\n");
        }
    });
}

int cmd_solve(const CliOptions& opt) {
    return guarded([&] {
        Parameters p = load(opt);
        ClosedFormSolution sol = optimal_barrier(p.dynamics, p.cost);
        std::optional<DeterministicSolution> det;
        if (p.cost.q < p.dynamics.alpha1) det = deterministic_solution(p.dynamics, p.cost);
        std::optional<double> ctemp;
        if (p.temperature && sol.H_star)
            ctemp = critical_temperature(*p.temperature, *sol.H_star);

        const char* branch =
            sol.branch == SolutionBranch::interior ? "interior" : "immediate_optimal";
        auto opt_str = [](const std::optional<double>& v) {
            return v ? format_double(*v) : std::string("n/a");
        };
        if (opt.json) {
            ordered_json j;
            auto opt_json = [](const std::optional<double>& v) {
                return v ? ordered_json(*v) : ordered_json(nullptr);
            };
            j["branch"] = branch;
            j["v0"] = sol.V0;
            j["nu"] = sol.nu;
            j["eps"] = opt_json(sol.eps);
            j["eps_tilde"] = opt_json(sol.eps_tilde);
            j["h_star"] = opt_json(sol.H_star);
            j["expected_tau"] = opt_json(sol.expected_tau);
            j["critical_temperature"] = opt_json(ctemp);
            if (det) {
                ordered_json dj;
                dj["tau_star"] = det->tau_star;
                dj["s_star"] = det->S_star;
                j["deterministic"] = dj;
            } else {
                j["deterministic"] = nullptr;
            }
            emit(j.dump(2) + "\n");
        } else {
            emit(std::string("branch        = ") + branch + "\n");
            emit("v0            = " + format_double(sol.V0) + "\n");
            emit("eps           = " + opt_str(sol.eps) + "\n");
            emit("eps_tilde     = " + opt_str(sol.eps_tilde) + "\n");
            emit("h_star        = " + opt_str(sol.H_star) + "\n");
            emit("expected_tau  = " + opt_str(sol.expected_tau) + "\n");
            emit("critical_temp = " + opt_str(ctemp) + "\n");
            if (det)
                emit("deterministic : tau_star = " + format_double(det->tau_star) +
                     ", s_star = " + format_double(det->S_star) + "\n");
            else
                emit("deterministic : n/a (cost growth is not below the damage drift)\n");
        }
    });
}

int cmd_simulate(const CliOptions& opt) {
    return guarded([&] {
        Parameters p = load(opt);
        int chosen = (opt.never_act ? 1 : 0) + (opt.immediate ? 1 : 0) +
                     (opt.barrier ? 1 : 0) + (opt.optimal ? 1 : 0);
        if (chosen != 1)
            throw std::invalid_argument(
                "choose exactly one of --never, --immediate, --barrier H, --optimal");
        Strategy requested;
        if (opt.never_act) requested = Strategy::never_act();
        if (opt.immediate) requested = Strategy::immediate();
        if (opt.barrier) requested = Strategy::barrier(*opt.barrier, p.dynamics.S0);
        if (opt.optimal) requested = Strategy::optimal();

        SimConfig cfg = make_sim_config(opt, 100000);
        Strategy resolved = resolve_strategy(p.dynamics, p.cost, requested);
        std::optional<double> resolved_H;
        if (resolved.kind == StrategyKind::barrier) resolved_H = resolved.H;

        DamageDistribution dist =
            run_ensemble(p.dynamics, p.cost, requested, cfg, opt.threads);
        std::string summary =
            summary_json(dist, cfg, p.dynamics, p.cost, requested.kind, resolved_H);

        std::string summary_path = join_path(opt.out_dir, "summary.json");
        std::string quantile_path = join_path(opt.out_dir, "quantiles.csv");
        std::string histogram_path = join_path(opt.out_dir, "histogram.csv");
        std::string manifest_path = join_path(opt.out_dir, "manifest.json");
        write_text_file(summary_path, summary);
        write_text_file(quantile_path, quantile_csv(dist));
        write_text_file(histogram_path, histogram_csv(dist));
        write_text_file(manifest_path,
                        manifest_json("simulate", p, &cfg, &requested,
                                      {summary_path, quantile_path, histogram_path}));

        if (dist.overflow_paths > 0)
            std::cerr << "warning: " << dist.overflow_paths
                      << " path(s) hit the overflow ceiling and were closed early\n";
        if (opt.json) {
            emit(summary);
        } else {
            emit(std::string("strategy        = ") + to_string(requested.kind) +
                 (resolved_H ? " (barrier " + format_double(*resolved_H) + ")" : "") + "\n");
            emit("mean            = " + format_double(dist.mean) + "\n");
            emit("std_error       = " + format_double(dist.std_error) + "\n");
            for (const auto& [level, value] : dist.quantiles)
                emit("quantile " + format_double(level) + " = " + format_double(value) + "\n");
            emit("act_fraction    = " + format_double(dist.act_fraction) + "\n");
            emit("mean_tau|acted  = " +
                 (dist.mean_tau_given_acted ? format_double(*dist.mean_tau_given_acted)
                                            : std::string("n/a")) +
                 "\n");
            emit("wrote " + summary_path + ", " + quantile_path + ", " + histogram_path +
                 ", " + manifest_path + "\n");
        }
    });
}

int cmd_sweep(const CliOptions& opt) {
    return guarded([&] {
        Parameters p = load(opt);
        SweepSpec spec;
        if (opt.h_count < 2)
            throw std::invalid_argument("--h-count must be at least 2");
        spec.H_grid.reserve(opt.h_count);
        double step = (opt.h_max - opt.h_min) / static_cast<double>(opt.h_count - 1);
        for (std::size_t i = 0; i < opt.h_count; ++i)
            spec.H_grid.push_back(opt.h_min + step * static_cast<double>(i));
        spec.q_values = opt.q_list.empty()
                            ? std::vector<double>{0.0, 0.01, 0.02, 0.03, 0.04}
                            : parse_double_list(opt.q_list, "--q-list");
        if (opt.engine == "closed_form")
            spec.engine = SweepEngine::closed_form;
        else if (opt.engine == "monte_carlo")
            spec.engine = SweepEngine::monte_carlo;
        else if (opt.engine == "both")
            spec.engine = SweepEngine::both;
        else
            throw std::invalid_argument(
                "--engine must be closed_form, monte_carlo or both");
        spec.sim = make_sim_config(opt, 20000);

        SweepResult res = damage_curve(p.dynamics, p.cost, spec, opt.threads);
        for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";

        std::string csv_path = join_path(opt.out_dir, "sweep.csv");
        std::string argmin_path = join_path(opt.out_dir, "argmins.json");
        std::string manifest_path = join_path(opt.out_dir, "manifest.json");
        write_text_file(csv_path, sweep_csv(res));
        std::string argmin_text = sweep_argmin_json(res);
        write_text_file(argmin_path, argmin_text);
        bool used_mc = spec.engine != SweepEngine::closed_form;
        write_text_file(manifest_path,
                        manifest_json("sweep", p, used_mc ? &spec.sim : nullptr, nullptr,
                                      {csv_path, argmin_path}));

        if (opt.json) {
            emit(argmin_text);
        } else {
            for (const auto& a : res.argmins)
                emit("q = " + format_double(a.q) + "  [" + a.engine +
                     "]  best H = " + format_double(a.H_best) +
                     "  damage = " + format_double(a.damage_best) +
                     (a.boundary ? "  (grid boundary)" : "") + "\n");
            emit("wrote " + csv_path + ", " + argmin_path + ", " + manifest_path + "\n");
        }
    });
}

int cmd_hitting_time(const CliOptions& opt) {
    return guarded([&] {
        Parameters p = load(opt);
        if (!opt.ht_barrier)
            throw std::invalid_argument("hitting-time requires --barrier H");
        double H = *opt.ht_barrier;
        if (opt.density_points < 2)
            throw std::invalid_argument("--points must be at least 2");

        double mean = expected_hitting_time(p.dynamics, p.cost, H);
        auto density = [&](double tau) {
            return hitting_time_density(p.dynamics, p.cost, H, tau);
        };
        density(1.0);  // surfaces the H > S0 requirement before any output

        double tau_max = opt.tau_max.value_or(4.0 * mean);
        if (!(tau_max > 0.0))
            throw std::invalid_argument("--tau-max must be positive");
        std::vector<std::pair<double, double>> points;
        points.reserve(opt.density_points + 1);
        for (std::size_t i = 0; i <= opt.density_points; ++i) {
            double tau = tau_max * static_cast<double>(i) /
                         static_cast<double>(opt.density_points);
            points.emplace_back(tau, density(tau));
        }

        // Integrate far past the bulk so the normalization check is limited
        // by quadrature, not truncation.
        double b = std::log(H / p.dynamics.S0);
        double nu = p.dynamics.alpha1 - p.cost.q -
                    0.5 * p.dynamics.sigma1 * p.dynamics.sigma1;
        double sd = std::sqrt(b * p.dynamics.sigma1 * p.dynamics.sigma1 / (nu * nu * nu));
        double t_hi = std::max({tau_max, mean + 60.0 * sd, 100.0});
        double normalization = hitting_time_integral(p.dynamics, p.cost, H, t_hi, 0);

        std::string csv_path = join_path(opt.out_dir, "density.csv");
        std::string manifest_path = join_path(opt.out_dir, "manifest.json");
        write_text_file(csv_path, density_csv(points));
        write_text_file(manifest_path,
                        manifest_json("hitting-time", p, nullptr, nullptr, {csv_path}));

        if (opt.json) {
            ordered_json j;
            j["barrier"] = H;
            j["expected_tau"] = mean;
            j["normalization"] = normalization;
            j["tau_max"] = tau_max;
            emit(j.dump(2) + "\n");
        } else {
            emit("barrier       = " + format_double(H) + "\n");
            emit("expected_tau  = " + format_double(mean) + "\n");
            emit("normalization = " + format_double(normalization) + "\n");
            emit("wrote " + csv_path + ", " + manifest_path + "\n");
        }
    });
}

}  // namespace optstop
