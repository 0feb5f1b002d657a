#include <CLI11.hpp>

#include "optstop/cli_commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Intervention timing for a stochastically growing damage rate"};
    app.require_subcommand(1);
    optstop::CliOptions opt;
    int rc = 0;

    auto add_common = [&](CLI::App* c) {
        c->add_option("--config", opt.config_path,
                      "INI parameter file (built-in defaults when omitted)");
        c->add_flag("--json", opt.json, "emit JSON on stdout");
    };
    auto add_output = [&](CLI::App* c) {
        c->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    };
    auto add_sim = [&](CLI::App* c) {
        c->add_option("--seed", opt.seed, "random number seed");
        c->add_option("--paths", opt.paths, "Monte Carlo path count");
        c->add_option("--dt", opt.dt, "time step (years)");
        c->add_option("--t-max", opt.t_max, "simulated horizon (years)");
        c->add_flag("--no-bridge", opt.no_bridge, "disable the intra-step crossing test");
        c->add_option("--quantiles", opt.quantiles, "comma-separated quantile levels");
        c->add_option("--bins", opt.bins, "histogram bin count");
        c->add_option("--threads", opt.threads, "worker threads (0 = hardware)");
    };

    CLI::App* calibrate = app.add_subcommand(
        "calibrate", "map temperature dynamics to damage-rate dynamics");
    add_common(calibrate);
    calibrate->callback([&] { rc = optstop::cmd_calibrate(opt); });

    CLI::App* solve =
        app.add_subcommand("solve", "closed-form optimal barrier, value and timing");
    add_common(solve);
    solve->callback([&] { rc = optstop::cmd_solve(opt); });

    CLI::App* simulate = app.add_subcommand(
        "simulate", "Monte Carlo damage distribution under an intervention rule");
    add_common(simulate);
    add_sim(simulate);
    add_output(simulate);
    simulate->add_flag("--never", opt.never_act, "never intervene");
    simulate->add_flag("--immediate", opt.immediate, "intervene at time zero");
    simulate->add_option("--barrier", opt.barrier, "intervene at damage level H");
    simulate->add_flag("--optimal", opt.optimal, "intervene at the optimal barrier");
    simulate->callback([&] { rc = optstop::cmd_simulate(opt); });

    CLI::App* sweep = app.add_subcommand(
        "sweep", "damage curves over barrier grids and cost growth rates");
    add_common(sweep);
    add_sim(sweep);
    add_output(sweep);
    sweep->add_option("--h-min", opt.h_min, "lowest barrier")->capture_default_str();
    sweep->add_option("--h-max", opt.h_max, "highest barrier")->capture_default_str();
    sweep->add_option("--h-count", opt.h_count, "barrier grid size")->capture_default_str();
    sweep->add_option("--q-list", opt.q_list,
                      "comma-separated cost growth rates (default 0..0.04)");
    sweep->add_option("--engine", opt.engine, "closed_form | monte_carlo | both")
        ->capture_default_str();
    sweep->callback([&] { rc = optstop::cmd_sweep(opt); });

    CLI::App* hitting = app.add_subcommand(
        "hitting-time", "first-passage law of the damage rate to a barrier");
    add_common(hitting);
    add_output(hitting);
    hitting->add_option("--barrier", opt.ht_barrier, "barrier level H");
    hitting->add_option("--tau-max", opt.tau_max,
                        "density grid upper end (default: 4x the mean)");
    hitting->add_option("--points", opt.density_points, "density grid size")
        ->capture_default_str();
    hitting->callback([&] { rc = optstop::cmd_hitting_time(opt); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return rc;
}
