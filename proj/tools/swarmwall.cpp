// Command-line experiment runner: single runs, replicated experiments,
// population sweeps, policy training, and SVG plotting.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swarmwall/harness.hpp"
#include "swarmwall/plot.hpp"
#include "swarmwall/training.hpp"

namespace {

using namespace swarmwall;

struct CommonFlags {
    int case_id = 1;
    std::string controller = "fsm";
    double timer_s = 0.0;
    int swarm_size = 0; // sets both when > 0
    int swarm_size_a = 30;
    int swarm_size_b = 30;
    long steps = 5000;
    int reps = 0; // per-command default when 0
    std::uint64_t seed = 1;
    std::string config_file;
    std::string out_dir = ".";
    std::string checkpoint;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--case", f.case_id, "Initial configuration case (1..5)")
        ->check(CLI::Range(1, 5));
    cmd->add_option("--controller", f.controller, "Controller: fsm or rl")
        ->check(CLI::IsMember({"fsm", "rl"}));
    cmd->add_option("--timer", f.timer_s, "Walling timer in seconds (0 or 3 in the experiments)");
    cmd->add_option("--swarm-size", f.swarm_size, "Robots per swarm (sets both)");
    cmd->add_option("--swarm-size-a", f.swarm_size_a, "Robots in swarm A");
    cmd->add_option("--swarm-size-b", f.swarm_size_b, "Robots in swarm B");
    cmd->add_option("--steps", f.steps, "Simulation ticks (or training steps for train)");
    cmd->add_option("--reps", f.reps, "Replications");
    cmd->add_option("--seed", f.seed, "Base seed");
    cmd->add_option("--config", f.config_file, "key=value config file overriding any parameter");
    cmd->add_option("--out", f.out_dir, "Output directory");
    cmd->add_option("--checkpoint", f.checkpoint, "Policy checkpoint (required for rl)");
}

struct Resolved {
    ScenarioSpec scenario;
    SimConfig sim;
    TrainingConfig train;
    double timer_s = 0.0;
};

Resolved resolve(const CLI::App* cmd, const CommonFlags& f) {
    Resolved r;
    if (!f.config_file.empty())
        apply_config_file(f.config_file, r.sim, r.train, r.scenario, r.timer_s);
    // Explicit flags win over the config file.
    const auto given = [&](const char* name) { return cmd->count(name) > 0; };
    if (given("--case")) r.scenario.case_id = f.case_id;
    if (given("--swarm-size")) {
        r.scenario.n_a = f.swarm_size;
        r.scenario.n_b = f.swarm_size;
    }
    if (given("--swarm-size-a")) r.scenario.n_a = f.swarm_size_a;
    if (given("--swarm-size-b")) r.scenario.n_b = f.swarm_size_b;
    if (given("--seed")) r.sim.seed = f.seed;
    if (given("--timer")) r.timer_s = f.timer_s;
    r.scenario.validate();
    r.sim.validate();
    return r;
}

ExperimentSpec to_spec(const CommonFlags& f, const Resolved& r, int default_reps) {
    ExperimentSpec spec;
    spec.scenario = r.scenario;
    spec.sim = r.sim;
    spec.controller = f.controller == "rl" ? ControllerKind::Rl : ControllerKind::Fsm;
    spec.walling_timer_s = r.timer_s;
    spec.replications = f.reps > 0 ? f.reps : default_reps;
    spec.steps = f.steps;
    spec.base_seed = r.sim.seed;
    spec.checkpoint_path = f.checkpoint;
    spec.out_dir = f.out_dir;
    spec.validate();
    return spec;
}

std::unique_ptr<QNetwork<float>> maybe_load_net(const ExperimentSpec& spec) {
    if (spec.controller != ControllerKind::Rl) return nullptr;
    auto net = std::make_unique<QNetwork<float>>();
    load_checkpoint(*net, spec.checkpoint_path);
    return net;
}

std::vector<long> parse_step_list(const std::string& s) {
    std::vector<long> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stol(tok));
    return out;
}

// "10:100:10" (lo:hi:step) or "5,10,15".
std::vector<int> parse_sizes(const std::string& s) {
    std::vector<int> out;
    if (s.find(':') != std::string::npos) {
        int lo = 0, hi = 0, step = 0;
        if (std::sscanf(s.c_str(), "%d:%d:%d", &lo, &hi, &step) != 3 || step <= 0 || lo > hi)
            throw ConfigError("bad --sizes range: " + s);
        for (int v = lo; v <= hi; v += step) out.push_back(v);
    } else {
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    if (out.empty()) throw ConfigError("empty --sizes list");
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-swarm walling simulator and experiment harness"};
    app.require_subcommand(1);

    CommonFlags run_f, exp_f, sweep_f, train_f;
    std::string snapshot_at, sizes = "10:100:10", resume_path;
    std::string plot_agg, plot_sweep_csv;
    std::string plot_out = ".";

    CLI::App* cmd_run = app.add_subcommand("run", "Single simulation -> run.csv");
    add_common(cmd_run, run_f);
    cmd_run->add_option("--snapshot-at", snapshot_at, "Comma list of steps to dump positions at");

    CLI::App* cmd_experiment =
        app.add_subcommand("experiment", "Replicated runs -> agg.csv (per-step mean/min/max)");
    add_common(cmd_experiment, exp_f);

    CLI::App* cmd_sweep = app.add_subcommand("sweep", "Population grid -> sweep.csv");
    add_common(cmd_sweep, sweep_f);
    cmd_sweep->add_option("--sizes", sizes, "Sizes as lo:hi:step or comma list");

    CLI::App* cmd_train = app.add_subcommand("train", "Train the DQN policy -> checkpoints + log");
    add_common(cmd_train, train_f);
    cmd_train->add_option("--resume", resume_path, "Resume from a training checkpoint");

    CLI::App* cmd_plot = app.add_subcommand("plot", "Render CSVs to SVG charts");
    cmd_plot->add_option("--agg", plot_agg, "agg.csv from `experiment`");
    cmd_plot->add_option("--sweep", plot_sweep_csv, "sweep.csv from `sweep`");
    cmd_plot->add_option("--out", plot_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_run->parsed()) {
            const Resolved r = resolve(cmd_run, run_f);
            ExperimentSpec spec = to_spec(run_f, r, 1);
            std::filesystem::create_directories(spec.out_dir);
            const auto net = maybe_load_net(spec);
            const std::vector<long> snaps = parse_step_list(snapshot_at);
            const RunRecord record =
                run_single(spec, spec.base_seed, 0, net.get(), snaps, spec.out_dir);
            write_run_csv(record, spec.out_dir + "/run.csv");
            std::cout << spec.out_dir << "/run.csv (" << record.metrics.size() << " rows)\n";
        } else if (cmd_experiment->parsed()) {
            const Resolved r = resolve(cmd_experiment, exp_f);
            ExperimentSpec spec = to_spec(exp_f, r, 100);
            std::filesystem::create_directories(spec.out_dir);
            const auto net = maybe_load_net(spec);
            const auto runs = run_replications(spec, net.get());
            write_agg_csv(aggregate_runs(runs), spec.out_dir + "/agg.csv");
            std::cout << spec.out_dir << "/agg.csv (" << spec.replications << " replications)\n";
        } else if (cmd_sweep->parsed()) {
            const Resolved r = resolve(cmd_sweep, sweep_f);
            ExperimentSpec spec = to_spec(sweep_f, r, 2); // paper sweeps averaged two runs
            std::filesystem::create_directories(spec.out_dir);
            const auto net = maybe_load_net(spec);
            const auto rows = run_sweep(spec, parse_sizes(sizes), net.get());
            write_sweep_csv(rows, spec.out_dir + "/sweep.csv");
            std::cout << spec.out_dir << "/sweep.csv (" << rows.size() << " cells)\n";
        } else if (cmd_train->parsed()) {
            const Resolved r = resolve(cmd_train, train_f);
            std::filesystem::create_directories(train_f.out_dir);
            TrainingConfig tc = r.train;
            if (cmd_train->count("--steps")) tc.total_steps = train_f.steps;
            tc.validate();
            SimConfig sim = r.sim;
            if (!resume_path.empty()) {
                Trainer trainer = Trainer::resume(resume_path);
                trainer.run(train_f.out_dir);
                std::cout << "resumed to step " << trainer.global_step() << "\n";
            } else {
                Trainer trainer(r.scenario, sim, tc, sim.seconds_to_ticks(r.timer_s));
                trainer.write_checkpoint(train_f.out_dir + "/ckpt_init.json");
                trainer.run(train_f.out_dir);
                std::cout << "trained " << trainer.global_step() << " steps -> " << train_f.out_dir
                          << "/ckpt_final.json\n";
            }
        } else if (cmd_plot->parsed()) {
            if (plot_agg.empty() && plot_sweep_csv.empty())
                throw ConfigError("plot: need --agg and/or --sweep");
            std::filesystem::create_directories(plot_out);
            if (!plot_agg.empty()) plot_aggregate(plot_agg, plot_out);
            if (!plot_sweep_csv.empty()) plot_sweep(plot_sweep_csv, plot_out);
            std::cout << "plots written to " << plot_out << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
