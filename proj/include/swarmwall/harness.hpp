#pragma once

// Experiment runner: single runs with optional position snapshots,
// replicated runs aggregated per step (seeds base_seed + i, executed on a
// worker pool, aggregated in replication order so concurrency never
// changes the output), and population-size sweeps.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "swarmwall/checkpoint.hpp"
#include "swarmwall/controllers.hpp"
#include "swarmwall/csv.hpp"
#include "swarmwall/qnet.hpp"
#include "swarmwall/sim.hpp"

namespace swarmwall {

enum class ControllerKind { Fsm, Rl };

struct ExperimentSpec {
    ScenarioSpec scenario{};
    SimConfig sim{};
    ControllerKind controller = ControllerKind::Fsm;
    double walling_timer_s = 0.0;
    int replications = 100;
    long steps = 5000;
    std::uint64_t base_seed = 1;
    std::string checkpoint_path; // required for the rl controller
    std::string out_dir = ".";

    void validate() const {
        scenario.validate();
        sim.validate();
        if (replications < 1) throw ConfigError("experiment: replications must be at least 1");
        if (steps < 1) throw ConfigError("experiment: steps must be at least 1");
        if (walling_timer_s < 0) throw ConfigError("experiment: timer must be non-negative");
        if (controller == ControllerKind::Rl && checkpoint_path.empty())
            throw ConfigError("experiment: rl controller needs --checkpoint");
    }
};

struct RunRecord {
    int run_id = 0;
    std::vector<TickMetrics> metrics;
};

namespace detail {

// Each run owns its controller (and its own network copy: forward passes
// cache activations, so a network cannot be shared across threads).
struct RunContext {
    std::unique_ptr<QNetwork<float>> net;
    std::unique_ptr<Controller> controller;
};

inline RunContext make_controller(const ExperimentSpec& spec, const SimConfig& cfg,
                                  const QNetwork<float>* trained) {
    RunContext ctx;
    if (spec.controller == ControllerKind::Fsm) {
        ctx.controller = std::make_unique<FsmController>();
    } else {
        ctx.net = std::make_unique<QNetwork<float>>(*trained);
        ctx.controller = std::make_unique<RlController>(*ctx.net, cfg,
                                                        cfg.seconds_to_ticks(spec.walling_timer_s));
    }
    return ctx;
}

inline void write_snapshot(const WorldState& w, const Controller& controller,
                           const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write snapshot: " + path);
    out << "id,swarm,x,y,fsm_state\n";
    for (const auto& r : w.robots)
        out << r.id << ',' << to_char(r.swarm) << ',' << format_value(r.position.x) << ','
            << format_value(r.position.y) << ',' << controller.state_label(r) << '\n';
}

} // namespace detail

// One simulation; when `snapshot_steps` is given, the pre-tick world at
// step s is dumped to snap_<s>.csv (step 1 = the initial placement).
inline RunRecord run_single(const ExperimentSpec& spec, std::uint64_t seed, int run_id,
                            const QNetwork<float>* trained,
                            const std::vector<long>& snapshot_steps = {},
                            const std::string& snapshot_dir = "") {
    SimConfig cfg = spec.sim;
    cfg.seed = seed;
    const int timer_ticks = cfg.seconds_to_ticks(spec.walling_timer_s);
    WorldState world = init_world(spec.scenario, cfg, timer_ticks);
    detail::RunContext ctx = detail::make_controller(spec, cfg, trained);

    RunRecord record;
    record.run_id = run_id;
    record.metrics.reserve(static_cast<std::size_t>(spec.steps));
    for (long t = 1; t <= spec.steps; ++t) {
        for (const long s : snapshot_steps)
            if (s == t)
                detail::write_snapshot(world, *ctx.controller,
                                       snapshot_dir + "/snap_" + std::to_string(s) + ".csv");
        record.metrics.push_back(tick(world, *ctx.controller));
    }
    return record;
}

// Runs `count` independent tasks on a pool and keeps results indexed by
// task id; output order is therefore independent of scheduling.
template <typename Fn>
void parallel_for(int count, Fn&& fn, unsigned threads = 0) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(count));
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct AggregateRow {
    long step;
    double mean[3], min[3], max[3]; // coverage_a, coverage_b, mixing
};

inline std::vector<AggregateRow> aggregate_runs(const std::vector<RunRecord>& runs) {
    std::vector<AggregateRow> out;
    if (runs.empty()) return out;
    const std::size_t steps = runs[0].metrics.size();
    out.resize(steps);
    for (std::size_t s = 0; s < steps; ++s) {
        AggregateRow& row = out[s];
        row.step = runs[0].metrics[s].step;
        for (int m = 0; m < 3; ++m) {
            row.mean[m] = 0;
            row.min[m] = 1e300;
            row.max[m] = -1e300;
        }
        for (const auto& run : runs) {
            const TickMetrics& tm = run.metrics[s];
            const double vals[3] = {tm.coverage_a, tm.coverage_b, tm.mixing};
            for (int m = 0; m < 3; ++m) {
                row.mean[m] += vals[m];
                row.min[m] = std::min(row.min[m], vals[m]);
                row.max[m] = std::max(row.max[m], vals[m]);
            }
        }
        for (int m = 0; m < 3; ++m) row.mean[m] /= static_cast<double>(runs.size());
    }
    return out;
}

// Replicated experiment with seeds base_seed + i.
inline std::vector<RunRecord> run_replications(const ExperimentSpec& spec,
                                               const QNetwork<float>* trained,
                                               unsigned threads = 0) {
    std::vector<RunRecord> runs(static_cast<std::size_t>(spec.replications));
    parallel_for(spec.replications,
                 [&](int i) {
                     runs[static_cast<std::size_t>(i)] =
                         run_single(spec, spec.base_seed + static_cast<std::uint64_t>(i), i, trained);
                 },
                 threads);
    return runs;
}

inline void write_run_csv(const RunRecord& run, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write csv: " + path);
    out << "step,coverage_a,coverage_b,mixing\n";
    for (const auto& m : run.metrics)
        out << m.step << ',' << format_value(m.coverage_a) << ',' << format_value(m.coverage_b)
            << ',' << format_value(m.mixing) << '\n';
}

inline void write_agg_csv(const std::vector<AggregateRow>& agg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write csv: " + path);
    out << "step,coverage_a_mean,coverage_a_min,coverage_a_max,coverage_b_mean,coverage_b_min,"
           "coverage_b_max,mixing_mean,mixing_min,mixing_max\n";
    for (const auto& r : agg) {
        out << r.step;
        for (int m = 0; m < 3; ++m)
            out << ',' << format_value(r.mean[m]) << ',' << format_value(r.min[m]) << ','
                << format_value(r.max[m]);
        out << '\n';
    }
}

struct SweepRow {
    int n_a, n_b;
    double coverage_a_mean, coverage_b_mean, mixing_mean; // at the final step
};

// Grid over population sizes; each cell averages the final-step metrics of
// `spec.replications` runs.
inline std::vector<SweepRow> run_sweep(const ExperimentSpec& spec, const std::vector<int>& sizes,
                                       const QNetwork<float>* trained, unsigned threads = 0) {
    struct Task {
        int n_a, n_b;
    };
    std::vector<Task> tasks;
    for (const int a : sizes)
        for (const int b : sizes) tasks.push_back({a, b});
    std::vector<SweepRow> rows(tasks.size());
    parallel_for(static_cast<int>(tasks.size()),
                 [&](int ti) {
                     ExperimentSpec cell = spec;
                     cell.scenario.n_a = tasks[static_cast<std::size_t>(ti)].n_a;
                     cell.scenario.n_b = tasks[static_cast<std::size_t>(ti)].n_b;
                     cell.base_seed = spec.base_seed +
                                      static_cast<std::uint64_t>(ti) *
                                          static_cast<std::uint64_t>(spec.replications);
                     SweepRow row{cell.scenario.n_a, cell.scenario.n_b, 0, 0, 0};
                     for (int rep = 0; rep < cell.replications; ++rep) {
                         const RunRecord run = run_single(
                             cell, cell.base_seed + static_cast<std::uint64_t>(rep), rep, trained);
                         const TickMetrics& last = run.metrics.back();
                         row.coverage_a_mean += last.coverage_a;
                         row.coverage_b_mean += last.coverage_b;
                         row.mixing_mean += last.mixing;
                     }
                     row.coverage_a_mean /= cell.replications;
                     row.coverage_b_mean /= cell.replications;
                     row.mixing_mean /= cell.replications;
                     rows[static_cast<std::size_t>(ti)] = row;
                 },
                 threads);
    return rows;
}

inline void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write csv: " + path);
    out << "n_a,n_b,coverage_a_mean,coverage_b_mean,mixing_mean\n";
    for (const auto& r : rows)
        out << r.n_a << ',' << r.n_b << ',' << format_value(r.coverage_a_mean) << ','
            << format_value(r.coverage_b_mean) << ',' << format_value(r.mixing_mean) << '\n';
}

} // namespace swarmwall
