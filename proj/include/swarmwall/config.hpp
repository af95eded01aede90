#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "swarmwall/errors.hpp"

namespace swarmwall {

// World parameters. Lengths are arena units, angles radians, speed is
// units per tick. The default geometry is calibrated so that 30-robot
// swarms are dense enough to hold a wall: at lower densities (or smaller
// encounter radii) single robots slip through the frontier and the hull
// mixing ratio never settles.
struct SimConfig {
    double arena_width = 500.0;
    double arena_height = 500.0;
    double tick_duration = 0.1; // seconds per tick
    double robot_radius = 5.0;
    double speed = 1.5;
    double sensing_range = 150.0;   // d_max
    double encounter_radius = 60.0; // r_enc
    double safe_dist = 80.0;
    double crw_sigma = 0.3;        // per-tick heading noise std
    double noise_sigma_d = 2.0;    // ranging noise std
    double noise_sigma_theta = 0.05; // bearing noise std
    std::uint64_t seed = 1;

    void validate() const {
        if (!(arena_width > 0 && arena_height > 0 && robot_radius > 0 && speed > 0 &&
              sensing_range > 0 && encounter_radius > 0 && safe_dist > 0))
            throw ConfigError("sim config: all lengths must be positive");
        if (!(tick_duration > 0)) throw ConfigError("sim config: tick_duration must be positive");
        if (encounter_radius > sensing_range)
            throw ConfigError("sim config: encounter_radius must not exceed sensing_range");
        if (safe_dist < encounter_radius)
            throw ConfigError("sim config: safe_dist must be at least encounter_radius");
        if (crw_sigma < 0 || noise_sigma_d < 0 || noise_sigma_theta < 0)
            throw ConfigError("sim config: noise sigmas must be non-negative");
    }

    int seconds_to_ticks(double s) const {
        return static_cast<int>(std::llround(s / tick_duration));
    }
};

struct TrainingConfig {
    std::size_t buffer_capacity = 100000;
    int target_sync_interval = 1000; // env steps
    double learning_rate = 0.001;
    int batch_size = 64;
    double discount = 0.99;
    double epsilon_start = 1.0;
    double epsilon_end = 0.01;
    int epsilon_decay_steps = 50000;
    long total_steps = 500000;
    int episode_length = 1000;
    std::size_t warmup_transitions = 1000;
    double w_cov = 10.0;
    double w_mix = 10.0;
    double w_dead = 0.5;
    double w_prox = 0.1;
    int deadlock_window = 50;               // K ticks
    double deadlock_displacement_radii = 1.0; // delta_move, in robot radii
    double proximity_threshold_radii = 4.0;
    long checkpoint_interval = 10000;
    bool gradient_clip = false; // off; kept as a visible config knob

    void validate() const {
        if (!(buffer_capacity > 0 && target_sync_interval > 0 && learning_rate > 0 &&
              batch_size > 0 && episode_length > 0 && total_steps > 0 && epsilon_decay_steps > 0 &&
              deadlock_window > 0 && checkpoint_interval > 0))
            throw ConfigError("training config: all counts and rates must be positive");
        if (epsilon_end > epsilon_start)
            throw ConfigError("training config: epsilon_end must not exceed epsilon_start");
        if (static_cast<std::size_t>(batch_size) > buffer_capacity)
            throw ConfigError("training config: batch_size must not exceed buffer_capacity");
        if (checkpoint_interval % episode_length != 0)
            throw ConfigError("training config: checkpoint_interval must be a multiple of episode_length");
    }
};

// Initial-placement scenario. Fractions are relative to arena width
// (center_box_fraction to min(width, height)).
struct ScenarioSpec {
    int case_id = 1; // 1..5
    int n_a = 30;
    int n_b = 30;
    double band_fraction = 1.0 / 16.0;
    double offset_fraction = 1.0 / 8.0;
    double inner_radius = 0.15;
    double outer_radius = 0.30;
    double center_box_fraction = 0.2;

    void validate() const {
        if (case_id < 1 || case_id > 5) throw ConfigError("scenario: case_id must be in 1..5");
        if (n_a < 1 || n_b < 1) throw ConfigError("scenario: populations must be at least 1");
        auto frac = [](double f) { return f > 0.0 && f < 1.0; };
        if (!frac(band_fraction) || !frac(offset_fraction) || !frac(inner_radius) ||
            !frac(outer_radius) || !frac(center_box_fraction))
            throw ConfigError("scenario: fractions must lie in (0, 1)");
        if (inner_radius >= outer_radius)
            throw ConfigError("scenario: inner_radius must be smaller than outer_radius");
    }
};

namespace detail {

inline std::map<std::string, std::string> read_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream ss(value);
    T out{};
    ss >> out;
    if (ss.fail() || !(ss >> std::ws).eof())
        throw ConfigError("config key '" + key + "': bad value '" + value + "'");
    return out;
}

} // namespace detail

// Overrides every SimConfig/TrainingConfig/ScenarioSpec key by field name,
// plus walling_timer_s. Unknown keys are an error.
inline void apply_config_file(const std::string& path, SimConfig& sim, TrainingConfig& train,
                              ScenarioSpec& scenario, double& walling_timer_s) {
    using detail::parse_number;
    for (const auto& [key, value] : detail::read_kv_file(path)) {
        auto d = [&] { return parse_number<double>(key, value); };
        auto i = [&] { return parse_number<long long>(key, value); };
        if (key == "arena_width") sim.arena_width = d();
        else if (key == "arena_height") sim.arena_height = d();
        else if (key == "tick_duration") sim.tick_duration = d();
        else if (key == "robot_radius") sim.robot_radius = d();
        else if (key == "speed") sim.speed = d();
        else if (key == "sensing_range") sim.sensing_range = d();
        else if (key == "encounter_radius") sim.encounter_radius = d();
        else if (key == "safe_dist") sim.safe_dist = d();
        else if (key == "crw_sigma") sim.crw_sigma = d();
        else if (key == "noise_sigma_d") sim.noise_sigma_d = d();
        else if (key == "noise_sigma_theta") sim.noise_sigma_theta = d();
        else if (key == "seed") sim.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "buffer_capacity") train.buffer_capacity = static_cast<std::size_t>(i());
        else if (key == "target_sync_interval") train.target_sync_interval = static_cast<int>(i());
        else if (key == "learning_rate") train.learning_rate = d();
        else if (key == "batch_size") train.batch_size = static_cast<int>(i());
        else if (key == "discount") train.discount = d();
        else if (key == "epsilon_start") train.epsilon_start = d();
        else if (key == "epsilon_end") train.epsilon_end = d();
        else if (key == "epsilon_decay_steps") train.epsilon_decay_steps = static_cast<int>(i());
        else if (key == "total_steps") train.total_steps = static_cast<long>(i());
        else if (key == "episode_length") train.episode_length = static_cast<int>(i());
        else if (key == "warmup_transitions") train.warmup_transitions = static_cast<std::size_t>(i());
        else if (key == "w_cov") train.w_cov = d();
        else if (key == "w_mix") train.w_mix = d();
        else if (key == "w_dead") train.w_dead = d();
        else if (key == "w_prox") train.w_prox = d();
        else if (key == "deadlock_window") train.deadlock_window = static_cast<int>(i());
        else if (key == "deadlock_displacement_radii") train.deadlock_displacement_radii = d();
        else if (key == "proximity_threshold_radii") train.proximity_threshold_radii = d();
        else if (key == "checkpoint_interval") train.checkpoint_interval = static_cast<long>(i());
        else if (key == "case_id") scenario.case_id = static_cast<int>(i());
        else if (key == "n_a") scenario.n_a = static_cast<int>(i());
        else if (key == "n_b") scenario.n_b = static_cast<int>(i());
        else if (key == "band_fraction") scenario.band_fraction = d();
        else if (key == "offset_fraction") scenario.offset_fraction = d();
        else if (key == "inner_radius") scenario.inner_radius = d();
        else if (key == "outer_radius") scenario.outer_radius = d();
        else if (key == "center_box_fraction") scenario.center_box_fraction = d();
        else if (key == "walling_timer_s") walling_timer_s = d();
        else throw ConfigError("unknown config key: " + key);
    }
}

} // namespace swarmwall
