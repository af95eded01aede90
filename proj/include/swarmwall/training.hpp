#pragma once

// Centralized training with decentralized execution: one Q-network shared
// by every robot of both swarms, trained with experience replay, a
// periodically synchronized target network, a linear epsilon schedule, and
// a reward built from the privileged global metrics. Episodes reset the
// world on a seed-derived placement; checkpoints at episode boundaries
// carry the full trainer state, so training resumes bit-exactly.

#include <array>
#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include <json.hpp>

#include "swarmwall/checkpoint.hpp"
#include "swarmwall/config.hpp"
#include "swarmwall/qnet.hpp"
#include "swarmwall/replay.hpp"
#include "swarmwall/sim.hpp"

namespace swarmwall {

// Linear relaxation from epsilon_start at step 0 to epsilon_end at
// epsilon_decay_steps, constant afterwards.
inline double epsilon_at(long step, const TrainingConfig& cfg) {
    if (step <= 0) return cfg.epsilon_start;
    if (step >= cfg.epsilon_decay_steps) return cfg.epsilon_end;
    const double f = static_cast<double>(step) / static_cast<double>(cfg.epsilon_decay_steps);
    return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * f;
}

struct RewardInputs {
    double cov_own_prev = 0.0; // percent
    double cov_own_new = 0.0;
    double mix_prev = 0.0;
    double mix_new = 0.0;
    bool deadlocked = false;
    bool too_close = false;
};

// r = w_cov * dcov/100 - w_mix * dmix/100 - w_dead * [deadlock]
//     - w_prox * [proximity]; bounded by the sum of the weights.
inline double compute_reward(const RewardInputs& in, const TrainingConfig& cfg) {
    double r = cfg.w_cov * (in.cov_own_new - in.cov_own_prev) / 100.0;
    r -= cfg.w_mix * (in.mix_new - in.mix_prev) / 100.0;
    if (in.deadlocked) r -= cfg.w_dead;
    if (in.too_close) r -= cfg.w_prox;
    return r;
}

inline void sync_target(QNetwork<float>& online, QNetwork<float>& target) {
    target.copy_from(online);
}

namespace detail {

inline Tensor<float> batch_tokens(const std::vector<const EncodedObs*>& obs) {
    Tensor<float> t({static_cast<long>(obs.size()), kObsTokens, kObsFeatures});
    for (std::size_t b = 0; b < obs.size(); ++b)
        std::copy(obs[b]->tokens.begin(), obs[b]->tokens.end(), t.ptr() + b * kObsValues);
    return t;
}

inline std::vector<std::uint8_t> batch_mask(const std::vector<const EncodedObs*>& obs) {
    std::vector<std::uint8_t> m(obs.size() * kObsTokens);
    for (std::size_t b = 0; b < obs.size(); ++b)
        std::copy(obs[b]->mask.begin(), obs[b]->mask.end(), m.begin() + static_cast<std::ptrdiff_t>(b * kObsTokens));
    return m;
}

} // namespace detail

// One DQN update on a sampled batch: y = r + gamma * max_a' Q_target(s', a')
// * (1 - done), Huber loss on Q_online(s, a), one Adam step. The target
// network is left untouched.
inline double td_update(QNetwork<float>& online, QNetwork<float>& target,
                        const ReplayBuffer& buffer, const std::vector<std::size_t>& batch_idx,
                        Adam<float>& adam, double gamma, Rng& dropout_rng) {
    const std::size_t batch = batch_idx.size();
    std::vector<const EncodedObs*> obs(batch), next_obs(batch);
    for (std::size_t i = 0; i < batch; ++i) {
        obs[i] = &buffer.at(batch_idx[i]).obs;
        next_obs[i] = &buffer.at(batch_idx[i]).next_obs;
    }

    const Tensor<float> q_next =
        target.forward(detail::batch_tokens(next_obs), detail::batch_mask(next_obs), Mode::Eval);
    std::vector<float> y(batch);
    for (std::size_t i = 0; i < batch; ++i) {
        const Transition& t = buffer.at(batch_idx[i]);
        float best = q_next.ptr()[i * kActionCount];
        for (int a = 1; a < kActionCount; ++a)
            best = std::max(best, q_next.ptr()[i * kActionCount + a]);
        y[i] = t.reward + (t.done ? 0.0f : static_cast<float>(gamma) * best);
    }

    const Tensor<float> q = online.forward(detail::batch_tokens(obs), detail::batch_mask(obs),
                                           Mode::Train, &dropout_rng);
    std::vector<float> pred(batch);
    for (std::size_t i = 0; i < batch; ++i)
        pred[i] = q.ptr()[i * kActionCount + buffer.at(batch_idx[i]).action];

    const float loss = huber_loss(pred, y);
    if (!std::isfinite(loss)) throw NumericError("td_update: non-finite loss");

    const std::vector<float> dpred = huber_backward(pred, y);
    Tensor<float> dq({static_cast<long>(batch), kActionCount});
    for (std::size_t i = 0; i < batch; ++i)
        dq.ptr()[i * kActionCount + buffer.at(batch_idx[i]).action] = dpred[i];
    online.zero_grad();
    online.backward(dq);
    adam.step(online.params());
    return loss;
}

struct TrainLogRow {
    long step = 0;
    double epsilon = 0.0;
    double loss = 0.0;
    double episode_return_mean = 0.0;
    double coverage_a = 0.0;
    double coverage_b = 0.0;
    double mixing = 0.0;
};

// JSON mirrors of the configs, used by resume checkpoints.
inline nlohmann::json sim_config_to_json(const SimConfig& c) {
    return {{"arena_width", c.arena_width},       {"arena_height", c.arena_height},
            {"tick_duration", c.tick_duration},   {"robot_radius", c.robot_radius},
            {"speed", c.speed},                   {"sensing_range", c.sensing_range},
            {"encounter_radius", c.encounter_radius}, {"safe_dist", c.safe_dist},
            {"crw_sigma", c.crw_sigma},           {"noise_sigma_d", c.noise_sigma_d},
            {"noise_sigma_theta", c.noise_sigma_theta}, {"seed", c.seed}};
}

inline SimConfig sim_config_from_json(const nlohmann::json& j) {
    SimConfig c;
    c.arena_width = j.at("arena_width");
    c.arena_height = j.at("arena_height");
    c.tick_duration = j.at("tick_duration");
    c.robot_radius = j.at("robot_radius");
    c.speed = j.at("speed");
    c.sensing_range = j.at("sensing_range");
    c.encounter_radius = j.at("encounter_radius");
    c.safe_dist = j.at("safe_dist");
    c.crw_sigma = j.at("crw_sigma");
    c.noise_sigma_d = j.at("noise_sigma_d");
    c.noise_sigma_theta = j.at("noise_sigma_theta");
    c.seed = j.at("seed");
    return c;
}

inline nlohmann::json training_config_to_json(const TrainingConfig& c) {
    return {{"buffer_capacity", c.buffer_capacity},
            {"target_sync_interval", c.target_sync_interval},
            {"learning_rate", c.learning_rate},
            {"batch_size", c.batch_size},
            {"discount", c.discount},
            {"epsilon_start", c.epsilon_start},
            {"epsilon_end", c.epsilon_end},
            {"epsilon_decay_steps", c.epsilon_decay_steps},
            {"total_steps", c.total_steps},
            {"episode_length", c.episode_length},
            {"warmup_transitions", c.warmup_transitions},
            {"w_cov", c.w_cov},
            {"w_mix", c.w_mix},
            {"w_dead", c.w_dead},
            {"w_prox", c.w_prox},
            {"deadlock_window", c.deadlock_window},
            {"deadlock_displacement_radii", c.deadlock_displacement_radii},
            {"proximity_threshold_radii", c.proximity_threshold_radii},
            {"checkpoint_interval", c.checkpoint_interval}};
}

inline TrainingConfig training_config_from_json(const nlohmann::json& j) {
    TrainingConfig c;
    c.buffer_capacity = j.at("buffer_capacity");
    c.target_sync_interval = j.at("target_sync_interval");
    c.learning_rate = j.at("learning_rate");
    c.batch_size = j.at("batch_size");
    c.discount = j.at("discount");
    c.epsilon_start = j.at("epsilon_start");
    c.epsilon_end = j.at("epsilon_end");
    c.epsilon_decay_steps = j.at("epsilon_decay_steps");
    c.total_steps = j.at("total_steps");
    c.episode_length = j.at("episode_length");
    c.warmup_transitions = j.at("warmup_transitions");
    c.w_cov = j.at("w_cov");
    c.w_mix = j.at("w_mix");
    c.w_dead = j.at("w_dead");
    c.w_prox = j.at("w_prox");
    c.deadlock_window = j.at("deadlock_window");
    c.deadlock_displacement_radii = j.at("deadlock_displacement_radii");
    c.proximity_threshold_radii = j.at("proximity_threshold_radii");
    c.checkpoint_interval = j.at("checkpoint_interval");
    return c;
}

inline nlohmann::json scenario_to_json(const ScenarioSpec& s) {
    return {{"case_id", s.case_id},
            {"n_a", s.n_a},
            {"n_b", s.n_b},
            {"band_fraction", s.band_fraction},
            {"offset_fraction", s.offset_fraction},
            {"inner_radius", s.inner_radius},
            {"outer_radius", s.outer_radius},
            {"center_box_fraction", s.center_box_fraction}};
}

inline ScenarioSpec scenario_from_json(const nlohmann::json& j) {
    ScenarioSpec s;
    s.case_id = j.at("case_id");
    s.n_a = j.at("n_a");
    s.n_b = j.at("n_b");
    s.band_fraction = j.at("band_fraction");
    s.offset_fraction = j.at("offset_fraction");
    s.inner_radius = j.at("inner_radius");
    s.outer_radius = j.at("outer_radius");
    s.center_box_fraction = j.at("center_box_fraction");
    return s;
}

namespace detail {

inline nlohmann::json rng_to_json(const Rng& rng) {
    nlohmann::json out = nlohmann::json::array();
    char buf[17];
    for (const auto w : rng.state()) {
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(w));
        out.push_back(std::string(buf));
    }
    return out;
}

inline Rng rng_from_json(const nlohmann::json& j) {
    std::array<std::uint64_t, 4> s{};
    for (int i = 0; i < 4; ++i)
        s[static_cast<std::size_t>(i)] =
            std::stoull(j.at(static_cast<std::size_t>(i)).get<std::string>(), nullptr, 16);
    Rng rng;
    rng.set_state(s);
    return rng;
}

inline nlohmann::json replay_to_json(const ReplayBuffer& buffer) {
    const auto fifo = buffer.snapshot_fifo();
    std::vector<float> tokens, next_tokens, rewards;
    std::vector<std::uint8_t> masks, next_masks, actions, dones;
    for (const auto& t : fifo) {
        tokens.insert(tokens.end(), t.obs.tokens.begin(), t.obs.tokens.end());
        masks.insert(masks.end(), t.obs.mask.begin(), t.obs.mask.end());
        next_tokens.insert(next_tokens.end(), t.next_obs.tokens.begin(), t.next_obs.tokens.end());
        next_masks.insert(next_masks.end(), t.next_obs.mask.begin(), t.next_obs.mask.end());
        actions.push_back(static_cast<std::uint8_t>(t.action));
        rewards.push_back(t.reward);
        dones.push_back(t.done);
    }
    return {{"count", fifo.size()},
            {"tokens", encode_f32(tokens)},
            {"masks", base64_encode(masks.data(), masks.size())},
            {"next_tokens", encode_f32(next_tokens)},
            {"next_masks", base64_encode(next_masks.data(), next_masks.size())},
            {"actions", base64_encode(actions.data(), actions.size())},
            {"rewards", encode_f32(rewards)},
            {"dones", base64_encode(dones.data(), dones.size())}};
}

inline void replay_from_json(const nlohmann::json& j, ReplayBuffer& buffer) {
    const std::size_t count = j.at("count");
    const auto tokens = decode_f32(j.at("tokens"), count * kObsValues);
    const auto next_tokens = decode_f32(j.at("next_tokens"), count * kObsValues);
    const auto rewards = decode_f32(j.at("rewards"), count);
    const auto masks = base64_decode(j.at("masks").get<std::string>());
    const auto next_masks = base64_decode(j.at("next_masks").get<std::string>());
    const auto actions = base64_decode(j.at("actions").get<std::string>());
    const auto dones = base64_decode(j.at("dones").get<std::string>());
    if (masks.size() != count * kObsTokens || next_masks.size() != count * kObsTokens ||
        actions.size() != count || dones.size() != count)
        throw CheckpointCorruptError("trainer state: replay blob sizes disagree");
    std::vector<Transition> fifo(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::copy_n(tokens.begin() + static_cast<std::ptrdiff_t>(i * kObsValues), kObsValues,
                    fifo[i].obs.tokens.begin());
        std::copy_n(masks.begin() + static_cast<std::ptrdiff_t>(i * kObsTokens), kObsTokens,
                    fifo[i].obs.mask.begin());
        std::copy_n(next_tokens.begin() + static_cast<std::ptrdiff_t>(i * kObsValues), kObsValues,
                    fifo[i].next_obs.tokens.begin());
        std::copy_n(next_masks.begin() + static_cast<std::ptrdiff_t>(i * kObsTokens), kObsTokens,
                    fifo[i].next_obs.mask.begin());
        fifo[i].action = actions[i];
        fifo[i].reward = rewards[i];
        fifo[i].done = dones[i];
    }
    buffer.restore_fifo(fifo);
}

} // namespace detail

class Trainer {
public:
    Trainer(ScenarioSpec scenario, SimConfig sim_cfg, TrainingConfig train_cfg, int hold_ticks)
        : scenario_(scenario), sim_cfg_(sim_cfg), cfg_(train_cfg), hold_(hold_ticks),
          buffer_(train_cfg.buffer_capacity),
          adam_(static_cast<float>(train_cfg.learning_rate)) {
        scenario_.validate();
        sim_cfg_.validate();
        cfg_.validate();
        Rng init_rng(derive_seed(sim_cfg_.seed, 4));
        online_.init(init_rng);
        sync_target(online_, target_);
        policy_rng_ = Rng(derive_seed(sim_cfg_.seed, 1));
        dropout_rng_ = Rng(derive_seed(sim_cfg_.seed, 2));
        sample_rng_ = Rng(derive_seed(sim_cfg_.seed, 3));
    }

    // Rebuilds a trainer from a checkpoint with a trainer_state section.
    static Trainer resume(const std::string& checkpoint_path) {
        QNetwork<float> online;
        const nlohmann::json state = load_checkpoint(online, checkpoint_path);
        if (state.is_null())
            throw CheckpointCorruptError("checkpoint has no trainer_state; cannot resume");
        Trainer t(scenario_from_json(state.at("scenario")),
                  sim_config_from_json(state.at("sim_config")),
                  training_config_from_json(state.at("training_config")), state.at("hold_ticks"));
        t.online_ = online;
        for (auto& [name, tensor] : t.target_.named_tensors())
            tensor->data = decode_f32(state.at("target_tensors").at(name).at("data"), tensor->numel());
        t.adam_ = Adam<float>(static_cast<float>(t.cfg_.learning_rate));
        t.adam_.t_ = state.at("adam").at("t");
        const auto params = t.online_.params();
        for (std::size_t i = 0; i < params.size(); ++i) {
            t.adam_.m_.emplace_back(params[i]->value.shape);
            t.adam_.v_.emplace_back(params[i]->value.shape);
            t.adam_.m_[i].data = decode_f32(state.at("adam").at("m").at(i), params[i]->value.numel());
            t.adam_.v_[i].data = decode_f32(state.at("adam").at("v").at(i), params[i]->value.numel());
        }
        detail::replay_from_json(state.at("replay"), t.buffer_);
        t.policy_rng_ = detail::rng_from_json(state.at("policy_rng"));
        t.dropout_rng_ = detail::rng_from_json(state.at("dropout_rng"));
        t.sample_rng_ = detail::rng_from_json(state.at("sample_rng"));
        t.global_step_ = state.at("global_step");
        t.episode_ = state.at("episode");
        return t;
    }

    // Runs until total_steps, writing periodic checkpoints and the log into
    // out_dir (empty out_dir: no files, useful for in-process training).
    void run(const std::string& out_dir = "") {
        while (global_step_ < cfg_.total_steps) step_once(out_dir);
        if (!out_dir.empty()) {
            write_checkpoint(out_dir + "/ckpt_final.json");
            write_log_csv(out_dir + "/training_log.csv");
        }
    }

    // One environment tick: act, record transitions, learn, sync, log.
    void step_once(const std::string& out_dir = "") {
        if (!world_ready_) start_episode();

        const double eps = epsilon_at(global_step_, cfg_);
        TrainController controller(*this, eps);
        const TickMetrics metrics = tick(world_, controller);
        ++episode_tick_;

        // Completed transitions from the previous tick now that this tick's
        // observations exist.
        if (episode_tick_ >= 2) {
            for (std::size_t i = 0; i < world_.robots.size(); ++i) {
                buffer_.push({prev_obs_[i], prev_action_[i], static_cast<float>(prev_reward_[i]),
                              cur_obs_[i], 0});
            }
        }

        // Rewards for this tick's actions.
        const std::vector<double> rewards = tick_rewards(metrics);
        for (std::size_t i = 0; i < world_.robots.size(); ++i) {
            episode_return_[i] += rewards[i];
            prev_reward_[i] = rewards[i];
        }
        prev_obs_ = cur_obs_;
        prev_action_ = cur_action_;
        prev_metrics_ = metrics;

        double loss = 0.0;
        if (buffer_.size() >= cfg_.warmup_transitions) {
            const auto idx = buffer_.sample_indices(static_cast<std::size_t>(cfg_.batch_size), sample_rng_);
            loss = td_update(online_, target_, buffer_, idx, adam_, cfg_.discount, dropout_rng_);
        }

        double ret_mean = 0.0;
        for (const double r : episode_return_) ret_mean += r;
        ret_mean /= static_cast<double>(episode_return_.size());
        log_.push_back({global_step_, eps, loss, ret_mean, metrics.coverage_a, metrics.coverage_b,
                        metrics.mixing});

        ++global_step_;
        if (global_step_ % cfg_.target_sync_interval == 0) sync_target(online_, target_);

        if (episode_tick_ == cfg_.episode_length) {
            finish_episode();
            if (!out_dir.empty() && global_step_ % cfg_.checkpoint_interval == 0)
                write_checkpoint(out_dir + "/ckpt_" + std::to_string(global_step_) + ".json");
        }
    }

    void write_checkpoint(const std::string& path) {
        nlohmann::json state;
        if (!world_ready_) { // episode boundary: trainer state is resumable
            state["scenario"] = scenario_to_json(scenario_);
            state["sim_config"] = sim_config_to_json(sim_cfg_);
            state["training_config"] = training_config_to_json(cfg_);
            state["hold_ticks"] = hold_;
            state["global_step"] = global_step_;
            state["episode"] = episode_;
            state["target_tensors"] = tensors_to_json(target_);
            nlohmann::json adam;
            adam["t"] = adam_.t_;
            adam["m"] = nlohmann::json::array();
            adam["v"] = nlohmann::json::array();
            if (adam_.m_.empty()) { // no update yet: zero moments
                for (auto* p : online_.params()) {
                    adam["m"].push_back(encode_f32(std::vector<float>(p->value.numel(), 0.0f)));
                    adam["v"].push_back(encode_f32(std::vector<float>(p->value.numel(), 0.0f)));
                }
            } else {
                for (const auto& m : adam_.m_) adam["m"].push_back(encode_f32(m.data));
                for (const auto& v : adam_.v_) adam["v"].push_back(encode_f32(v.data));
            }
            state["adam"] = adam;
            state["replay"] = detail::replay_to_json(buffer_);
            state["policy_rng"] = detail::rng_to_json(policy_rng_);
            state["dropout_rng"] = detail::rng_to_json(dropout_rng_);
            state["sample_rng"] = detail::rng_to_json(sample_rng_);
        }
        save_checkpoint(online_, path, state.is_null() ? nlohmann::json() : state);
    }

    void write_log_csv(const std::string& path) const;

    QNetwork<float>& online() { return online_; }
    QNetwork<float>& target() { return target_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    long global_step() const { return global_step_; }
    const std::vector<TrainLogRow>& log() const { return log_; }
    const TrainingConfig& config() const { return cfg_; }
    const SimConfig& sim_config() const { return sim_cfg_; }
    const ScenarioSpec& scenario() const { return scenario_; }
    int hold_ticks() const { return hold_; }

private:
    // Chooses actions during training ticks: epsilon-greedy with Standstill
    // latching, recording each robot's encoded observation and action.
    class TrainController final : public Controller {
    public:
        TrainController(Trainer& t, double eps) : t_(t), eps_(eps) {}

        MotionCommand decide(const SimConfig& cfg, RobotState& self, const ObservationFrame& frame,
                             Rng& rng) override {
            auto [tokens, mask] = encode_observation<float>(frame, cfg);
            EncodedObs& slot = t_.cur_obs_[static_cast<std::size_t>(self.id)];
            std::copy(tokens.data.begin(), tokens.data.end(), slot.tokens.begin());
            std::copy(mask.begin(), mask.end(), slot.mask.begin());

            ActionId action;
            if (self.rl.latch_remaining > 0) {
                action = ActionId::Standstill;
                --self.rl.latch_remaining;
            } else {
                if (t_.policy_rng_.uniform() < eps_) {
                    action = static_cast<ActionId>(t_.policy_rng_.uniform_index(kActionCount));
                } else {
                    const Tensor<float> q = t_.online_.forward(tokens, mask, Mode::Eval);
                    action = select_action(q.ptr(), 0.0, t_.policy_rng_);
                }
                if (action == ActionId::Standstill)
                    self.rl.latch_remaining = std::max(0, t_.hold_ - 1);
            }
            self.rl.last_action = static_cast<int>(action);
            t_.cur_action_[static_cast<std::size_t>(self.id)] = static_cast<int>(action);
            return act_to_motion(action, frame, cfg, rng);
        }

        std::string state_label(const RobotState& self) const override {
            return self.rl.last_action < 0 ? "Init"
                                           : to_string(static_cast<ActionId>(self.rl.last_action));
        }

    private:
        Trainer& t_;
        double eps_;
    };

    void start_episode() {
        SimConfig cfg = sim_cfg_;
        cfg.seed = derive_seed(sim_cfg_.seed, 0x100 + static_cast<std::uint64_t>(episode_));
        world_ = init_world(scenario_, cfg, 0);
        world_ready_ = true;
        episode_tick_ = 0;
        const std::size_t n = world_.robots.size();
        cur_obs_.assign(n, {});
        cur_action_.assign(n, 0);
        prev_obs_.assign(n, {});
        prev_action_.assign(n, 0);
        prev_reward_.assign(n, 0.0);
        episode_return_.assign(n, 0.0);
        moving_streak_.assign(n, 0);
        pos_history_.assign(n, {});
        prev_metrics_ = compute_metrics(world_);
        for (std::size_t i = 0; i < n; ++i) pos_history_[i].push_back(world_.robots[i].position);
    }

    void finish_episode() {
        // Terminal observations complete the last transitions with done = 1.
        const std::vector<ObservationFrame> frames = sense_all(world_);
        for (std::size_t i = 0; i < world_.robots.size(); ++i) {
            auto [tokens, mask] = encode_observation<float>(frames[i], sim_cfg_);
            EncodedObs terminal;
            std::copy(tokens.data.begin(), tokens.data.end(), terminal.tokens.begin());
            std::copy(mask.begin(), mask.end(), terminal.mask.begin());
            buffer_.push({cur_obs_[i], cur_action_[i], static_cast<float>(prev_reward_[i]),
                          terminal, 1});
        }
        ++episode_;
        world_ready_ = false;
    }

    // Per-robot rewards for the tick that just ran.
    std::vector<double> tick_rewards(const TickMetrics& metrics) {
        const std::size_t n = world_.robots.size();
        const double prox_threshold = cfg_.proximity_threshold_radii * sim_cfg_.robot_radius;
        const double dead_dist = cfg_.deadlock_displacement_radii * sim_cfg_.robot_radius;
        const SpatialGrid grid(world_.robots, sim_cfg_.arena_width, sim_cfg_.arena_height,
                               std::max(prox_threshold, 1.0));
        std::vector<double> rewards(n);
        for (std::size_t i = 0; i < n; ++i) {
            const RobotState& r = world_.robots[i];
            // Trailing displacement window.
            auto& hist = pos_history_[i];
            hist.push_back(r.position);
            if (hist.size() > static_cast<std::size_t>(cfg_.deadlock_window) + 1) hist.pop_front();
            const bool moving_action = cur_action_[i] != static_cast<int>(ActionId::Standstill);
            moving_streak_[i] = moving_action ? moving_streak_[i] + 1 : 0;
            bool deadlocked = false;
            if (moving_streak_[i] >= cfg_.deadlock_window &&
                hist.size() == static_cast<std::size_t>(cfg_.deadlock_window) + 1) {
                const double dx = hist.back().x - hist.front().x;
                const double dy = hist.back().y - hist.front().y;
                deadlocked = std::hypot(dx, dy) < dead_dist;
            }
            bool too_close = false;
            grid.for_candidates(r.position, [&](int jid) {
                if (jid == r.id || too_close) return;
                const auto& o = world_.robots[static_cast<std::size_t>(jid)];
                const double dx = o.position.x - r.position.x;
                const double dy = o.position.y - r.position.y;
                if (std::hypot(dx, dy) < prox_threshold) too_close = true;
            });
            RewardInputs in;
            in.cov_own_prev = r.swarm == Swarm::A ? prev_metrics_.coverage_a : prev_metrics_.coverage_b;
            in.cov_own_new = r.swarm == Swarm::A ? metrics.coverage_a : metrics.coverage_b;
            in.mix_prev = prev_metrics_.mixing;
            in.mix_new = metrics.mixing;
            in.deadlocked = deadlocked;
            in.too_close = too_close;
            rewards[i] = compute_reward(in, cfg_);
        }
        return rewards;
    }

    ScenarioSpec scenario_;
    SimConfig sim_cfg_;
    TrainingConfig cfg_;
    int hold_;

    QNetwork<float> online_;
    QNetwork<float> target_;
    ReplayBuffer buffer_;
    Adam<float> adam_;
    Rng policy_rng_, dropout_rng_, sample_rng_;

    WorldState world_;
    bool world_ready_ = false;
    long global_step_ = 0;
    long episode_ = 0;
    int episode_tick_ = 0;
    TickMetrics prev_metrics_;

    std::vector<EncodedObs> cur_obs_, prev_obs_;
    std::vector<int> cur_action_, prev_action_;
    std::vector<double> prev_reward_;
    std::vector<double> episode_return_;
    std::vector<int> moving_streak_;
    std::vector<std::deque<Point2>> pos_history_;
    std::vector<TrainLogRow> log_;

    friend class TrainController;
};

inline void Trainer::write_log_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write training log: " + path);
    out << "step,epsilon,loss,episode_return_mean,coverage_a,coverage_b,mixing\n";
    char buf[256];
    for (const auto& row : log_) {
        std::snprintf(buf, sizeof(buf), "%ld,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", row.step, row.epsilon,
                      row.loss, row.episode_return_mean, row.coverage_a, row.coverage_b, row.mixing);
        out << buf;
    }
}

// Runs a frozen policy for one episode (epsilon = 0, eval mode) and returns
// the per-tick metrics.
inline std::vector<TickMetrics> run_policy_episode(QNetwork<float>& net, const ScenarioSpec& scenario,
                                                   SimConfig cfg, int hold_ticks, std::uint64_t seed,
                                                   long steps) {
    cfg.seed = seed;
    WorldState world = init_world(scenario, cfg, 0);
    RlController controller(net, cfg, hold_ticks, 0.0);
    std::vector<TickMetrics> out;
    out.reserve(static_cast<std::size_t>(steps));
    for (long s = 0; s < steps; ++s) out.push_back(tick(world, controller));
    return out;
}

} // namespace swarmwall
