#pragma once

// The learned controller's value network: shared per-neighbor embedding
// (3 -> 128), batchnorm, ReLU, dropout, 4-head self-attention over the 7
// neighbor tokens, masked mean pooling, and a 4-action Q head. Tokens are
// processed symmetrically, so Q-values are invariant to neighbor order.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "swarmwall/nn.hpp"
#include "swarmwall/sim.hpp"

namespace swarmwall {

enum class ActionId : int {
    AvoidNestmate = 0,
    AvoidNonNestmate = 1,
    Standstill = 2,
    RandomWalk = 3,
};
inline constexpr int kActionCount = 4;

inline const char* to_string(ActionId a) {
    switch (a) {
    case ActionId::AvoidNestmate: return "AvoidNestmate";
    case ActionId::AvoidNonNestmate: return "AvoidNonNestmate";
    case ActionId::Standstill: return "Standstill";
    case ActionId::RandomWalk: return "RandomWalk";
    }
    return "?";
}

struct QNetHyper {
    long tokens = kNeighborSlots;
    long features = 3;
    long model_dim = 128;
    long heads = 4;
    long actions = kActionCount;
    double dropout_rate = 0.2;

    friend bool operator==(const QNetHyper&, const QNetHyper&) = default;
};

// Per-neighbor encoding: (distance / d_max clamped to [0,1], aoa / pi,
// nestmate bit), one mask bit per slot. A fully padded frame gets a single
// sentinel token (1, 0, 0) so attention always has one valid key.
template <typename T = float>
std::pair<Tensor<T>, std::vector<std::uint8_t>> encode_observation(const ObservationFrame& frame,
                                                                   const SimConfig& cfg) {
    Tensor<T> tokens({kNeighborSlots, 3});
    std::vector<std::uint8_t> mask(kNeighborSlots, 0);
    bool any = false;
    for (int i = 0; i < kNeighborSlots; ++i) {
        const auto& e = frame.neighbors[static_cast<std::size_t>(i)];
        T* row = tokens.ptr() + i * 3;
        row[0] = static_cast<T>(std::clamp(e.distance / cfg.sensing_range, 0.0, 1.0));
        row[1] = static_cast<T>(e.aoa / kPi);
        row[2] = e.same_swarm ? T(1) : T(0);
        mask[static_cast<std::size_t>(i)] = e.valid ? 1 : 0;
        any = any || e.valid;
    }
    if (!any) {
        T* row = tokens.ptr();
        row[0] = T(1);
        row[1] = T(0);
        row[2] = T(0);
        mask[0] = 1;
    }
    return {std::move(tokens), std::move(mask)};
}

template <typename T = float>
class QNetwork {
public:
    explicit QNetwork(QNetHyper hyper = {})
        : hyper_(hyper), embed(hyper.features, hyper.model_dim), bn(hyper.model_dim),
          dropout(hyper.dropout_rate), attn(hyper.model_dim, hyper.heads),
          head(hyper.model_dim, hyper.actions) {}

    void init(Rng& rng) {
        auto fill_normal = [&](Tensor<T>& t, double std) {
            for (auto& v : t.data) v = static_cast<T>(rng.normal(0.0, std));
        };
        fill_normal(embed.weight.value, std::sqrt(2.0 / static_cast<double>(hyper_.features)));
        embed.bias.value.fill(T(0));
        for (long h = 0; h < hyper_.heads; ++h) {
            const double std = std::sqrt(1.0 / static_cast<double>(hyper_.model_dim));
            fill_normal(attn.wq[static_cast<std::size_t>(h)].value, std);
            fill_normal(attn.wk[static_cast<std::size_t>(h)].value, std);
            fill_normal(attn.wv[static_cast<std::size_t>(h)].value, std);
        }
        fill_normal(attn.wo.value, std::sqrt(1.0 / static_cast<double>(hyper_.model_dim)));
        fill_normal(head.weight.value, std::sqrt(1.0 / static_cast<double>(hyper_.model_dim)));
        head.bias.value.fill(T(0));
    }

    // tokens: [B, 7, 3] (or [7, 3] for a single observation); mask: B*7.
    Tensor<T> forward(const Tensor<T>& tokens, const std::vector<std::uint8_t>& mask, Mode mode,
                      Rng* rng = nullptr) {
        Tensor<T> x = tokens;
        if (x.shape.size() == 2) x.shape = {1, x.shape[0], x.shape[1]};
        if (x.shape.size() != 3 || x.shape[1] != hyper_.tokens || x.shape[2] != hyper_.features)
            throw DimensionError("qnet: input must be [B, tokens, features]");
        const long b = x.shape[0];
        Tensor<T> flat = x;
        flat.shape = {b * hyper_.tokens, hyper_.features};
        Tensor<T> h1 = embed.forward(flat);
        h1 = bn.forward(h1, mode);
        h1 = relu.forward(h1);
        h1 = dropout.forward(h1, mode, rng);
        h1.shape = {b, hyper_.tokens, hyper_.model_dim};
        Tensor<T> h2 = attn.forward(h1, mask);
        Tensor<T> pooled = pool.forward(h2, mask);
        recorded_ = true;
        return head.forward(pooled);
    }

    // Accumulates parameter gradients from dq = dLoss/dQ, [B, actions].
    void backward(const Tensor<T>& dq) {
        if (!recorded_) throw Error("qnet: backward without forward");
        recorded_ = false;
        Tensor<T> d = head.backward(dq);
        d = pool.backward(d);
        d = attn.backward(d);
        d.shape = {d.shape[0] * d.shape[1], d.shape[2]};
        d = dropout.backward(d);
        d = relu.backward(d);
        d = bn.backward(d);
        embed.backward(d);
    }

    std::vector<Param<T>*> params() {
        std::vector<Param<T>*> out{&embed.weight, &embed.bias, &bn.gamma, &bn.beta};
        for (auto& p : attn.wq) out.push_back(&p);
        for (auto& p : attn.wk) out.push_back(&p);
        for (auto& p : attn.wv) out.push_back(&p);
        out.push_back(&attn.wo);
        out.push_back(&head.weight);
        out.push_back(&head.bias);
        return out;
    }

    // Checkpointable tensors: trainable parameters plus batchnorm running
    // statistics, in a fixed order.
    std::vector<std::pair<std::string, Tensor<T>*>> named_tensors() {
        std::vector<std::pair<std::string, Tensor<T>*>> out;
        out.emplace_back("embed.weight", &embed.weight.value);
        out.emplace_back("embed.bias", &embed.bias.value);
        out.emplace_back("bn.gamma", &bn.gamma.value);
        out.emplace_back("bn.beta", &bn.beta.value);
        out.emplace_back("bn.running_mean", &bn.running_mean);
        out.emplace_back("bn.running_var", &bn.running_var);
        for (long h = 0; h < hyper_.heads; ++h) {
            const std::string n = std::to_string(h);
            out.emplace_back("attn.wq" + n, &attn.wq[static_cast<std::size_t>(h)].value);
            out.emplace_back("attn.wk" + n, &attn.wk[static_cast<std::size_t>(h)].value);
            out.emplace_back("attn.wv" + n, &attn.wv[static_cast<std::size_t>(h)].value);
        }
        out.emplace_back("attn.wo", &attn.wo.value);
        out.emplace_back("head.weight", &head.weight.value);
        out.emplace_back("head.bias", &head.bias.value);
        return out;
    }

    void zero_grad() {
        for (auto* p : params()) p->zero_grad();
    }

    long param_count() {
        long n = 0;
        for (auto* p : params()) n += static_cast<long>(p->value.numel());
        return n;
    }

    void copy_from(QNetwork& other) {
        auto mine = named_tensors();
        auto theirs = other.named_tensors();
        for (std::size_t i = 0; i < mine.size(); ++i) *mine[i].second = *theirs[i].second;
    }

    const QNetHyper& hyper() const { return hyper_; }

    QNetHyper hyper_;
    Linear<T> embed;
    BatchNorm1d<T> bn;
    ReLU<T> relu;
    Dropout<T> dropout;
    MultiheadAttention<T> attn;
    MaskedMeanPool<T> pool;
    Linear<T> head;

private:
    bool recorded_ = false;
};

// Epsilon-greedy over 4 Q-values; greedy ties break toward the lowest
// action id.
template <typename T>
ActionId select_action(const T* q, double epsilon, Rng& rng) {
    if (epsilon > 0.0 && rng.uniform() < epsilon)
        return static_cast<ActionId>(rng.uniform_index(kActionCount));
    int best = 0;
    for (int a = 1; a < kActionCount; ++a)
        if (q[a] > q[best]) best = a;
    return static_cast<ActionId>(best);
}

// Maps a discrete action to this tick's motion. Flee actions head away
// from the nearest matching neighbor and fall back to a CRW step when none
// is visible.
inline MotionCommand act_to_motion(ActionId action, const ObservationFrame& frame,
                                   const SimConfig& cfg, Rng& rng) {
    switch (action) {
    case ActionId::AvoidNestmate:
        if (const auto* mate = detail::nearest_of(frame, true))
            return {cfg.speed, wrap_angle(mate->aoa + kPi + rng.normal(0.0, cfg.crw_sigma))};
        return {cfg.speed, rng.normal(0.0, cfg.crw_sigma)};
    case ActionId::AvoidNonNestmate:
        if (const auto* other = detail::nearest_of(frame, false))
            return {cfg.speed, wrap_angle(other->aoa + kPi)};
        return {cfg.speed, rng.normal(0.0, cfg.crw_sigma)};
    case ActionId::Standstill:
        return {0.0, 0.0};
    case ActionId::RandomWalk:
        return {cfg.speed, rng.normal(0.0, cfg.crw_sigma)};
    }
    return {};
}

// Decentralized deployment of a trained policy: greedy (or epsilon-greedy)
// action selection with Standstill latched for `hold_ticks` (the walling
// timer analog; the policy is not re-queried while latched).
class RlController final : public Controller {
public:
    RlController(QNetwork<float>& net, const SimConfig& cfg, int hold_ticks, double epsilon = 0.0)
        : net_(&net), hold_(hold_ticks), epsilon_(epsilon) {
        (void)cfg;
    }

    MotionCommand decide(const SimConfig& cfg, RobotState& self, const ObservationFrame& frame,
                         Rng& rng) override {
        ActionId action;
        if (self.rl.latch_remaining > 0) {
            action = ActionId::Standstill;
            --self.rl.latch_remaining;
        } else {
            auto [tokens, mask] = encode_observation<float>(frame, cfg);
            const Tensor<float> q = net_->forward(tokens, mask, Mode::Eval);
            action = select_action(q.ptr(), epsilon_, rng);
            if (action == ActionId::Standstill) self.rl.latch_remaining = std::max(0, hold_ - 1);
        }
        self.rl.last_action = static_cast<int>(action);
        return act_to_motion(action, frame, cfg, rng);
    }

    std::string state_label(const RobotState& self) const override {
        return self.rl.last_action < 0 ? "Init"
                                       : to_string(static_cast<ActionId>(self.rl.last_action));
    }

private:
    QNetwork<float>* net_;
    int hold_;
    double epsilon_;
};

} // namespace swarmwall
