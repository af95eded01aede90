#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "support/fd_check.hpp"
#include "support/oracles.hpp"
#include "swarmwall/checkpoint.hpp"
#include "swarmwall/qnet.hpp"

using namespace swarmwall;

namespace {

ObservationFrame frame_with(const std::vector<NeighborObservation>& entries, const SimConfig& cfg) {
    ObservationFrame f;
    for (std::size_t i = 0; i < entries.size(); ++i) f.neighbors[i] = entries[i];
    for (std::size_t i = entries.size(); i < kNeighborSlots; ++i) {
        f.neighbors[i].distance = cfg.sensing_range;
        f.neighbors[i].true_distance = cfg.sensing_range;
    }
    return f;
}

std::filesystem::path temp_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "swarmwall_qnet_test";
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_SUITE_BEGIN("qnet");

TEST_CASE("encoding normalization endpoints") {
    SimConfig cfg;
    const ObservationFrame f =
        frame_with({{cfg.sensing_range, 0.0, true, true, 1, cfg.sensing_range, false}}, cfg);
    const auto [tokens, mask] = encode_observation<double>(f, cfg);
    CHECK(tokens.data[0] == 1.0);
    CHECK(tokens.data[1] == 0.0);
    CHECK(tokens.data[2] == 1.0);
    CHECK(mask[0] == 1);
    CHECK(mask[1] == 0);
    // distances past d_max clamp to 1
    const ObservationFrame far =
        frame_with({{cfg.sensing_range * 1.5, -kPi / 2, false, true, 1, cfg.sensing_range, false}}, cfg);
    const auto [t2, m2] = encode_observation<double>(far, cfg);
    CHECK(t2.data[0] == 1.0);
    CHECK(t2.data[1] == doctest::Approx(-0.5));
    CHECK(t2.data[2] == 0.0);
}

TEST_CASE("fully padded frame gets a single sentinel token") {
    SimConfig cfg;
    const ObservationFrame f = frame_with({}, cfg);
    const auto [tokens, mask] = encode_observation<float>(f, cfg);
    CHECK(mask[0] == 1);
    for (int i = 1; i < kNeighborSlots; ++i) CHECK(mask[static_cast<std::size_t>(i)] == 0);
    CHECK(tokens.data[0] == 1.0f);
    CHECK(tokens.data[1] == 0.0f);
    CHECK(tokens.data[2] == 0.0f);
}

TEST_CASE("encoding round-trips distance and bearing") {
    SimConfig cfg;
    Rng rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        const double d = rng.uniform(0, cfg.sensing_range);
        const double aoa = rng.uniform(-kPi, kPi);
        const ObservationFrame f = frame_with({{d, aoa, false, true, 1, d, false}}, cfg);
        const auto [tokens, mask] = encode_observation<double>(f, cfg);
        CHECK(std::abs(tokens.data[0] * cfg.sensing_range - d) < 1e-6);
        CHECK(std::abs(tokens.data[1] * kPi - aoa) < 1e-6);
    }
}

TEST_CASE("zero parameters collapse the Q-values to the head bias") {
    QNetwork<double> net;
    net.bn.gamma.value.fill(0.0); // zero out even the batchnorm scale
    net.head.bias.value.data = {0.5, -1.0, 0.25, 2.0};
    SimConfig cfg;
    Rng rng(42);
    ObservationFrame f = frame_with({{30.0, 0.5, true, true, 1, 30.0, false},
                                     {60.0, -0.5, false, true, 2, 60.0, false}},
                                    cfg);
    const auto [tokens, mask] = encode_observation<double>(f, cfg);
    const Tensor<double> q = net.forward(tokens, mask, Mode::Eval);
    CHECK(q.data[0] == doctest::Approx(0.5));
    CHECK(q.data[1] == doctest::Approx(-1.0));
    CHECK(q.data[2] == doctest::Approx(0.25));
    CHECK(q.data[3] == doctest::Approx(2.0));
}

TEST_CASE("permuting valid neighbors leaves the Q-values unchanged") {
    Rng rng(43);
    QNetwork<float> net;
    for (int trial = 0; trial < 25; ++trial) {
        Rng init(derive_seed(43, static_cast<std::uint64_t>(trial)));
        net.init(init);
        const int valid = 2 + static_cast<int>(init.uniform_index(6));
        Tensor<float> tokens({kNeighborSlots, 3});
        std::vector<std::uint8_t> mask(kNeighborSlots, 0);
        for (int s = 0; s < valid; ++s) {
            tokens.ptr()[s * 3 + 0] = static_cast<float>(init.uniform());
            tokens.ptr()[s * 3 + 1] = static_cast<float>(init.uniform(-1, 1));
            tokens.ptr()[s * 3 + 2] = init.uniform() < 0.5 ? 0.0f : 1.0f;
            mask[static_cast<std::size_t>(s)] = 1;
        }
        const Tensor<float> q0 = net.forward(tokens, mask, Mode::Eval);
        // random permutation of the valid prefix
        Tensor<float> perm = tokens;
        std::vector<int> order(static_cast<std::size_t>(valid));
        for (int i = 0; i < valid; ++i) order[static_cast<std::size_t>(i)] = i;
        for (int i = valid - 1; i > 0; --i)
            std::swap(order[static_cast<std::size_t>(i)],
                      order[static_cast<std::size_t>(init.uniform_index(static_cast<std::uint64_t>(i + 1)))]);
        for (int s = 0; s < valid; ++s)
            for (int c = 0; c < 3; ++c)
                perm.ptr()[s * 3 + c] = tokens.ptr()[order[static_cast<std::size_t>(s)] * 3 + c];
        const Tensor<float> q1 = net.forward(perm, mask, Mode::Eval);
        for (int a = 0; a < kActionCount; ++a)
            CHECK(std::abs(q0.data[static_cast<std::size_t>(a)] -
                           q1.data[static_cast<std::size_t>(a)]) <= 1e-6f);
    }
}

TEST_CASE("eval-mode forward is deterministic and batch copies agree") {
    Rng init(44);
    QNetwork<float> net;
    net.init(init);
    Tensor<float> tokens({2, kNeighborSlots, 3});
    std::vector<std::uint8_t> mask(2 * kNeighborSlots, 0);
    for (int b = 0; b < 2; ++b)
        for (int s = 0; s < 4; ++s) {
            tokens.ptr()[(b * kNeighborSlots + s) * 3 + 0] = 0.25f * static_cast<float>(s + 1);
            tokens.ptr()[(b * kNeighborSlots + s) * 3 + 1] = 0.1f * static_cast<float>(s);
            tokens.ptr()[(b * kNeighborSlots + s) * 3 + 2] = static_cast<float>(s % 2);
            mask[static_cast<std::size_t>(b * kNeighborSlots + s)] = 1;
        }
    const Tensor<float> q1 = net.forward(tokens, mask, Mode::Eval);
    const Tensor<float> q2 = net.forward(tokens, mask, Mode::Eval);
    for (std::size_t i = 0; i < q1.numel(); ++i) CHECK(q1.data[i] == q2.data[i]);
    for (int a = 0; a < kActionCount; ++a)
        CHECK(q1.data[static_cast<std::size_t>(a)] ==
              q1.data[static_cast<std::size_t>(kActionCount + a)]);
}

TEST_CASE("parameter count is fixed") {
    QNetwork<float> net;
    CHECK(net.param_count() == 66820);
}

TEST_CASE("backward without a recorded forward is rejected") {
    QNetwork<float> net;
    Tensor<float> dq({1, kActionCount});
    CHECK_THROWS_AS(net.backward(dq), Error);
}

TEST_CASE("per-decision inference work does not depend on swarm size") {
    // The observation is always 7 tokens, so a decision costs the same in a
    // 20-robot or a 200-robot world.
    SimConfig cfg;
    ScenarioSpec small, large;
    small.case_id = large.case_id = 3;
    small.n_a = small.n_b = 10;
    large.n_a = large.n_b = 100;
    cfg.seed = 77;
    WorldState w_small = init_world(small, cfg, 0);
    WorldState w_large = init_world(large, cfg, 0);
    const auto f_small = sense(w_small, 0);
    const auto f_large = sense(w_large, 0);
    const auto [t1, m1] = encode_observation<float>(f_small, cfg);
    const auto [t2, m2] = encode_observation<float>(f_large, cfg);
    CHECK(t1.shape == t2.shape);
    CHECK(m1.size() == m2.size());
    Rng init(7);
    QNetwork<float> net;
    net.init(init);
    auto time_decisions = [&](const Tensor<float>& tokens, const std::vector<std::uint8_t>& mask) {
        const auto t0 = std::chrono::steady_clock::now();
        for (int i = 0; i < 200; ++i) net.forward(tokens, mask, Mode::Eval);
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    time_decisions(t1, m1); // warm up
    const double a = time_decisions(t1, m1);
    const double b = time_decisions(t2, m2);
    // soft timing check; scheduling noise can stretch either sample
    WARN_LT(std::max(a, b) / std::min(a, b), 2.0);
}

TEST_CASE("greedy selection takes the argmax with lowest-id ties") {
    Rng rng(45);
    const float q1[4] = {0.1f, 0.9f, 0.3f, 0.2f};
    CHECK(select_action(q1, 0.0, rng) == ActionId::AvoidNonNestmate);
    const float q2[4] = {1.0f, 1.0f, 0.0f, 0.0f};
    CHECK(select_action(q2, 0.0, rng) == ActionId::AvoidNestmate);
    // argmax is invariant under positive affine transforms
    const float q3[4] = {2.0f * 0.1f + 3, 2.0f * 0.9f + 3, 2.0f * 0.3f + 3, 2.0f * 0.2f + 3};
    CHECK(select_action(q3, 0.0, rng) == ActionId::AvoidNonNestmate);
}

TEST_CASE("epsilon = 1 explores uniformly") {
    Rng rng(46);
    const float q[4] = {5.0f, 1.0f, 0.0f, -3.0f};
    std::vector<long> counts(4, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(select_action(q, 1.0, rng))];
    for (const long c : counts) {
        CHECK(static_cast<double>(c) / n >= 0.24);
        CHECK(static_cast<double>(c) / n <= 0.26);
    }
}

TEST_CASE("actions map to the expected motions") {
    SimConfig cfg;
    cfg.crw_sigma = 0.0;
    Rng rng(47);
    ObservationFrame f = frame_with({{20.0, 0.0, false, true, 1, 20.0, false},
                                     {25.0, 1.0, true, true, 2, 25.0, false}},
                                    cfg);
    const MotionCommand stand = act_to_motion(ActionId::Standstill, f, cfg, rng);
    CHECK(stand.speed == 0.0);
    const MotionCommand flee = act_to_motion(ActionId::AvoidNonNestmate, f, cfg, rng);
    CHECK(flee.speed == cfg.speed);
    CHECK(std::abs(flee.heading_delta) == doctest::Approx(kPi)); // anti-bearing of aoa 0
    const MotionCommand avoid_mate = act_to_motion(ActionId::AvoidNestmate, f, cfg, rng);
    CHECK(avoid_mate.speed == cfg.speed);
    CHECK(avoid_mate.heading_delta == doctest::Approx(wrap_angle(1.0 + kPi)));
    // no matching neighbor: CRW fallback at full speed
    ObservationFrame mates_only = frame_with({{25.0, 1.0, true, true, 2, 25.0, false}}, cfg);
    const MotionCommand fallback = act_to_motion(ActionId::AvoidNonNestmate, mates_only, cfg, rng);
    CHECK(fallback.speed == cfg.speed);
    CHECK(fallback.heading_delta == 0.0); // sigma 0
    const MotionCommand walk = act_to_motion(ActionId::RandomWalk, f, cfg, rng);
    CHECK(walk.speed == cfg.speed);
}

TEST_CASE("standstill latches the policy for the hold duration") {
    SimConfig cfg;
    cfg.noise_sigma_d = 0;
    cfg.noise_sigma_theta = 0;
    QNetwork<float> net; // zero weights: Q = bias
    net.bn.gamma.value.fill(0.0f);
    net.head.bias.value.data = {0.0f, 0.0f, 1.0f, 0.0f}; // favors Standstill
    RlController controller(net, cfg, 30);
    RobotState self;
    self.id = 0;
    ObservationFrame f = frame_with({{40.0, 0.3, false, true, 1, 40.0, false}}, cfg);
    Rng rng(48);
    int standstill_ticks = 0;
    MotionCommand cmd = controller.decide(cfg, self, f, rng);
    CHECK(cmd.speed == 0.0);
    ++standstill_ticks;
    // policy now prefers RandomWalk, but the latch must keep holding
    net.head.bias.value.data = {0.0f, 0.0f, 0.0f, 1.0f};
    for (int t = 0; t < 40; ++t) {
        cmd = controller.decide(cfg, self, f, rng);
        if (cmd.speed == 0.0 && self.rl.last_action == static_cast<int>(ActionId::Standstill))
            ++standstill_ticks;
        else
            break;
    }
    CHECK(standstill_ticks == 30);
    CHECK(self.rl.last_action == static_cast<int>(ActionId::RandomWalk));
}

TEST_CASE("hold zero re-queries every tick") {
    SimConfig cfg;
    QNetwork<float> net;
    net.bn.gamma.value.fill(0.0f);
    net.head.bias.value.data = {0.0f, 0.0f, 1.0f, 0.0f};
    RlController controller(net, cfg, 0);
    RobotState self;
    ObservationFrame f = frame_with({{40.0, 0.3, false, true, 1, 40.0, false}}, cfg);
    Rng rng(49);
    controller.decide(cfg, self, f, rng);
    CHECK(self.rl.latch_remaining == 0);
    net.head.bias.value.data = {0.0f, 0.0f, 0.0f, 1.0f};
    const MotionCommand cmd = controller.decide(cfg, self, f, rng);
    CHECK(cmd.speed == cfg.speed); // switched immediately
}

TEST_CASE("checkpoints round-trip bitwise") {
    const auto dir = temp_dir();
    const std::string path = (dir / "net.json").string();
    Rng init(50);
    QNetwork<float> net;
    net.init(init);
    net.bn.running_mean.data[3] = 0.123f;
    save_checkpoint(net, path);
    QNetwork<float> loaded;
    const nlohmann::json state = load_checkpoint(loaded, path);
    CHECK(state.is_null());
    auto a = net.named_tensors();
    auto b = loaded.named_tensors();
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].second->data.size() == b[i].second->data.size());
        for (std::size_t j = 0; j < a[i].second->data.size(); ++j)
            CHECK(std::bit_cast<std::uint32_t>(a[i].second->data[j]) ==
                  std::bit_cast<std::uint32_t>(b[i].second->data[j]));
    }
}

TEST_CASE("checkpoint load failures are distinct") {
    const auto dir = temp_dir();
    Rng init(51);
    QNetwork<float> net;
    net.init(init);
    const std::string good = (dir / "good.json").string();
    save_checkpoint(net, good);

    QNetwork<float> probe;
    // truncated file
    {
        std::ifstream in(good);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::ofstream out((dir / "trunc.json").string());
        out << text.substr(0, text.size() / 2);
    }
    CHECK_THROWS_AS(load_checkpoint(probe, (dir / "trunc.json").string()), CheckpointCorruptError);
    // altered shape field
    {
        std::ifstream in(good);
        nlohmann::json doc = nlohmann::json::parse(in);
        doc["tensors"]["embed.weight"]["shape"] = {4, 128};
        std::ofstream out((dir / "shape.json").string());
        out << doc.dump();
    }
    CHECK_THROWS_AS(load_checkpoint(probe, (dir / "shape.json").string()), CheckpointShapeError);
    // wrong version
    {
        std::ifstream in(good);
        nlohmann::json doc = nlohmann::json::parse(in);
        doc["format_version"] = "999";
        std::ofstream out((dir / "vers.json").string());
        out << doc.dump();
    }
    CHECK_THROWS_AS(load_checkpoint(probe, (dir / "vers.json").string()), CheckpointVersionError);
    // corrupted tensor payload
    {
        std::ifstream in(good);
        nlohmann::json doc = nlohmann::json::parse(in);
        doc["tensors"]["head.bias"]["data"] = "AAAA"; // 3 bytes, needs 16
        std::ofstream out((dir / "data.json").string());
        out << doc.dump();
    }
    CHECK_THROWS_AS(load_checkpoint(probe, (dir / "data.json").string()), CheckpointCorruptError);
    // missing file
    CHECK_THROWS_AS(load_checkpoint(probe, (dir / "nope.json").string()), CheckpointCorruptError);
}

TEST_CASE("staged finite-difference oracle matches the plain full recompute") {
    Rng rng(52);
    QNetwork<double> net;
    fdcheck::fill_gradcheck_net(net, rng);
    fdcheck::Net oracle_net = fdcheck::Net::from(net);
    const fdcheck::Problem problem = fdcheck::make_gradcheck_problem(oracle_net, rng, 3);
    fdcheck::StagedEvaluator staged(oracle_net, problem);
    const auto params = fdcheck::enumerate_params(oracle_net);
    REQUIRE(params.size() == 66820);
    // the staged path must equal a plain perturbed recompute bit-for-bit
    // at the 1e-12 level, across every parameter class
    Rng pick(53);
    for (int trial = 0; trial < 400; ++trial) {
        const auto& ref = params[pick.uniform_index(params.size())];
        const double delta = pick.uniform(-2e-3, 2e-3);
        fdcheck::Net perturbed = oracle_net;
        fdcheck::slot_ref(perturbed, ref) += delta;
        const double full = fdcheck::loss_full(perturbed, problem);
        const double fast = staged.loss_with(ref, delta);
        CHECK(std::abs(full - fast) <= 1e-12 * std::max(1.0, std::abs(full)));
    }
}

TEST_CASE("production TD loss equals the oracle forward") {
    Rng rng(54);
    QNetwork<double> net;
    fdcheck::fill_gradcheck_net(net, rng);
    fdcheck::Net oracle_net = fdcheck::Net::from(net);
    const fdcheck::Problem problem = fdcheck::make_gradcheck_problem(oracle_net, rng, 4);
    const auto [loss, grads] = fdcheck::analytic_loss_and_grads(net, problem);
    const double oracle_loss = fdcheck::loss_full(oracle_net, problem);
    CHECK(std::abs(loss - oracle_loss) <= 1e-10 * std::max(1.0, std::abs(oracle_loss)));
    CHECK(grads.size() == 66820);
}

TEST_CASE("analytic network gradients agree with central differences on a sample") {
    Rng rng(55);
    QNetwork<double> net;
    fdcheck::fill_gradcheck_net(net, rng);
    fdcheck::Net oracle_net = fdcheck::Net::from(net);
    const fdcheck::Problem problem = fdcheck::make_gradcheck_problem(oracle_net, rng, 3);
    REQUIRE(fdcheck::min_kink_margin(oracle_net, problem) > 0.01);
    const auto [loss, grads] = fdcheck::analytic_loss_and_grads(net, problem);
    (void)loss;
    fdcheck::StagedEvaluator staged(oracle_net, problem);
    const auto params = fdcheck::enumerate_params(oracle_net);
    Rng pick(56);
    const double h = 1e-3;
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t pi = pick.uniform_index(params.size());
        const double num =
            (staged.loss_with(params[pi], h) - staged.loss_with(params[pi], -h)) / (2 * h);
        const double ana = grads[pi];
        const double denom = std::max({std::abs(num), std::abs(ana), 1e-6});
        CHECK(std::abs(num - ana) / denom < 1e-4);
    }
}

TEST_SUITE_END();
