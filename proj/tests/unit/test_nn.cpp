#include <doctest.h>

#include "support/fd_check.hpp"
#include "support/oracles.hpp"
#include "swarmwall/nn.hpp"

using namespace swarmwall;

namespace {

Tensor<double> random_tensor(std::vector<long> shape, Rng& rng, double lo = -1, double hi = 1) {
    Tensor<double> t(std::move(shape));
    for (auto& v : t.data) v = rng.uniform(lo, hi);
    return t;
}

// Central difference of `loss()` w.r.t. one tensor entry.
template <typename LossFn>
double fd(Tensor<double>& t, std::size_t i, LossFn&& loss, double h = 1e-5) {
    const double saved = t.data[i];
    t.data[i] = saved + h;
    const double hi = loss();
    t.data[i] = saved - h;
    const double lo = loss();
    t.data[i] = saved;
    return (hi - lo) / (2 * h);
}

bool close_rel(double a, double b, double tol) {
    const double denom = std::max(std::abs(a), std::abs(b));
    if (denom < 1e-10) return true;
    return std::abs(a - b) / denom < tol;
}

} // namespace

TEST_SUITE_BEGIN("nn");

TEST_CASE("linear with identity weight is the identity") {
    Linear<double> lin(3, 3);
    for (int i = 0; i < 3; ++i) lin.weight.value.data[static_cast<std::size_t>(i * 3 + i)] = 1.0;
    Rng rng(1);
    const Tensor<double> x = random_tensor({4, 3}, rng);
    Tensor<double> xc = x;
    const Tensor<double> y = lin.forward(xc);
    for (std::size_t i = 0; i < x.numel(); ++i) CHECK(y.data[i] == x.data[i]);
}

TEST_CASE("linear hand example") {
    Linear<double> lin(2, 1);
    lin.weight.value.data = {1.0, 1.0};
    lin.bias.value.data = {0.5};
    Tensor<double> x({1, 2});
    x.data = {1.0, 2.0};
    CHECK(lin.forward(x).data[0] == doctest::Approx(3.5));
}

TEST_CASE("linear matches a naive triple-loop matmul") {
    Rng rng(7);
    Linear<float> lin(13, 9);
    for (auto& v : lin.weight.value.data) v = static_cast<float>(rng.uniform(-1, 1));
    for (auto& v : lin.bias.value.data) v = static_cast<float>(rng.uniform(-1, 1));
    Tensor<float> x({6, 13});
    for (auto& v : x.data) v = static_cast<float>(rng.uniform(-1, 1));
    const Tensor<float> y = lin.forward(x);
    for (long b = 0; b < 6; ++b)
        for (long j = 0; j < 9; ++j) {
            double acc = lin.bias.value.data[static_cast<std::size_t>(j)];
            for (long i = 0; i < 13; ++i)
                acc += static_cast<double>(x.data[static_cast<std::size_t>(b * 13 + i)]) *
                       lin.weight.value.data[static_cast<std::size_t>(i * 9 + j)];
            CHECK(close_rel(acc, y.data[static_cast<std::size_t>(b * 9 + j)], 1e-5));
        }
}

TEST_CASE("linear rejects shape mismatches and premature backward") {
    Linear<double> lin(3, 2);
    Tensor<double> bad({2, 4});
    CHECK_THROWS_AS(lin.forward(bad), DimensionError);
    Tensor<double> dy({2, 2});
    CHECK_THROWS_AS(lin.backward(dy), Error);
}

TEST_CASE("linear gradient: loss = sum(xW) replicates x in dW") {
    Rng rng(3);
    Linear<double> lin(4, 3, false);
    for (auto& v : lin.weight.value.data) v = rng.uniform(-1, 1);
    const Tensor<double> x = random_tensor({5, 4}, rng);
    Tensor<double> xc = x;
    lin.forward(xc);
    Tensor<double> dy({5, 3});
    dy.fill(1.0);
    lin.backward(dy);
    for (long i = 0; i < 4; ++i) {
        double col = 0;
        for (long b = 0; b < 5; ++b) col += x.data[static_cast<std::size_t>(b * 4 + i)];
        for (long j = 0; j < 3; ++j)
            CHECK(lin.weight.grad.data[static_cast<std::size_t>(i * 3 + j)] == doctest::Approx(col));
    }
}

TEST_CASE("linear gradients agree with finite differences") {
    Rng rng(11);
    Linear<double> lin(6, 4);
    for (auto& v : lin.weight.value.data) v = rng.uniform(-1, 1);
    for (auto& v : lin.bias.value.data) v = rng.uniform(-1, 1);
    Tensor<double> x = random_tensor({7, 6}, rng);
    auto loss = [&] {
        Linear<double> local = lin;
        Tensor<double> xc = x;
        const Tensor<double> y = local.forward(xc);
        double s = 0;
        for (std::size_t i = 0; i < y.numel(); ++i) s += y.data[i] * y.data[i];
        return 0.5 * s;
    };
    Tensor<double> xc = x;
    const Tensor<double> y = lin.forward(xc);
    Tensor<double> dy = y;
    const Tensor<double> dx = lin.backward(dy);
    for (std::size_t i = 0; i < lin.weight.value.numel(); ++i)
        CHECK(close_rel(lin.weight.grad.data[i], fd(lin.weight.value, i, loss), 1e-6));
    for (std::size_t i = 0; i < lin.bias.value.numel(); ++i)
        CHECK(close_rel(lin.bias.grad.data[i], fd(lin.bias.value, i, loss), 1e-6));
    for (std::size_t i = 0; i < x.numel(); ++i)
        CHECK(close_rel(dx.data[i], fd(x, i, loss), 1e-6));
}

TEST_CASE("batchnorm eval with identity statistics is the identity") {
    BatchNorm1d<double> bn(5, 0.1, 0.0);
    Rng rng(5);
    Tensor<double> x = random_tensor({4, 5}, rng);
    const Tensor<double> y = bn.forward(x, Mode::Eval);
    for (std::size_t i = 0; i < x.numel(); ++i) CHECK(y.data[i] == doctest::Approx(x.data[i]));
}

TEST_CASE("batchnorm train mode normalizes each feature") {
    BatchNorm1d<double> bn(3);
    Rng rng(6);
    Tensor<double> x = random_tensor({64, 3}, rng, -5, 9);
    const Tensor<double> y = bn.forward(x, Mode::Train);
    for (long f = 0; f < 3; ++f) {
        double m = 0, v = 0;
        for (long b = 0; b < 64; ++b) m += y.data[static_cast<std::size_t>(b * 3 + f)];
        m /= 64;
        for (long b = 0; b < 64; ++b) {
            const double d = y.data[static_cast<std::size_t>(b * 3 + f)] - m;
            v += d * d;
        }
        v /= 64;
        CHECK(std::abs(m) < 1e-5);
        CHECK(std::abs(v - 1.0) < 1e-3);
    }
}

TEST_CASE("batchnorm train on a constant feature yields beta") {
    BatchNorm1d<double> bn(2);
    bn.beta.value.data = {0.7, -0.3};
    Tensor<double> x({8, 2});
    for (long b = 0; b < 8; ++b) {
        x.data[static_cast<std::size_t>(b * 2)] = 4.2;
        x.data[static_cast<std::size_t>(b * 2 + 1)] = -1.1;
    }
    const Tensor<double> y = bn.forward(x, Mode::Train);
    for (long b = 0; b < 8; ++b) {
        CHECK(y.data[static_cast<std::size_t>(b * 2)] == doctest::Approx(0.7));
        CHECK(y.data[static_cast<std::size_t>(b * 2 + 1)] == doctest::Approx(-0.3));
    }
}

TEST_CASE("batchnorm rejects a train batch of one") {
    BatchNorm1d<double> bn(4);
    Tensor<double> x({1, 4});
    CHECK_THROWS_AS(bn.forward(x, Mode::Train), InvalidBatchError);
    CHECK_NOTHROW(bn.forward(x, Mode::Eval));
}

TEST_CASE("batchnorm running statistics move with momentum 0.1") {
    BatchNorm1d<double> bn(1);
    Tensor<double> x({4, 1});
    x.data = {1.0, 3.0, 5.0, 7.0}; // mean 4, biased var 5, unbiased 20/3
    bn.forward(x, Mode::Train);
    CHECK(bn.running_mean.data[0] == doctest::Approx(0.9 * 0.0 + 0.1 * 4.0));
    CHECK(bn.running_var.data[0] == doctest::Approx(0.9 * 1.0 + 0.1 * (20.0 / 3.0)));
}

TEST_CASE("batchnorm gradients agree with finite differences in both modes") {
    for (const Mode mode : {Mode::Train, Mode::Eval}) {
        CAPTURE(mode == Mode::Train);
        BatchNorm1d<double> bn(4);
        Rng rng(8);
        for (auto& v : bn.gamma.value.data) v = rng.uniform(0.5, 1.5);
        for (auto& v : bn.beta.value.data) v = rng.uniform(-1, 1);
        for (auto& v : bn.running_mean.data) v = rng.uniform(-0.5, 0.5);
        for (auto& v : bn.running_var.data) v = rng.uniform(0.5, 2.0);
        Tensor<double> x = random_tensor({6, 4}, rng);
        auto loss = [&] {
            BatchNorm1d<double> local = bn;
            Tensor<double> xc = x;
            const Tensor<double> y = local.forward(xc, mode);
            double s = 0;
            for (std::size_t i = 0; i < y.numel(); ++i) s += std::sin(static_cast<double>(i)) * y.data[i];
            return s;
        };
        BatchNorm1d<double> net = bn;
        Tensor<double> xc = x;
        const Tensor<double> y = net.forward(xc, mode);
        (void)y;
        Tensor<double> dy({6, 4});
        for (std::size_t i = 0; i < dy.numel(); ++i) dy.data[i] = std::sin(static_cast<double>(i));
        const Tensor<double> dx = net.backward(dy);
        for (std::size_t i = 0; i < bn.gamma.value.numel(); ++i)
            CHECK(close_rel(net.gamma.grad.data[i], fd(bn.gamma.value, i, loss), 1e-6));
        for (std::size_t i = 0; i < bn.beta.value.numel(); ++i)
            CHECK(close_rel(net.beta.grad.data[i], fd(bn.beta.value, i, loss), 1e-6));
        for (std::size_t i = 0; i < x.numel(); ++i)
            CHECK(close_rel(dx.data[i], fd(x, i, loss), 1e-6));
    }
}

TEST_CASE("dropout eval mode and rate zero are exact identities") {
    Rng rng(13);
    Dropout<double> drop(0.2);
    Tensor<double> x = random_tensor({10, 10}, rng);
    const Tensor<double> y_eval = drop.forward(x, Mode::Eval, nullptr);
    for (std::size_t i = 0; i < x.numel(); ++i) CHECK(y_eval.data[i] == x.data[i]);
    Dropout<double> none(0.0);
    const Tensor<double> y_zero = none.forward(x, Mode::Train, &rng);
    for (std::size_t i = 0; i < x.numel(); ++i) CHECK(y_zero.data[i] == x.data[i]);
    CHECK_THROWS_AS(Dropout<double>(1.0), InvalidInputError);
}

TEST_CASE("dropout zeroes the configured fraction and rescales the rest") {
    Rng rng(14);
    Dropout<double> drop(0.2);
    Tensor<double> x({1000, 1000});
    x.fill(1.0);
    const Tensor<double> y = drop.forward(x, Mode::Train, &rng);
    std::size_t zeros = 0;
    for (const double v : y.data) {
        if (v == 0.0)
            ++zeros;
        else
            CHECK(v == doctest::Approx(1.0 / 0.8));
    }
    const double frac = static_cast<double>(zeros) / static_cast<double>(y.numel());
    CHECK(frac >= 0.198);
    CHECK(frac <= 0.202);
}

TEST_CASE("dropout backward passes gradients through kept units only") {
    Rng rng(15);
    Dropout<double> drop(0.4);
    Tensor<double> x = random_tensor({5, 6}, rng);
    const auto state = rng.state();
    auto loss = [&] {
        Rng r;
        r.set_state(state); // same mask on every evaluation
        Dropout<double> d(0.4);
        Tensor<double> xc = x;
        const Tensor<double> y = d.forward(xc, Mode::Train, &r);
        double s = 0;
        for (std::size_t i = 0; i < y.numel(); ++i) s += y.data[i] * y.data[i];
        return 0.5 * s;
    };
    Rng r2;
    r2.set_state(state);
    Tensor<double> xc = x;
    const Tensor<double> y = drop.forward(xc, Mode::Train, &r2);
    Tensor<double> dy = y;
    const Tensor<double> dx = drop.backward(dy);
    for (std::size_t i = 0; i < x.numel(); ++i)
        CHECK(close_rel(dx.data[i], fd(x, i, loss), 1e-6));
}

TEST_CASE("attention with a single valid token reproduces its value projection") {
    Rng rng(16);
    MultiheadAttention<double> attn(8, 2);
    for (auto& p : attn.wq) for (auto& v : p.value.data) v = rng.uniform(-1, 1);
    for (auto& p : attn.wk) for (auto& v : p.value.data) v = rng.uniform(-1, 1);
    for (auto& p : attn.wv) for (auto& v : p.value.data) v = rng.uniform(-1, 1);
    for (auto& v : attn.wo.value.data) v = rng.uniform(-1, 1);
    Tensor<double> x = random_tensor({1, 4, 8}, rng);
    const std::vector<std::uint8_t> mask{1, 0, 0, 0};
    const Tensor<double> y = attn.forward(x, mask);
    // expected: concat of per-head value projections of token 0, times wo
    std::vector<double> concat(8, 0.0);
    for (long h = 0; h < 2; ++h)
        for (long c = 0; c < 4; ++c)
            for (long d = 0; d < 8; ++d)
                concat[static_cast<std::size_t>(h * 4 + c)] +=
                    x.data[static_cast<std::size_t>(d)] *
                    attn.wv[static_cast<std::size_t>(h)].value.data[static_cast<std::size_t>(d * 4 + c)];
    for (long d = 0; d < 8; ++d) {
        double want = 0;
        for (long c = 0; c < 8; ++c)
            want += concat[static_cast<std::size_t>(c)] *
                    attn.wo.value.data[static_cast<std::size_t>(c * 8 + d)];
        CHECK(y.data[static_cast<std::size_t>(d)] == doctest::Approx(want));
    }
    CHECK(attn.attention_row(0, 0, 0)[0] == doctest::Approx(1.0));
    // padded rows are exactly zero
    for (long s = 1; s < 4; ++s)
        for (long d = 0; d < 8; ++d)
            CHECK(y.data[static_cast<std::size_t>(s * 8 + d)] == 0.0);
}

TEST_CASE("attention weights per query sum to one over valid keys") {
    Rng rng(17);
    MultiheadAttention<double> attn(8, 2);
    for (auto& p : attn.wq) for (auto& v : p.value.data) v = rng.uniform(-1, 1);
    for (auto& p : attn.wk) for (auto& v : p.value.data) v = rng.uniform(-1, 1);
    for (auto& p : attn.wv) for (auto& v : p.value.data) v = rng.uniform(-1, 1);
    for (auto& v : attn.wo.value.data) v = rng.uniform(-1, 1);
    Tensor<double> x = random_tensor({2, 5, 8}, rng);
    const std::vector<std::uint8_t> mask{1, 1, 1, 0, 0, 1, 1, 1, 1, 1};
    attn.forward(x, mask);
    for (long h = 0; h < 2; ++h)
        for (long b = 0; b < 2; ++b)
            for (long i = 0; i < 5; ++i) {
                if (!mask[static_cast<std::size_t>(b * 5 + i)]) continue;
                double sum = 0;
                for (long j = 0; j < 5; ++j) {
                    const double a = attn.attention_row(h, b, i)[j];
                    if (!mask[static_cast<std::size_t>(b * 5 + j)]) CHECK(a == 0.0);
                    sum += a;
                }
                CHECK(sum == doctest::Approx(1.0));
            }
}

TEST_CASE("attention rejects an all-masked row") {
    MultiheadAttention<double> attn(8, 2);
    Tensor<double> x({1, 3, 8});
    CHECK_THROWS_AS(attn.forward(x, {0, 0, 0}), InvalidMaskError);
}

TEST_CASE("permuting valid tokens permutes attention outputs identically") {
    Rng rng(18);
    MultiheadAttention<double> attn(8, 2);
    for (auto& p : attn.wq) for (auto& v : p.value.data) v = rng.uniform(-1, 1);
    for (auto& p : attn.wk) for (auto& v : p.value.data) v = rng.uniform(-1, 1);
    for (auto& p : attn.wv) for (auto& v : p.value.data) v = rng.uniform(-1, 1);
    for (auto& v : attn.wo.value.data) v = rng.uniform(-1, 1);
    for (int trial = 0; trial < 100; ++trial) {
        Tensor<double> x = random_tensor({1, 5, 8}, rng);
        const std::vector<std::uint8_t> mask{1, 1, 1, 1, 1};
        const Tensor<double> y = attn.forward(x, mask);
        std::vector<long> perm{0, 1, 2, 3, 4};
        for (long i = 4; i > 0; --i)
            std::swap(perm[static_cast<std::size_t>(i)],
                      perm[static_cast<std::size_t>(rng.uniform_index(static_cast<std::uint64_t>(i + 1)))]);
        Tensor<double> xp({1, 5, 8});
        for (long s = 0; s < 5; ++s)
            for (long d = 0; d < 8; ++d)
                xp.data[static_cast<std::size_t>(s * 8 + d)] =
                    x.data[static_cast<std::size_t>(perm[static_cast<std::size_t>(s)] * 8 + d)];
        const Tensor<double> yp = attn.forward(xp, mask);
        for (long s = 0; s < 5; ++s)
            for (long d = 0; d < 8; ++d)
                CHECK(yp.data[static_cast<std::size_t>(s * 8 + d)] ==
                      doctest::Approx(y.data[static_cast<std::size_t>(
                          perm[static_cast<std::size_t>(s)] * 8 + d)]).epsilon(1e-9));
    }
}

TEST_CASE("attention gradients agree with finite differences") {
    Rng rng(19);
    MultiheadAttention<double> attn(8, 2);
    for (auto& p : attn.wq) for (auto& v : p.value.data) v = rng.uniform(-0.7, 0.7);
    for (auto& p : attn.wk) for (auto& v : p.value.data) v = rng.uniform(-0.7, 0.7);
    for (auto& p : attn.wv) for (auto& v : p.value.data) v = rng.uniform(-0.7, 0.7);
    for (auto& v : attn.wo.value.data) v = rng.uniform(-0.7, 0.7);
    Tensor<double> x = random_tensor({2, 4, 8}, rng);
    const std::vector<std::uint8_t> mask{1, 1, 0, 1, 1, 1, 1, 0};
    auto loss = [&] {
        MultiheadAttention<double> local = attn;
        Tensor<double> xc = x;
        const Tensor<double> y = local.forward(xc, mask);
        double s = 0;
        for (std::size_t i = 0; i < y.numel(); ++i) s += std::cos(static_cast<double>(i)) * y.data[i];
        return s;
    };
    Tensor<double> xc = x;
    const Tensor<double> y = attn.forward(xc, mask);
    (void)y;
    Tensor<double> dy({2, 4, 8});
    for (std::size_t i = 0; i < dy.numel(); ++i) dy.data[i] = std::cos(static_cast<double>(i));
    const Tensor<double> dx = attn.backward(dy);
    for (long h = 0; h < 2; ++h) {
        auto check_param = [&](Param<double>& p) {
            for (std::size_t i = 0; i < p.value.numel(); ++i)
                CHECK(close_rel(p.grad.data[i], fd(p.value, i, loss), 1e-5));
        };
        check_param(attn.wq[static_cast<std::size_t>(h)]);
        check_param(attn.wk[static_cast<std::size_t>(h)]);
        check_param(attn.wv[static_cast<std::size_t>(h)]);
    }
    for (std::size_t i = 0; i < attn.wo.value.numel(); ++i)
        CHECK(close_rel(attn.wo.grad.data[i], fd(attn.wo.value, i, loss), 1e-5));
    for (std::size_t i = 0; i < x.numel(); ++i)
        CHECK(close_rel(dx.data[i], fd(x, i, loss), 1e-5));
}

TEST_CASE("masked mean pool averages valid tokens and backpropagates evenly") {
    MaskedMeanPool<double> pool;
    Tensor<double> x({1, 3, 2});
    x.data = {1, 2, 3, 4, 100, 200};
    const Tensor<double> y = pool.forward(x, {1, 1, 0});
    CHECK(y.data[0] == doctest::Approx(2.0));
    CHECK(y.data[1] == doctest::Approx(3.0));
    Tensor<double> dy({1, 2});
    dy.data = {1.0, 2.0};
    const Tensor<double> dx = pool.backward(dy);
    CHECK(dx.data[0] == doctest::Approx(0.5));
    CHECK(dx.data[4] == 0.0); // masked token gets nothing
}

TEST_CASE("huber loss values on both branches") {
    CHECK(huber_loss<double>({3.0}, {3.0}) == 0.0);
    CHECK(huber_loss<double>({3.5}, {3.0}) == doctest::Approx(0.125));
    CHECK(huber_loss<double>({4.0}, {1.0}) == doctest::Approx(2.5));
    CHECK(huber_loss<double>({1.0, 2.0}, {1.0, 4.0}) == doctest::Approx((0.0 + 1.5) / 2));
    CHECK_THROWS_AS(huber_loss<double>({1.0}, {1.0, 2.0}), DimensionError);
    const auto g = huber_backward<double>({3.5, -2.0}, {3.0, 1.0});
    CHECK(g[0] == doctest::Approx(0.25));  // quadratic branch / batch
    CHECK(g[1] == doctest::Approx(-0.5)); // linear branch / batch
}

TEST_CASE("adam leaves parameters alone on zero gradients") {
    Param<double> p({2, 2});
    p.value.fill(1.5);
    Adam<double> adam(0.001);
    adam.step({&p});
    CHECK(adam.step_count() == 1);
    for (const double v : p.value.data) CHECK(v == 1.5);
}

TEST_CASE("adam first step moves by about the learning rate") {
    Param<double> p({1});
    p.value.data = {2.0};
    p.grad.data = {1.0};
    Adam<double> adam(0.001);
    adam.step({&p});
    CHECK(p.value.data[0] == doctest::Approx(2.0 - 0.001).epsilon(1e-6));
}

TEST_CASE("adam matches a hand-executed three-step trace") {
    const double alpha = 0.001, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double grads[3] = {0.3, -0.2, 0.1};
    // independent trace
    double theta = 0.5, m = 0, v = 0;
    double expected[3];
    for (int t = 1; t <= 3; ++t) {
        const double g = grads[t - 1];
        m = b1 * m + (1 - b1) * g;
        v = b2 * v + (1 - b2) * g * g;
        const double mhat = m / (1 - std::pow(b1, t));
        const double vhat = v / (1 - std::pow(b2, t));
        theta -= alpha * mhat / (std::sqrt(vhat) + eps);
        expected[t - 1] = theta;
    }
    Param<double> p({1});
    p.value.data = {0.5};
    Adam<double> adam(alpha, b1, b2, eps);
    for (int t = 0; t < 3; ++t) {
        p.grad.data = {grads[t]};
        adam.step({&p});
        CHECK(std::abs(p.value.data[0] - expected[t]) < 1e-10);
    }
}

TEST_CASE("adam rejects non-finite gradients") {
    Param<double> p({1});
    p.grad.data = {std::nan("")};
    Adam<double> adam;
    CHECK_THROWS_AS(adam.step({&p}), NumericError);
}

TEST_CASE("layers stay finite on extreme inputs") {
    Rng rng(23);
    Tensor<double> x({2, 6, 8});
    for (auto& v : x.data) v = rng.uniform(-1e6, 1e6);
    MultiheadAttention<double> attn(8, 2);
    for (auto& p : attn.wq) for (auto& v : p.value.data) v = rng.uniform(-1, 1);
    for (auto& p : attn.wk) for (auto& v : p.value.data) v = rng.uniform(-1, 1);
    for (auto& p : attn.wv) for (auto& v : p.value.data) v = rng.uniform(-1, 1);
    for (auto& v : attn.wo.value.data) v = rng.uniform(-1, 1);
    const std::vector<std::uint8_t> mask(12, 1);
    const Tensor<double> y = attn.forward(x, mask);
    for (const double v : y.data) CHECK(std::isfinite(v));
    Tensor<double> dy = y;
    const Tensor<double> dx = attn.backward(dy);
    for (const double v : dx.data) CHECK(std::isfinite(v));
    for (const auto& p : attn.wq) for (const double g : p.grad.data) CHECK(std::isfinite(g));

    Tensor<double> flat({12, 8});
    std::copy(x.data.begin(), x.data.end(), flat.data.begin());
    BatchNorm1d<double> bn(8);
    const Tensor<double> bny = bn.forward(flat, Mode::Train);
    for (const double v : bny.data) CHECK(std::isfinite(v));
    CHECK(huber_loss<double>({1e6}, {-1e6}) < 2.1e6);
}

TEST_SUITE_END();
