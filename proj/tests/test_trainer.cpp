#include <cmath>
#include <random>

#include "doctest.h"
#include "llmvox/corpus.hpp"
#include "llmvox/trainer.hpp"

using namespace llmvox;
using model::ModelConfig;
using model::Network;
using model::TrainConfig;
using model::Trainer;
using model::TrainingPair;

namespace {

codec::CodecConfig grad_codec_config() {
    codec::CodecConfig cc;
    cc.sample_rate_hz = 2400;
    cc.tokens_per_second = 40;
    cc.feature_dim = 16;
    cc.vocab_size = 64;
    cc.seed = 2;
    return cc;
}

// 2 layers, n_embd 32
ModelConfig grad_model_config() {
    ModelConfig mc;
    mc.n_layer = 2;
    mc.n_head = 2;
    mc.block_size = 32;
    mc.text_dim = 16;
    mc.feature_dim = 16;
    mc.vocab_out = 65;
    mc.seed = 8;
    return mc;
}

std::vector<TrainingPair> grad_batch() {
    return {{"ab c", {3, 17, 42, 9, 60, 21}}, {"duo", {11, 5, 33, 8}}};
}

}  // namespace

TEST_CASE("analytic gradients match central finite differences at 64-bit") {
    codec::Codec codec(grad_codec_config());
    Network<double> net(grad_model_config());
    Trainer<double> trainer(net, codec);
    const auto batch = grad_batch();

    trainer.compute_loss_and_grads(batch);

    std::mt19937_64 rng(1001);
    auto named = net.params().all();
    auto grads = trainer.grads().all();
    REQUIRE(named.size() == grads.size());

    int checked = 0;
    double worst_rel = 0.0;
    // sample a few coordinates from every parameter tensor
    for (size_t p = 0; p < named.size(); ++p) {
        auto& mat = *named[p].mat;
        if (mat.v.empty()) continue;
        std::uniform_int_distribution<size_t> pick(0, mat.v.size() - 1);
        for (int rep = 0; rep < 2; ++rep) {
            const size_t idx = pick(rng);
            const double orig = mat.v[idx];
            const double h = 1e-4 * std::max(1.0, std::abs(orig));
            mat.v[idx] = orig + h;
            const double lp = trainer.compute_loss(batch);
            mat.v[idx] = orig - h;
            const double lm = trainer.compute_loss(batch);
            mat.v[idx] = orig;
            const double fd = (lp - lm) / (2 * h);
            const double an = grads[p].mat->v[idx];
            const double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-8});
            if (std::abs(fd) < 1e-10 && std::abs(an) < 1e-10) continue;  // both zero (e.g. unused pos rows)
            CHECK_MESSAGE(rel <= 1e-4, named[p].name, " idx ", idx, " fd ", fd, " an ", an);
            worst_rel = std::max(worst_rel, rel);
            ++checked;
        }
    }
    CHECK(checked >= 20);
    MESSAGE("checked ", checked, " coordinates, worst relative error ", worst_rel);
}

TEST_CASE("initial loss sits near ln(vocab_out)") {
    codec::Codec codec(grad_codec_config());
    Network<float> net(grad_model_config());
    Trainer<float> trainer(net, codec);
    std::mt19937_64 rng(6);
    std::vector<TrainingPair> batch;
    for (int i = 0; i < 16; ++i) {
        TrainingPair p;
        p.text = "t" + std::to_string(i);
        p.speech_tokens.resize(8 + i % 5);
        for (auto& t : p.speech_tokens) t = std::uniform_int_distribution<int>(0, 63)(rng);
        batch.push_back(std::move(p));
    }
    const double loss = trainer.compute_loss(batch);
    const double expected = std::log(65.0);
    CHECK(loss > 0.9 * expected);
    CHECK(loss < 1.1 * expected);
}

TEST_CASE("loss on a single pair trends down over 200 overfit steps") {
    codec::Codec codec(grad_codec_config());
    Network<float> net(grad_model_config());
    TrainConfig tc;
    tc.lr = 3e-3;
    tc.warmup_steps = 20;
    tc.decay_steps = 400;
    Trainer<float> trainer(net, codec, tc);
    const std::vector<TrainingPair> batch = {{"over fit", {12, 40, 33, 21, 7, 55, 18, 2, 9, 30}}};

    std::vector<double> losses;
    for (int s = 0; s < 200; ++s) losses.push_back(trainer.train_step(batch));

    // trailing 40-step window means, strictly decreasing
    const auto window_mean = [&](int begin) {
        double sum = 0;
        for (int i = begin; i < begin + 40; ++i) sum += losses[static_cast<size_t>(i)];
        return sum / 40;
    };
    double prev = window_mean(0);
    for (int begin = 40; begin + 40 <= 200; begin += 40) {
        const double cur = window_mean(begin);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK(losses.back() < losses.front());
}

TEST_CASE("parameters stay finite through a 1k-step smoke train") {
    codec::Codec codec(grad_codec_config());
    auto mc = grad_model_config();
    mc.n_layer = 1;
    Network<float> net(mc);
    TrainConfig tc;
    tc.lr = 1e-3;
    tc.warmup_steps = 10;
    tc.decay_steps = 1200;
    tc.batch_size = 2;
    Trainer<float> trainer(net, codec, tc);
    const auto batch = grad_batch();
    for (int s = 0; s < 1000; ++s) {
        const double loss = trainer.train_step(batch);
        CHECK(std::isfinite(loss));
        if (s % 100 == 0) CHECK(net.params().all_finite());
    }
    CHECK(net.params().all_finite());
}

TEST_CASE("gradient norm is clipped to the configured bound") {
    codec::Codec codec(grad_codec_config());
    Network<float> net(grad_model_config());
    TrainConfig tc;
    tc.grad_clip = 0.5;
    Trainer<float> trainer(net, codec, tc);
    trainer.train_step(grad_batch());
    // the recorded norm is pre-clip; a second step still succeeds and the
    // update scale respected the bound (indirectly: params stay finite)
    CHECK(trainer.last_grad_norm() > 0.0);
    CHECK(net.params().all_finite());
}

TEST_CASE("learning-rate schedule: warmup, peak, decay to min") {
    codec::Codec codec(grad_codec_config());
    Network<float> net(grad_model_config());
    TrainConfig tc;
    tc.lr = 3e-4;
    tc.min_lr = 3e-6;
    tc.warmup_steps = 200;
    tc.decay_steps = 10000;
    Trainer<float> trainer(net, codec, tc);
    CHECK(trainer.lr_at(0) == doctest::Approx(3e-4 / 200));
    CHECK(trainer.lr_at(199) == doctest::Approx(3e-4));
    CHECK(trainer.lr_at(5100) < 3e-4);
    CHECK(trainer.lr_at(5100) > 3e-6);
    CHECK(trainer.lr_at(10000) == doctest::Approx(3e-6));
    CHECK(trainer.lr_at(20000) == doctest::Approx(3e-6));
}

TEST_CASE("oversized text or context is rejected") {
    codec::Codec codec(grad_codec_config());
    Network<float> net(grad_model_config());
    Trainer<float> trainer(net, codec);
    // M = 26 bytes > T = 2
    const std::vector<TrainingPair> m_too_big = {{"abcdefghijklmnopqrstuvwxyz", {1, 2}}};
    CHECK_THROWS_AS(trainer.compute_loss(m_too_big), AlignmentError);

    std::vector<TrainingPair> too_long = {{"x", std::vector<model::SpeechToken>(40, 1)}};
    CHECK_THROWS_AS(trainer.compute_loss(too_long), ContextOverflowError);
}

TEST_CASE("training updates the jointly-trained byte table") {
    codec::Codec codec(grad_codec_config());
    Network<float> net(grad_model_config());
    const auto before = net.params().text_table.v;
    Trainer<float> trainer(net, codec);
    trainer.train_step(grad_batch());
    CHECK(net.params().text_table.v != before);
}
