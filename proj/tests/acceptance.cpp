// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line each. Exits nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <vector>

#include "llmvox/codec.hpp"
#include "llmvox/corpus.hpp"
#include "llmvox/g2p.hpp"
#include "llmvox/model.hpp"
#include "llmvox/streaming.hpp"
#include "llmvox/trainer.hpp"
#include "llmvox/wav.hpp"

using namespace llmvox;

namespace {

int g_failures = 0;

class Criterion {
  public:
    Criterion(int number, const char* title) : number_(number), title_(title), t0_(std::chrono::steady_clock::now()) {}

    void expect(bool ok, const std::string& detail) {
        if (!ok) {
            failed_ = true;
            if (detail_.empty()) detail_ = detail;
        }
    }

    ~Criterion() {
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
        if (failed_) {
            ++g_failures;
            std::printf("[FAIL] criterion %2d: %s (%.1fs) -- %s\n", number_, title_, secs, detail_.c_str());
        } else {
            std::printf("[PASS] criterion %2d: %s (%.1fs)\n", number_, title_, secs);
        }
        std::fflush(stdout);
    }

  private:
    int number_;
    const char* title_;
    std::chrono::steady_clock::time_point t0_;
    bool failed_ = false;
    std::string detail_;
};

// shared tiny configs ------------------------------------------------------

codec::CodecConfig engine_codec_config(int vocab = 4096) {
    codec::CodecConfig cc;
    cc.sample_rate_hz = 2400;
    cc.tokens_per_second = 40;
    cc.feature_dim = 48;
    cc.vocab_size = vocab;
    cc.seed = 13;
    return cc;
}

model::ModelConfig engine_model_config(int vocab = 4096) {
    model::ModelConfig mc;
    mc.n_layer = 2;
    mc.n_head = 4;
    mc.block_size = 300;
    mc.text_dim = 16;
    mc.feature_dim = 48;
    mc.vocab_out = vocab + 1;
    mc.seed = 31;
    return mc;
}

std::string seeded_script(uint64_t seed, int min_sentences, int max_sentences, int min_words, int max_words) {
    static const char* kWords[] = {"river", "stone", "amber", "cloud", "meadow", "signal", "copper",
                                   "violet", "harbor", "ember", "quiet", "thunder", "latch", "prism"};
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> sn(min_sentences, max_sentences);
    std::uniform_int_distribution<int> wn(min_words, max_words);
    std::uniform_int_distribution<size_t> wp(0, std::size(kWords) - 1);
    std::string script;
    const int sentences = sn(rng);
    for (int s = 0; s < sentences; ++s) {
        const int words = wn(rng);
        for (int w = 0; w < words; ++w) {
            if (!script.empty()) script += ' ';
            script += kWords[wp(rng)];
        }
        script += '.';
    }
    return script;
}

std::string slurp(const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

// criteria -----------------------------------------------------------------

void criterion_1_chunk_schedule() {
    Criterion c(1, "chunk schedule matches an independent loop transcription (1000 cases, exact)");
    std::mt19937_64 rng(9001);
    for (int iter = 0; iter < 1000; ++iter) {
        const int n = std::uniform_int_distribution<int>(1, 256)(rng);
        const int m = std::uniform_int_distribution<int>(0, 10000)(rng);

        // independent line-by-line transcription of the doubling loop
        std::vector<std::pair<int, int>> oracle;
        int chunk_size = n;
        int start_idx = 1;
        while (start_idx <= m) {
            const int end_idx = std::min(start_idx + chunk_size - 1, m);
            oracle.emplace_back(start_idx, end_idx);
            start_idx = end_idx + 1;
            chunk_size = 2 * chunk_size;
        }

        const auto plan = streaming::chunk_schedule(n, m);
        c.expect(plan.ranges == oracle, "mismatch at n=" + std::to_string(n) + " M=" + std::to_string(m));
        if (plan.ranges != oracle) return;
    }
}

void criterion_2_codec_round_trip() {
    Criterion c(2, "codec round-trip and chunked-decode identity (1000 sequences, exact)");
    codec::CodecConfig cc;  // paper-scale defaults: 24 kHz, 40 tok/s, 4096 entries
    cc.seed = 77;
    codec::Codec codec(cc);
    std::mt19937_64 rng(2002);
    std::uniform_int_distribution<size_t> len_pick(0, 1024);
    std::uniform_int_distribution<codec::SpeechToken> tok(0, cc.vocab_size - 1);
    for (int iter = 0; iter < 1000; ++iter) {
        std::vector<codec::SpeechToken> tokens(len_pick(rng));
        for (auto& t : tokens) t = tok(rng);
        const auto whole = codec.decode(tokens);
        const auto back = codec.encode(whole);
        c.expect(back == tokens, "round-trip failed at iter " + std::to_string(iter));
        if (back != tokens) return;

        const size_t split = tokens.empty() ? 0 : std::uniform_int_distribution<size_t>(0, tokens.size())(rng);
        const auto a = codec.decode(std::span(tokens).first(split));
        const auto b = codec.decode(std::span(tokens).subspan(split));
        bool same = a.samples.size() + b.samples.size() == whole.samples.size();
        for (size_t i = 0; same && i < a.samples.size(); ++i) same = a.samples[i] == whole.samples[i];
        for (size_t i = 0; same && i < b.samples.size(); ++i)
            same = b.samples[i] == whole.samples[a.samples.size() + i];
        c.expect(same, "chunked decode mismatch at iter " + std::to_string(iter));
        if (!same) return;
    }
}

void criterion_3_causality_and_cache() {
    Criterion c(3, "causality and KV-cache equivalence (2 layers, n_embd 64, 200 tests)");
    const auto cc = engine_codec_config(128);
    codec::Codec codec(cc);
    auto mc = engine_model_config(128);
    model::Network<float> net(mc);
    std::mt19937_64 rng(3003);
    const int d = mc.n_embd();

    for (int iter = 0; iter < 200; ++iter) {
        // causality: perturb a future frame, earlier logits unchanged
        const int len = std::uniform_int_distribution<int>(2, 48)(rng);
        Mat<float> z(len, d);
        for (auto& v : z.v) v = std::uniform_real_distribution<float>(-1.f, 1.f)(rng);
        const auto base = net.forward_frames(z);
        const int k = std::uniform_int_distribution<int>(1, len - 1)(rng);
        auto z2 = z;
        for (int i = 0; i < d; ++i) z2.at(k, i) += 0.5f;
        const auto perturbed = net.forward_frames(z2);
        bool causal = true;
        for (int t = 0; t < k && causal; ++t)
            for (int v = 0; v < base.cols; ++v)
                if (base.at(t, v) != perturbed.at(t, v)) {
                    causal = false;
                    break;
                }
        c.expect(causal, "future perturbation leaked at iter " + std::to_string(iter));
        if (!causal) return;

        // cache equivalence on a random prefix length up to 256
        const int steps = std::uniform_int_distribution<int>(1, 256)(rng);
        const std::string text = seeded_script(iter * 7 + 1, 1, 1, 2, 5);
        model::GenSession<float> session(net, codec);
        session.begin(text);
        std::vector<codec::SpeechToken> emitted;
        for (int t = 0; t < steps; ++t) {
            const auto tok = session.step();
            if (!tok) break;
            emitted.push_back(*tok);
        }
        const int done = session.steps();
        const auto bytes = g2p::subtokenize_text(text);
        std::span<const codec::SpeechToken> prev(emitted.data(),
                                                 session.finished() ? emitted.size() : emitted.size() - 1);
        const auto z_full = net.assemble_inputs(bytes, prev, codec);
        const auto full = net.forward_frames(z_full);
        float max_abs = 0;
        for (int v = 0; v < full.cols; ++v)
            max_abs = std::max(max_abs,
                               std::abs(full.at(done - 1, v) - session.last_logits()[static_cast<size_t>(v)]));
        c.expect(max_abs < 1e-5f, "cache drift " + std::to_string(max_abs) + " at iter " + std::to_string(iter));
        if (max_abs >= 1e-5f) return;
    }
}

void criterion_4_gradient_check() {
    Criterion c(4, "analytic vs central-difference gradients (64-bit, rel err <= 1e-4)");
    codec::CodecConfig cc;
    cc.sample_rate_hz = 2400;
    cc.tokens_per_second = 40;
    cc.feature_dim = 16;
    cc.vocab_size = 64;
    cc.seed = 2;
    codec::Codec codec(cc);
    model::ModelConfig mc;
    mc.n_layer = 2;
    mc.n_head = 2;
    mc.block_size = 32;
    mc.text_dim = 16;
    mc.feature_dim = 16;
    mc.vocab_out = 65;
    mc.seed = 8;
    model::Network<double> net(mc);
    model::Trainer<double> trainer(net, codec);
    const std::vector<model::TrainingPair> batch = {{"ab c", {3, 17, 42, 9, 60, 21}}, {"duo", {11, 5, 33, 8}}};
    trainer.compute_loss_and_grads(batch);

    std::mt19937_64 rng(4004);
    auto named = net.params().all();
    auto grads = trainer.grads().all();
    int checked = 0;
    for (size_t p = 0; p < named.size(); ++p) {
        auto& mat = *named[p].mat;
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
            if (std::abs(fd) < 1e-10 && std::abs(an) < 1e-10) continue;
            const double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-8});
            c.expect(rel <= 1e-4, named[p].name + " rel err " + std::to_string(rel));
            ++checked;
        }
    }
    c.expect(checked >= 20, "only " + std::to_string(checked) + " coordinates checked");
}

void criterion_5_overfit_oracle() {
    Criterion c(5, "overfit oracle: 32 pairs, loss < 0.1 and >= 29/32 exact greedy reproductions");
    corpus::GenSpec spec;
    spec.pairs = 32;
    spec.codec_vocab = 4096;
    spec.seed = 5005;
    const auto pairs = corpus::generate_corpus(spec);

    codec::CodecConfig cc;
    cc.sample_rate_hz = 2400;
    cc.tokens_per_second = 40;
    cc.feature_dim = 64;
    cc.vocab_size = 4096;
    cc.seed = 55;
    codec::Codec codec(cc);

    model::ModelConfig mc;
    mc.n_layer = 2;
    mc.n_head = 4;
    mc.block_size = 64;
    mc.text_dim = 32;
    mc.feature_dim = 64;
    mc.vocab_out = 4097;
    mc.seed = 51;
    model::Network<float> net(mc);

    model::TrainConfig tc;
    tc.lr = 1e-3;
    tc.min_lr = 1e-5;
    tc.warmup_steps = 100;
    tc.decay_steps = 6000;
    tc.batch_size = 8;
    model::Trainer<float> trainer(net, codec, tc);

    double loss = 1e9;
    int step = 0;
    std::vector<model::TrainingPair> batch;
    size_t cursor = 0;
    for (; step < 5000; ++step) {
        batch.clear();
        for (int j = 0; j < tc.batch_size; ++j) {
            batch.push_back(pairs[cursor]);
            cursor = (cursor + 1) % pairs.size();
        }
        loss = trainer.train_step(batch);
        if (loss < 0.05 && step > 200) break;
    }
    const double mean_loss = trainer.compute_loss(pairs);
    c.expect(mean_loss < 0.1, "mean loss " + std::to_string(mean_loss) + " after " + std::to_string(step) + " steps");

    int exact = 0;
    for (const auto& pair : pairs) {
        const auto out =
            model::generate(pair.text, net, codec, static_cast<int>(pair.speech_tokens.size()) + 8);
        if (out == pair.speech_tokens) ++exact;
    }
    c.expect(exact >= 29, "only " + std::to_string(exact) + "/32 reproduced exactly (steps=" +
                              std::to_string(step) + ", loss=" + std::to_string(mean_loss) + ")");
    std::printf("       (overfit: %d steps, mean loss %.4f, %d/32 exact)\n", step, mean_loss, exact);
}

void criterion_6_initial_loss() {
    Criterion c(6, "untrained loss within 10% of ln(vocab_out) on a 64-sequence batch");
    const auto cc = engine_codec_config(4096);
    codec::Codec codec(cc);
    model::Network<float> net(engine_model_config(4096));
    model::Trainer<float> trainer(net, codec);
    std::mt19937_64 rng(6006);
    std::vector<model::TrainingPair> batch;
    for (int i = 0; i < 64; ++i) {
        model::TrainingPair p;
        p.text = seeded_script(600 + i, 1, 1, 1, 3);
        p.speech_tokens.resize(12 + i % 7);
        for (auto& t : p.speech_tokens) t = std::uniform_int_distribution<int>(0, 4095)(rng);
        batch.push_back(std::move(p));
    }
    const double loss = trainer.compute_loss(batch);
    const double expected = std::log(4097.0);
    c.expect(loss > 0.9 * expected && loss < 1.1 * expected,
             "loss " + std::to_string(loss) + " vs ln(V) " + std::to_string(expected));
}

void criterion_7_streaming_determinism() {
    Criterion c(7, "sim-clock determinism, sample-exact ordering, worker alternation");
    const auto cc = engine_codec_config(128);
    codec::Codec codec(cc);
    model::NetworkF net(engine_model_config(128));

    streaming::EngineConfig ec;
    ec.initial_chunk_tokens = 8;
    ec.max_tokens_per_sentence = 48;
    sources::SourceTiming timing;
    timing.asr_delay_ms = 100;
    timing.first_word_delay_ms = 200;
    timing.words_per_second = 5;
    timing.seed = 7007;
    const streaming::Query query{"det", "q", "One here. Two there. Three beyond. Four last."};

    streaming::PipelineEngine engine(net, codec, ec);
    const auto r1 = engine.run(query, timing);
    const auto r2 = engine.run(query, timing);

    io::write_wav("acc7_a.wav", r1.audio, cc.sample_rate_hz);
    io::write_wav("acc7_b.wav", r2.audio, cc.sample_rate_hz);
    c.expect(slurp("acc7_a.wav") == slurp("acc7_b.wav"), "WAV bytes differ between identical runs");
    std::remove("acc7_a.wav");
    std::remove("acc7_b.wav");

    const std::string csv1 = streaming::LatencyTrace::csv_header() + "\n" + r1.trace.csv_row();
    const std::string csv2 = streaming::LatencyTrace::csv_header() + "\n" + r2.trace.csv_row();
    c.expect(csv1 == csv2, "trace CSV differs between identical runs");

    std::vector<float> offline;
    for (const auto& s : r1.sentences) {
        const auto buf = codec.decode(s.tokens);
        offline.insert(offline.end(), buf.samples.begin(), buf.samples.end());
    }
    c.expect(r1.audio == offline, "streamed audio != offline per-sentence decode");
    c.expect(r1.sentences.size() == 4, "expected 4 sentences");
    for (size_t i = 0; i < r1.sentences.size(); ++i)
        c.expect(r1.sentences[i].worker == static_cast<int>(i % 2) + 1,
                 "sentence " + std::to_string(i + 1) + " on worker " + std::to_string(r1.sentences[i].worker));
}

void criterion_8_gapless_playback() {
    Criterion c(8, "gapless playback: zero underruns across 50 seeded runs, monotone traces");
    const auto cc = engine_codec_config(4096);
    codec::Codec codec(cc);
    model::NetworkF net(engine_model_config(4096));

    streaming::EngineConfig ec;
    ec.initial_chunk_tokens = 20;
    ec.max_tokens_per_sentence = 96;
    ec.collect_audio = false;
    streaming::PipelineEngine engine(net, codec, ec);

    for (uint64_t seed = 0; seed < 50; ++seed) {
        sources::SourceTiming timing;
        timing.asr_delay_ms = 100;
        timing.first_word_delay_ms = 200;
        timing.words_per_second = 5;
        timing.jitter_ms = 0;
        timing.seed = seed;
        streaming::Query query;
        query.id = "gapless" + std::to_string(seed);
        query.transcript = "q";
        query.script = seeded_script(8000 + seed, 3, 6, 3, 8);
        const auto r = engine.run(query, timing);
        c.expect(r.trace.underrun_count == 0, "seed " + std::to_string(seed) + ": " +
                                                  std::to_string(r.trace.underrun_count) + " underruns");
        c.expect(r.trace.monotone(), "seed " + std::to_string(seed) + ": non-monotone trace");
        c.expect(r.stats.poisoned_sentences == 0, "seed " + std::to_string(seed) + ": poisoned sentences");
        if (r.trace.underrun_count != 0) return;
    }
}

void criterion_9_latency_trend() {
    Criterion c(9, "first-audio latency non-decreasing in n; step bounded by modeled cost");
    const auto cc = engine_codec_config(4096);
    codec::Codec codec(cc);
    model::NetworkF net(engine_model_config(4096));

    const int n_list[] = {20, 40, 80, 160};
    const int reps = 10;
    double mean_ms[4] = {};
    for (int ni = 0; ni < 4; ++ni) {
        streaming::EngineConfig ec;
        ec.initial_chunk_tokens = n_list[ni];
        ec.max_tokens_per_sentence = 192;
        ec.collect_audio = false;
        streaming::PipelineEngine engine(net, codec, ec);
        double total = 0;
        for (int rep = 0; rep < reps; ++rep) {
            sources::SourceTiming timing;
            timing.asr_delay_ms = 100;
            timing.first_word_delay_ms = 200;
            timing.words_per_second = 5;
            timing.jitter_ms = 30;
            timing.seed = derive_seed(900, "rep" + std::to_string(rep));
            streaming::Query query;
            query.id = "sweep";
            query.transcript = "q";
            query.script = seeded_script(9000 + rep, 2, 3, 3, 6);
            const auto r = engine.run(query, timing);
            total += r.trace.first_audio_latency_us() / 1000.0;
        }
        mean_ms[ni] = total / reps;
    }
    const auto modeled_ms = [](int extra_tokens) {
        streaming::SynthCost cost;
        return extra_tokens * (cost.token_gen_us + cost.decode_per_token_us) / 1000.0;
    };
    for (int ni = 1; ni < 4; ++ni) {
        const double delta = mean_ms[ni] - mean_ms[ni - 1];
        c.expect(delta >= 0, "latency decreased from n=" + std::to_string(n_list[ni - 1]) + " to n=" +
                                 std::to_string(n_list[ni]));
        const double bound = 2.0 * modeled_ms(n_list[ni - 1]);
        c.expect(delta <= bound, "delta " + std::to_string(delta) + " ms exceeds 2x modeled " +
                                     std::to_string(bound) + " ms");
    }
    std::printf("       (mean first-audio ms: n20=%.1f n40=%.1f n80=%.1f n160=%.1f)\n", mean_ms[0], mean_ms[1],
                mean_ms[2], mean_ms[3]);
}

void criterion_10_infinite_length() {
    Criterion c(10, "1000-sentence response: bounded queues, per-sentence resets, steady-state memory");
    const auto cc = engine_codec_config(128);
    codec::Codec codec(cc);
    model::NetworkF net(engine_model_config(128));

    const auto run_n = [&](int sentences) {
        std::string script;
        for (int s = 0; s < sentences; ++s) {
            if (!script.empty()) script += ' ';
            script += "tick tock " + std::to_string(s % 10) + ".";
        }
        streaming::EngineConfig ec;
        ec.initial_chunk_tokens = 8;
        ec.max_tokens_per_sentence = 24;
        ec.collect_audio = false;
        sources::SourceTiming timing;
        timing.asr_delay_ms = 100;
        timing.first_word_delay_ms = 200;
        timing.words_per_second = 50;
        timing.seed = 10010;
        streaming::PipelineEngine engine(net, codec, ec);
        streaming::Query query{"inf" + std::to_string(sentences), "q", script};
        return engine.run(query, timing);
    };

    const auto r100 = run_n(100);
    const auto r1000 = run_n(1000);
    c.expect(r1000.stats.sentences == 1000, "dispatched " + std::to_string(r1000.stats.sentences));
    c.expect(r1000.stats.cache_resets == 1000, "cache resets " + std::to_string(r1000.stats.cache_resets));
    c.expect(r1000.stats.poisoned_sentences == 0, "context overflow or poison in long run");
    c.expect(r1000.stats.max_queue_peak() <= 64, "queue peak " + std::to_string(r1000.stats.max_queue_peak()));
    c.expect(r1000.stats.max_session_steps <= net.config().block_size, "session exceeded block size");
    // steady state: buffered audio does not grow with sentence count
    c.expect(r1000.stats.peak_inflight_audio_samples <= 2 * std::max<int64_t>(r100.stats.peak_inflight_audio_samples, 1),
             "peak inflight grew: " + std::to_string(r100.stats.peak_inflight_audio_samples) + " -> " +
                 std::to_string(r1000.stats.peak_inflight_audio_samples));
}

void criterion_11_breakdown_identity() {
    Criterion c(11, "trace carries all eight stages; stage deltas sum to total exactly");
    const auto cc = engine_codec_config(128);
    codec::Codec codec(cc);
    model::NetworkF net(engine_model_config(128));

    streaming::EngineConfig ec;
    ec.initial_chunk_tokens = 8;
    ec.max_tokens_per_sentence = 48;
    sources::SourceTiming timing;
    timing.asr_delay_ms = 100;
    timing.first_word_delay_ms = 200;
    timing.words_per_second = 5;
    timing.seed = 11011;
    streaming::PipelineEngine engine(net, codec, ec);
    const streaming::Query query{"bd", "q", "Breakdown row check. Second sentence here."};
    const auto r = engine.run(query, timing);

    const char* expected_header =
        "query_id,t_query_ms,t_asr_done_ms,t_first_word_ms,t_first_sentence_dispatch_ms,t_first_token_ms,"
        "t_first_chunk_decoded_ms,t_first_audio_out_ms,t_last_audio_out_ms,underrun_count,initial_n";
    c.expect(streaming::LatencyTrace::csv_header() == expected_header, "CSV header drifted");

    const auto& t = r.trace;
    const int64_t deltas = (t.t_asr_done_us - t.t_query_us) + (t.t_first_word_us - t.t_asr_done_us) +
                           (t.t_first_sentence_dispatch_us - t.t_first_word_us) +
                           (t.t_first_token_us - t.t_first_sentence_dispatch_us) +
                           (t.t_first_chunk_decoded_us - t.t_first_token_us) +
                           (t.t_first_audio_out_us - t.t_first_chunk_decoded_us);
    c.expect(deltas == t.t_first_audio_out_us - t.t_query_us, "stage deltas do not telescope");
    c.expect(t.monotone(), "non-monotone trace");
    c.expect(t.t_asr_done_us == 100000 && t.t_first_word_us == 300000, "stub timing mismatch");
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_1_chunk_schedule();
    criterion_2_codec_round_trip();
    criterion_3_causality_and_cache();
    criterion_4_gradient_check();
    criterion_5_overfit_oracle();
    criterion_6_initial_loss();
    criterion_7_streaming_determinism();
    criterion_8_gapless_playback();
    criterion_9_latency_trend();
    criterion_10_infinite_length();
    criterion_11_breakdown_identity();
    if (g_failures) {
        std::printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
