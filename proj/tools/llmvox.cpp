// llmvox command line: train | synth | pipeline | sweep-chunks | gen-corpus.
// Exit codes: 0 success, 2 usage/config error, 3 runtime failure.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"
#include "llmvox/codec.hpp"
#include "llmvox/common.hpp"
#include "llmvox/corpus.hpp"
#include "llmvox/g2p.hpp"
#include "llmvox/model.hpp"
#include "llmvox/runtime.hpp"
#include "llmvox/serialize.hpp"
#include "llmvox/sources.hpp"
#include "llmvox/streaming.hpp"
#include "llmvox/trainer.hpp"
#include "llmvox/wav.hpp"

namespace fs = std::filesystem;
using namespace llmvox;

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::string clock = "sim";
    uint64_t seed = 0;
    bool seed_given = false;
    io::KvConfig overrides;
};

void add_kv_option(CLI::App* cmd, GlobalArgs& g, const std::string& flag, const std::string& key,
                   const std::string& desc) {
    cmd->add_option_function<std::string>(
        flag, [&g, key](const std::string& v) { g.overrides[key] = v; }, desc);
}

void add_common_options(CLI::App* cmd, GlobalArgs& g) {
    cmd->add_option("--config", g.config_path, "key=value config file");
    cmd->add_option("--out-dir", g.out_dir, "output directory");
    cmd->add_option("--clock", g.clock, "clock mode: sim | wall")->check(CLI::IsMember({"sim", "wall"}));
    cmd->add_option("--seed", g.seed, "master seed")->each([&g](const std::string&) { g.seed_given = true; });
    add_kv_option(cmd, g, "--initial-n", "engine.initial_n", "initial chunk size in tokens");
}

void add_model_options(CLI::App* cmd, GlobalArgs& g) {
    add_kv_option(cmd, g, "--n-layer", "n_layer", "transformer layers");
    add_kv_option(cmd, g, "--n-head", "n_head", "attention heads");
    add_kv_option(cmd, g, "--block-size", "block_size", "max context frames");
    add_kv_option(cmd, g, "--text-dim", "text_dim", "byte embedding width");
    add_kv_option(cmd, g, "--feature-dim", "codec.feature_dim", "codec feature width");
    add_kv_option(cmd, g, "--vocab-size", "codec.vocab_size", "codec vocabulary size");
    add_kv_option(cmd, g, "--sample-rate", "codec.sample_rate_hz", "codec sample rate");
    add_kv_option(cmd, g, "--tokens-per-second", "codec.tokens_per_second", "codec token rate");
}

void add_timing_options(CLI::App* cmd, GlobalArgs& g) {
    add_kv_option(cmd, g, "--asr-delay-ms", "timing.asr_delay_ms", "simulated ASR delay");
    add_kv_option(cmd, g, "--first-word-delay-ms", "timing.first_word_delay_ms", "simulated LLM first-word delay");
    add_kv_option(cmd, g, "--words-per-second", "timing.words_per_second", "simulated LLM word rate");
    add_kv_option(cmd, g, "--jitter-ms", "timing.jitter_ms", "word timing jitter");
}

void add_engine_options(CLI::App* cmd, GlobalArgs& g) {
    add_kv_option(cmd, g, "--workers", "engine.worker_count", "synthesis worker replicas");
    add_kv_option(cmd, g, "--queue-capacity", "engine.queue_capacity", "bounded queue capacity");
    add_kv_option(cmd, g, "--max-chunk", "engine.max_chunk_tokens", "cap on doubled chunk size (0 = none)");
    add_kv_option(cmd, g, "--max-tokens-per-sentence", "engine.max_tokens_per_sentence",
                  "generation cap per sentence (0 = block size)");
    add_kv_option(cmd, g, "--token-gen-us", "engine.token_gen_us", "modeled cost per generated token (sim clock)");
    add_kv_option(cmd, g, "--decode-fixed-us", "engine.decode_fixed_us", "modeled fixed decode cost (sim clock)");
    add_kv_option(cmd, g, "--decode-per-token-us", "engine.decode_per_token_us",
                  "modeled per-token decode cost (sim clock)");
}

int kv_get_int(const io::KvConfig& kv, const std::string& key, int fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
        return std::stoi(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected integer, got '" + it->second + "'");
    }
}

double kv_get_double(const io::KvConfig& kv, const std::string& key, double fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected number, got '" + it->second + "'");
    }
}

// Merged configuration: file first, CLI flags on top, seeds resolved.
io::KvConfig resolve_kv(const GlobalArgs& g) {
    io::KvConfig kv;
    if (!g.config_path.empty()) {
        if (!fs::exists(g.config_path)) throw ConfigError("config file not found: " + g.config_path);
        kv = io::load_kv(g.config_path);
    }
    for (const auto& [k, v] : g.overrides) kv[k] = v;
    if (g.seed_given || kv.find("seed") == kv.end()) kv["seed"] = std::to_string(g.seed);
    const uint64_t master = std::stoull(kv["seed"]);
    if (kv.find("codec.seed") == kv.end()) kv["codec.seed"] = std::to_string(derive_seed(master, "codec"));
    if (kv.find("model.seed") == kv.end()) kv["model.seed"] = std::to_string(derive_seed(master, "model"));
    if (kv.find("timing.seed") == kv.end()) kv["timing.seed"] = std::to_string(derive_seed(master, "timing"));
    if (kv.find("sampling.seed") == kv.end()) kv["sampling.seed"] = std::to_string(derive_seed(master, "sampling"));
    // the model's acoustic width always follows the codec
    auto it = kv.find("codec.feature_dim");
    kv["feature_dim"] = it == kv.end() ? std::to_string(codec::CodecConfig{}.feature_dim) : it->second;
    return kv;
}

model::TrainConfig train_config_from_kv(const io::KvConfig& kv) {
    model::TrainConfig tc;
    tc.lr = kv_get_double(kv, "train.lr", tc.lr);
    tc.min_lr = kv_get_double(kv, "train.min_lr", tc.min_lr);
    tc.warmup_steps = kv_get_int(kv, "train.warmup_steps", tc.warmup_steps);
    tc.decay_steps = kv_get_int(kv, "train.decay_steps", tc.decay_steps);
    tc.weight_decay = kv_get_double(kv, "train.weight_decay", tc.weight_decay);
    tc.grad_clip = kv_get_double(kv, "train.grad_clip", tc.grad_clip);
    tc.batch_size = kv_get_int(kv, "train.batch_size", tc.batch_size);
    tc.validate();
    return tc;
}

streaming::EngineConfig engine_config_from_kv(const io::KvConfig& kv, ClockMode clock) {
    streaming::EngineConfig ec;
    ec.worker_count = kv_get_int(kv, "engine.worker_count", ec.worker_count);
    ec.queue_capacity = static_cast<size_t>(kv_get_int(kv, "engine.queue_capacity", 64));
    ec.initial_chunk_tokens = kv_get_int(kv, "engine.initial_n", ec.initial_chunk_tokens);
    ec.max_chunk_tokens = kv_get_int(kv, "engine.max_chunk_tokens", ec.max_chunk_tokens);
    ec.max_tokens_per_sentence = kv_get_int(kv, "engine.max_tokens_per_sentence", ec.max_tokens_per_sentence);
    ec.cost.token_gen_us = kv_get_int(kv, "engine.token_gen_us", static_cast<int>(ec.cost.token_gen_us));
    ec.cost.decode_fixed_us = kv_get_int(kv, "engine.decode_fixed_us", static_cast<int>(ec.cost.decode_fixed_us));
    ec.cost.decode_per_token_us =
        kv_get_int(kv, "engine.decode_per_token_us", static_cast<int>(ec.cost.decode_per_token_us));
    ec.clock_mode = clock;
    auto it = kv.find("sampling.seed");
    if (it != kv.end()) ec.sampling.seed = std::stoull(it->second);
    ec.validate();
    return ec;
}

std::string out_path(const GlobalArgs& g, const std::string& name) {
    fs::create_directories(g.out_dir);
    return (fs::path(g.out_dir) / name).string();
}

class WavFileSink final : public streaming::AudioSink {
  public:
    WavFileSink(const std::string& path, int rate) : writer_(path, rate) {}
    void write(std::span<const float> samples) override { writer_.write(samples); }
    void close() { writer_.close(); }
    uint64_t samples_written() const { return writer_.samples_written(); }

  private:
    io::WavWriter writer_;
};

void print_breakdown(const streaming::LatencyTrace& t) {
    struct Row {
        const char* name;
        int64_t at;
    };
    const Row rows[] = {
        {"query", t.t_query_us},
        {"asr done", t.t_asr_done_us},
        {"llm first word", t.t_first_word_us},
        {"first sentence dispatch", t.t_first_sentence_dispatch_us},
        {"first speech token", t.t_first_token_us},
        {"first chunk decoded", t.t_first_chunk_decoded_us},
        {"first audio out", t.t_first_audio_out_us},
    };
    std::printf("latency breakdown (ms)\n");
    std::printf("  %-26s %12s %12s\n", "stage", "at", "delta");
    int64_t prev = t.t_query_us;
    for (const auto& r : rows) {
        std::printf("  %-26s %12.3f %12.3f\n", r.name, r.at / 1000.0, (r.at - prev) / 1000.0);
        prev = r.at;
    }
    std::printf("  %-26s %12s %12.3f\n", "total to first audio", "",
                (t.t_first_audio_out_us - t.t_query_us) / 1000.0);
    std::printf("  last audio out: %.3f ms, underruns: %d\n", t.t_last_audio_out_us / 1000.0, t.underrun_count);
}

// ---- subcommand runners ----

int run_gen_corpus(const GlobalArgs& g, const std::string& out_file, const corpus::GenSpec& spec_in) {
    const io::KvConfig kv = resolve_kv(g);
    corpus::GenSpec spec = spec_in;
    spec.codec_vocab = kv_get_int(kv, "codec.vocab_size", spec.codec_vocab);
    spec.seed = std::stoull(kv.at("seed"));
    const auto pairs = corpus::generate_corpus(spec);
    const std::string path = out_path(g, out_file);
    corpus::save_corpus(path, pairs);
    io::KvConfig meta = kv;
    meta["corpus.pairs"] = std::to_string(spec.pairs);
    meta["corpus.min_words"] = std::to_string(spec.min_words);
    meta["corpus.max_words"] = std::to_string(spec.max_words);
    meta["corpus.min_tokens"] = std::to_string(spec.min_tokens);
    meta["corpus.max_tokens"] = std::to_string(spec.max_tokens);
    io::write_meta_sidecar(path, "corpus", "gen-corpus", meta);
    std::printf("wrote %zu pairs to %s\n", pairs.size(), path.c_str());
    return 0;
}

int run_train(const GlobalArgs& g, const std::string& corpus_path, const std::string& ckpt_name, int steps,
              double target_loss) {
    if (!fs::exists(corpus_path)) throw ConfigError("training corpus not found: " + corpus_path);
    const io::KvConfig kv = resolve_kv(g);
    const auto codec_cfg = codec::CodecConfig::from_kv(kv);
    auto model_cfg = model::ModelConfig::from_kv(kv);
    model_cfg.vocab_out = codec_cfg.vocab_size + 1;
    model_cfg.validate();
    const auto tc = train_config_from_kv(kv);

    const auto loaded = corpus::load_corpus(corpus_path, codec_cfg.vocab_size, model_cfg.block_size);
    if (loaded.pairs.empty()) throw ConfigError("corpus has no usable pairs: " + corpus_path);
    if (loaded.dropped > 0) LLMVOX_LOG_WARN("dropped %d unusable corpus pairs", loaded.dropped);

    codec::Codec codec(codec_cfg);
    model::NetworkF net(model_cfg);
    model::Trainer<float> trainer(net, codec, tc);

    const std::string ckpt = out_path(g, ckpt_name);
    const std::string loss_csv = ckpt + ".loss.csv";
    std::ofstream loss_out(loss_csv);
    loss_out << "step,loss,lr,grad_norm\n";

    const auto& pairs = loaded.pairs;
    std::vector<model::TrainingPair> batch;
    size_t cursor = 0;
    double loss = 0.0;
    int step = 0;
    for (; step < steps; ++step) {
        batch.clear();
        for (int j = 0; j < tc.batch_size; ++j) {
            batch.push_back(pairs[cursor]);
            cursor = (cursor + 1) % pairs.size();
        }
        loss = trainer.train_step(batch);
        char line[128];
        std::snprintf(line, sizeof(line), "%d,%.6f,%.8f,%.6f\n", step, loss, trainer.last_lr(),
                      trainer.last_grad_norm());
        loss_out << line;
        if ((step + 1) % 100 == 0 || step + 1 == steps)
            std::printf("step %d/%d loss %.4f lr %.2e\n", step + 1, steps, loss, trainer.last_lr());
        if (target_loss > 0 && loss < target_loss) {
            std::printf("target loss %.4f reached at step %d\n", target_loss, step + 1);
            ++step;
            break;
        }
    }
    loss_out.close();

    model::save_checkpoint(ckpt, net, codec_cfg);
    io::KvConfig meta = kv;
    meta["train.steps_run"] = std::to_string(step);
    io::write_meta_sidecar(ckpt, "checkpoint", "train", meta);
    io::write_meta_sidecar(loss_csv, "loss_curve", "train", meta);
    std::printf("checkpoint written to %s (final loss %.4f)\n", ckpt.c_str(), loss);
    return 0;
}

int run_synth(const GlobalArgs& g, const std::string& ckpt, const std::string& text, const std::string& wav_name,
              int max_tokens) {
    if (g2p::subtokenize_text(text).empty()) throw ConfigError("synth: text must be non-empty");
    if (!fs::exists(ckpt)) throw ConfigError("checkpoint not found: " + ckpt);
    auto [net, codec_cfg] = model::load_checkpoint(ckpt);
    codec::Codec codec(codec_cfg);
    const int limit = max_tokens > 0 ? max_tokens : net.config().block_size;
    const auto tokens = model::generate(text, net, codec, limit);
    const auto audio = codec.decode(tokens);
    const std::string path = out_path(g, wav_name);
    io::write_wav(path, audio.samples, audio.sample_rate_hz);

    io::KvConfig meta = io::load_kv(ckpt + ".cfg");
    meta["synth.text"] = text;
    meta["synth.tokens"] = std::to_string(tokens.size());
    io::write_meta_sidecar(path, "wav", "synth", meta);
    std::printf("%zu tokens -> %.3f s -> %s\n", tokens.size(), codec.duration_seconds(tokens.size()),
                path.c_str());
    return 0;
}

int run_pipeline(const GlobalArgs& g, const std::string& ckpt, const std::string& script,
                 const std::string& transcript, bool use_feed, bool per_sentence_wavs) {
    if (!fs::exists(ckpt)) throw ConfigError("checkpoint not found: " + ckpt);
    const io::KvConfig kv = resolve_kv(g);
    const ClockMode clock = g.clock == "wall" ? ClockMode::kWall : ClockMode::kSim;
    if (use_feed && clock != ClockMode::kWall)
        throw ConfigError("--feed reads a live stream and requires --clock wall");
    if (!use_feed && g2p::subtokenize_text(script).empty())
        throw ConfigError("pipeline: script must be non-empty (or use --feed)");

    auto [net, codec_cfg] = model::load_checkpoint(ckpt);
    codec::Codec codec(codec_cfg);
    const auto timing = sources::SourceTiming::from_kv(kv);
    const auto ec = engine_config_from_kv(kv, clock);
    streaming::PipelineEngine engine(net, codec, ec);

    const std::string wav_path = out_path(g, "pipeline.wav");
    WavFileSink sink(wav_path, codec_cfg.sample_rate_hz);

    streaming::PipelineResult result;
    if (use_feed) {
        sources::ExternalFeedSource feed(std::cin);
        result = engine.run(feed, "q0", &sink);
    } else {
        streaming::Query query;
        query.transcript = transcript.empty() ? script : transcript;
        query.script = script;
        result = engine.run(query, timing, &sink);
    }
    sink.close();

    const std::string trace_path = out_path(g, "trace.csv");
    {
        std::ofstream f(trace_path);
        f << streaming::LatencyTrace::csv_header() << "\n" << result.trace.csv_row() << "\n";
    }
    io::write_meta_sidecar(wav_path, "wav", "pipeline", kv);
    io::write_meta_sidecar(trace_path, "trace", "pipeline", kv);

    if (per_sentence_wavs) {
        for (const auto& s : result.sentences) {
            if (s.poisoned) continue;
            char name[64];
            std::snprintf(name, sizeof(name), "sentence_%03d.wav", s.index);
            const auto buf = codec.decode(s.tokens);
            io::write_wav(out_path(g, name), buf.samples, buf.sample_rate_hz);
        }
    }

    print_breakdown(result.trace);
    std::printf("sentences: %d (poisoned %d), audio: %s, trace: %s\n", result.stats.sentences,
                result.stats.poisoned_sentences, wav_path.c_str(), trace_path.c_str());
    return 0;
}

int run_sweep(const GlobalArgs& g, const std::string& ckpt, std::vector<int> n_list, int reps,
              const std::string& script) {
    if (!fs::exists(ckpt)) throw ConfigError("checkpoint not found: " + ckpt);
    if (n_list.empty()) throw ConfigError("sweep-chunks: --n-list must not be empty");
    for (int n : n_list)
        if (n < 1) throw ConfigError("sweep-chunks: every n must be >= 1");
    if (reps < 1) throw ConfigError("sweep-chunks: --reps must be >= 1");
    const io::KvConfig kv = resolve_kv(g);
    if (g2p::subtokenize_text(script).empty()) throw ConfigError("sweep-chunks: script must be non-empty");

    auto [net, codec_cfg] = model::load_checkpoint(ckpt);
    codec::Codec codec(codec_cfg);
    const uint64_t master = std::stoull(kv.at("seed"));

    const std::string long_path = out_path(g, "sweep_long.csv");
    std::ofstream long_out(long_path);
    long_out << "initial_n,rep,seed,first_audio_ms,underruns,audio_s\n";

    struct SweepRow {
        int n;
        double mean_ms, p95_ms, mean_underruns, audio_s;
    };
    std::vector<SweepRow> rows;
    for (int n : n_list) {
        std::vector<double> lat_ms;
        double underruns = 0, audio_s = 0;
        for (int rep = 0; rep < reps; ++rep) {
            const uint64_t rep_seed = derive_seed(master, "rep" + std::to_string(rep));
            auto timing = sources::SourceTiming::from_kv(kv);
            timing.seed = rep_seed;
            auto ec = engine_config_from_kv(kv, ClockMode::kSim);
            ec.initial_chunk_tokens = n;
            ec.collect_audio = false;
            streaming::PipelineEngine engine(net, codec, ec);
            streaming::Query query;
            query.id = "n" + std::to_string(n) + "_rep" + std::to_string(rep);
            query.transcript = script;
            query.script = script;
            const auto result = engine.run(query, timing);
            const double ms = result.trace.first_audio_latency_us() / 1000.0;
            const double asec = (result.trace.t_last_audio_out_us - result.trace.t_first_audio_out_us) / 1e6;
            lat_ms.push_back(ms);
            underruns += result.trace.underrun_count;
            audio_s += asec;
            char line[160];
            std::snprintf(line, sizeof(line), "%d,%d,%llu,%.3f,%d,%.3f\n", n, rep,
                          static_cast<unsigned long long>(rep_seed), ms, result.trace.underrun_count, asec);
            long_out << line;
        }
        std::sort(lat_ms.begin(), lat_ms.end());
        const double mean = std::accumulate(lat_ms.begin(), lat_ms.end(), 0.0) / lat_ms.size();
        const size_t rank = (lat_ms.size() * 95 + 99) / 100;  // nearest-rank p95
        const double p95 = reps == 1 ? mean : lat_ms[std::min(lat_ms.size() - 1, rank - 1)];
        rows.push_back({n, mean, p95, underruns / reps, audio_s / reps});
    }
    long_out.close();

    const std::string sweep_path = out_path(g, "sweep.csv");
    {
        std::ofstream f(sweep_path);
        f << "initial_n,mean_first_audio_ms,p95_first_audio_ms,mean_underruns,total_audio_s\n";
        for (const auto& r : rows) {
            char line[160];
            std::snprintf(line, sizeof(line), "%d,%.3f,%.3f,%.3f,%.3f\n", r.n, r.mean_ms, r.p95_ms,
                          r.mean_underruns, r.audio_s);
            f << line;
        }
    }
    io::write_meta_sidecar(sweep_path, "sweep", "sweep-chunks", kv);
    io::write_meta_sidecar(long_path, "sweep_long", "sweep-chunks", kv);

    std::printf("%-10s %-20s %-20s %-16s %-14s\n", "initial_n", "mean_first_audio_ms", "p95_first_audio_ms",
                "mean_underruns", "total_audio_s");
    for (const auto& r : rows)
        std::printf("%-10d %-20.3f %-20.3f %-16.3f %-14.3f\n", r.n, r.mean_ms, r.p95_ms, r.mean_underruns,
                    r.audio_s);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"streaming speech-token synthesizer and latency bench"};
    app.require_subcommand(1);
    GlobalArgs g;

    auto* gen = app.add_subcommand("gen-corpus", "emit a deterministic synthetic training corpus");
    std::string gen_out = "corpus.tsv";
    corpus::GenSpec spec;
    add_common_options(gen, g);
    add_model_options(gen, g);
    gen->add_option("--out", gen_out, "output corpus file");
    gen->add_option("--pairs", spec.pairs, "number of pairs");
    gen->add_option("--min-words", spec.min_words, "min words per text");
    gen->add_option("--max-words", spec.max_words, "max words per text");
    gen->add_option("--min-tokens", spec.min_tokens, "min speech tokens per pair");
    gen->add_option("--max-tokens", spec.max_tokens, "max speech tokens per pair");

    auto* train = app.add_subcommand("train", "train a model on a corpus");
    std::string corpus_path, ckpt_out = "model.ckpt";
    int steps = 2000;
    double target_loss = 0.0;
    add_common_options(train, g);
    add_model_options(train, g);
    train->add_option("--corpus", corpus_path, "training corpus path")->required();
    train->add_option("--out", ckpt_out, "checkpoint output name");
    train->add_option("--steps", steps, "optimizer steps");
    train->add_option("--target-loss", target_loss, "stop early below this loss (0 = off)");
    add_kv_option(train, g, "--lr", "train.lr", "peak learning rate");
    add_kv_option(train, g, "--min-lr", "train.min_lr", "final learning rate");
    add_kv_option(train, g, "--warmup", "train.warmup_steps", "warmup steps");
    add_kv_option(train, g, "--decay-steps", "train.decay_steps", "decay horizon");
    add_kv_option(train, g, "--weight-decay", "train.weight_decay", "decoupled weight decay");
    add_kv_option(train, g, "--grad-clip", "train.grad_clip", "gradient norm clip");
    add_kv_option(train, g, "--batch", "train.batch_size", "pairs per step");

    auto* synth = app.add_subcommand("synth", "synthesize one utterance to WAV");
    std::string synth_ckpt, synth_text, synth_out = "synth.wav";
    int synth_max_tokens = 0;
    add_common_options(synth, g);
    synth->add_option("--ckpt", synth_ckpt, "checkpoint path")->required();
    synth->add_option("--text", synth_text, "text to speak")->required();
    synth->add_option("--out", synth_out, "WAV output name");
    synth->add_option("--max-tokens", synth_max_tokens, "generation cap (0 = block size)");

    auto* pipe = app.add_subcommand("pipeline", "run the full streaming pipeline");
    std::string pipe_ckpt, pipe_script, pipe_script_file, pipe_transcript;
    bool pipe_feed = false, pipe_sentence_wavs = false;
    add_common_options(pipe, g);
    add_timing_options(pipe, g);
    add_engine_options(pipe, g);
    pipe->add_option("--ckpt", pipe_ckpt, "checkpoint path")->required();
    pipe->add_option("--script", pipe_script, "scripted LLM response");
    pipe->add_option("--script-file", pipe_script_file, "file with the scripted response");
    pipe->add_option("--transcript", pipe_transcript, "ground-truth ASR transcript");
    pipe->add_flag("--feed", pipe_feed, "read words from stdin (<EOS> line ends; wall clock only)");
    pipe->add_flag("--per-sentence-wavs", pipe_sentence_wavs, "also write one WAV per sentence");

    auto* sweep = app.add_subcommand("sweep-chunks", "latency sweep over initial chunk sizes");
    std::string sweep_ckpt, sweep_script = "", sweep_n = "20,40,80,160";
    int sweep_reps = 10;
    add_common_options(sweep, g);
    add_timing_options(sweep, g);
    add_engine_options(sweep, g);
    sweep->add_option("--ckpt", sweep_ckpt, "checkpoint path")->required();
    sweep->add_option("--n-list", sweep_n, "comma-separated chunk sizes");
    sweep->add_option("--reps", sweep_reps, "repetitions per chunk size");
    sweep->add_option("--script", sweep_script, "scripted LLM response")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) return run_gen_corpus(g, gen_out, spec);
        if (train->parsed()) return run_train(g, corpus_path, ckpt_out, steps, target_loss);
        if (synth->parsed()) return run_synth(g, synth_ckpt, synth_text, synth_out, synth_max_tokens);
        if (pipe->parsed()) {
            std::string script = pipe_script;
            if (!pipe_script_file.empty()) {
                std::ifstream f(pipe_script_file);
                if (!f) throw ConfigError("cannot open script file: " + pipe_script_file);
                std::ostringstream buf;
                buf << f.rdbuf();
                script = buf.str();
            }
            return run_pipeline(g, pipe_ckpt, script, pipe_transcript, pipe_feed, pipe_sentence_wavs);
        }
        if (sweep->parsed()) {
            std::vector<int> n_list;
            std::istringstream in(sweep_n);
            std::string item;
            while (std::getline(in, item, ',')) n_list.push_back(std::stoi(item));
            return run_sweep(g, sweep_ckpt, n_list, sweep_reps, sweep_script);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const CorpusParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 2;
}
