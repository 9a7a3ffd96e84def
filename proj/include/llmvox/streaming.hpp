// Multi-queue streaming inference engine: words from the source are split
// into sentences and dealt alternately to replica synthesis workers; each
// worker generates speech tokens autoregressively and hands doubling-size
// token chunks to its decoder; playback merges the per-worker producer
// queues back into global sentence order, paced at the audio rate, counting
// underruns. Runs identically (logical outputs) under the cooperative sim
// clock and the threaded wall clock.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "llmvox/codec.hpp"
#include "llmvox/model.hpp"
#include "llmvox/runtime.hpp"
#include "llmvox/sources.hpp"

namespace llmvox::streaming {

using codec::SpeechToken;

struct SentenceJob {
    int index = 0;  // global 1-based sentence order
    std::string text;
    int assigned_worker = 0;  // 1-based; ((index-1) mod workers) + 1
};

// Doubling chunk partition of token positions 1..total, 1-based inclusive
// ranges: sizes n, 2n, 4n, ... with the last range clipped.
struct ChunkPlan {
    std::vector<std::pair<int, int>> ranges;
    int initial_n = 0;

    void validate(int total_tokens, int max_chunk = 0) const;
};

ChunkPlan chunk_schedule(int initial_n, int total_tokens, int max_chunk = 0);

// Incremental sentence accumulator. A sentence closes when a word ends with
// '.', '!', '?' or U+061F, or at the final word; empty fragments are
// dropped without consuming an index.
class SentenceSplitter {
  public:
    explicit SentenceSplitter(int worker_count) : worker_count_(worker_count) {}

    std::optional<SentenceJob> feed(const std::string& word);
    std::optional<SentenceJob> flush();
    int emitted() const { return next_index_ - 1; }

  private:
    std::optional<SentenceJob> close_sentence();

    std::vector<std::string> pending_;
    int worker_count_;
    int next_index_ = 1;
};

// Batch convenience over a finished word stream.
std::vector<SentenceJob> split_sentences(std::span<const sources::WordEvent> words, int worker_count = 2);

struct LatencyTrace {
    std::string query_id = "q0";
    int64_t t_query_us = -1;
    int64_t t_asr_done_us = -1;
    int64_t t_first_word_us = -1;
    int64_t t_first_sentence_dispatch_us = -1;
    int64_t t_first_token_us = -1;
    int64_t t_first_chunk_decoded_us = -1;
    int64_t t_first_audio_out_us = -1;
    int64_t t_last_audio_out_us = -1;
    int underrun_count = 0;
    int initial_n = 0;

    // Stages that never happened (for example no audio at all) inherit the
    // previous stage's timestamp so the listed order stays non-decreasing.
    void finalize();
    bool monotone() const;
    int64_t first_audio_latency_us() const { return t_first_audio_out_us - t_query_us; }

    static std::string csv_header();
    std::string csv_row() const;
};

// Sim-mode compute cost model, charged to the virtual clock per generated
// token and per decoded chunk. Defaults are well below the 40 tok/s
// real-time budget of 25 ms per token.
struct SynthCost {
    int64_t token_gen_us = 2000;
    int64_t decode_fixed_us = 1000;
    int64_t decode_per_token_us = 200;
};

struct EngineConfig {
    int worker_count = 2;
    size_t queue_capacity = 64;
    int initial_chunk_tokens = 40;
    int max_chunk_tokens = 0;        // 0 = unbounded doubling
    int max_tokens_per_sentence = 0;  // 0 = up to block_size
    ClockMode clock_mode = ClockMode::kSim;
    SynthCost cost;
    model::SamplingConfig sampling;
    bool collect_audio = true;

    void validate() const;
};

struct EngineStats {
    std::vector<std::pair<std::string, size_t>> queue_peaks;
    std::vector<int> jobs_per_worker;
    int sentences = 0;
    int cache_resets = 0;
    int max_session_steps = 0;
    int poisoned_sentences = 0;
    int64_t peak_inflight_audio_samples = 0;

    size_t max_queue_peak() const {
        size_t m = 0;
        for (const auto& [name, peak] : queue_peaks) m = std::max(m, peak);
        return m;
    }
};

struct SentenceResult {
    int index = 0;
    int worker = 0;
    std::vector<SpeechToken> tokens;
    std::vector<std::pair<int, int>> chunk_ranges;  // as emitted by the online scheduler
    bool poisoned = false;
    std::string error;
};

struct PipelineResult {
    LatencyTrace trace;
    std::vector<float> audio;  // played samples including underrun silence
    std::vector<SentenceResult> sentences;
    EngineStats stats;
};

class AudioSink {
  public:
    virtual ~AudioSink() = default;
    virtual void write(std::span<const float> samples) = 0;
};

struct Query {
    std::string id = "q0";
    std::string transcript;  // ground truth handed to the ASR stub
    std::string script;      // scripted LLM response
};

class PipelineEngine {
  public:
    PipelineEngine(model::NetworkF& net, const codec::Codec& codec, EngineConfig cfg);

    PipelineResult run(const Query& query, const sources::SourceTiming& timing, AudioSink* sink = nullptr);
    PipelineResult run(sources::WordSource& source, const std::string& query_id, AudioSink* sink = nullptr);

  private:
    model::NetworkF* net_;
    const codec::Codec* codec_;
    EngineConfig cfg_;
};

}  // namespace llmvox::streaming
