// Upstream stand-ins for the speech dialogue front end: a delay-only ASR
// stub and a simulated streaming LLM that emits a scripted response word by
// word on a configurable schedule, plus an adapter for external
// newline-delimited word feeds.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "llmvox/common.hpp"
#include "llmvox/runtime.hpp"
#include "llmvox/serialize.hpp"

namespace llmvox::sources {

struct WordEvent {
    std::string word;
    int64_t emit_time_us = 0;
    bool is_final = false;
};

struct SourceTiming {
    int asr_delay_ms = 100;
    int first_word_delay_ms = 200;
    double words_per_second = 5.0;
    int jitter_ms = 0;
    uint64_t seed = 0;

    void validate() const;
    io::KvConfig to_kv() const;
    static SourceTiming from_kv(const io::KvConfig& kv);
};

// ASR stub: the query's ground-truth transcript becomes available
// asr_delay_ms after the query timestamp.
struct AsrResult {
    std::string transcript;
    int64_t ready_time_us = 0;
};
AsrResult asr_stub(const std::string& ground_truth_transcript, const SourceTiming& timing, int64_t query_time_us);

// Word schedule for a scripted response: word i lands at
// llm_start + first_word_delay + i/words_per_second, plus seeded jitter,
// clamped non-decreasing. An empty script yields a single is_final event
// with an empty word.
std::vector<WordEvent> sim_llm_schedule(const std::string& script, const SourceTiming& timing,
                                        int64_t llm_start_us);

// Blocking word producer driven by an execution context.
class WordSource {
  public:
    virtual ~WordSource() = default;
    // Runs the pre-LLM stage (ASR); returns its completion time.
    virtual int64_t start(ExecContext& ctx) = 0;
    // Blocks until the next word event; the last event has is_final set.
    virtual WordEvent next(ExecContext& ctx) = 0;
};

class SimWordSource final : public WordSource {
  public:
    SimWordSource(std::string transcript, std::string script, SourceTiming timing)
        : transcript_(std::move(transcript)), script_(std::move(script)), timing_(timing) {
        timing_.validate();
    }

    int64_t start(ExecContext& ctx) override;
    WordEvent next(ExecContext& ctx) override;
    const std::string& transcript() const { return transcript_; }

  private:
    std::string transcript_;
    std::string script_;
    SourceTiming timing_;
    std::vector<WordEvent> schedule_;
    size_t pos_ = 0;
};

// Reads newline-delimited UTF-8 words; a line holding only `<EOS>` (or end
// of stream) marks the final event. Reads block for real, so this source is
// meant for the wall clock.
class ExternalFeedSource final : public WordSource {
  public:
    explicit ExternalFeedSource(std::istream& in) : in_(&in) {}

    int64_t start(ExecContext& ctx) override;
    WordEvent next(ExecContext& ctx) override;

  private:
    std::istream* in_;
    bool done_ = false;
};

}  // namespace llmvox::sources
