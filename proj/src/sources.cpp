#include "llmvox/sources.hpp"

#include <cmath>
#include <istream>
#include <random>
#include <sstream>

namespace llmvox::sources {

void SourceTiming::validate() const {
    if (asr_delay_ms < 0 || first_word_delay_ms < 0 || jitter_ms < 0)
        throw ConfigError("timing: delays and jitter must be >= 0");
    if (!(words_per_second > 0.0) || !std::isfinite(words_per_second))
        throw ConfigError("timing: words_per_second must be finite and > 0");
}

io::KvConfig SourceTiming::to_kv() const {
    std::ostringstream wps;
    wps << words_per_second;
    return {{"timing.asr_delay_ms", std::to_string(asr_delay_ms)},
            {"timing.first_word_delay_ms", std::to_string(first_word_delay_ms)},
            {"timing.words_per_second", wps.str()},
            {"timing.jitter_ms", std::to_string(jitter_ms)},
            {"timing.seed", std::to_string(seed)}};
}

SourceTiming SourceTiming::from_kv(const io::KvConfig& kv) {
    SourceTiming t;
    auto get = [&](const char* key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    try {
        if (auto* v = get("timing.asr_delay_ms")) t.asr_delay_ms = std::stoi(*v);
        if (auto* v = get("timing.first_word_delay_ms")) t.first_word_delay_ms = std::stoi(*v);
        if (auto* v = get("timing.words_per_second")) t.words_per_second = std::stod(*v);
        if (auto* v = get("timing.jitter_ms")) t.jitter_ms = std::stoi(*v);
        if (auto* v = get("timing.seed")) t.seed = std::stoull(*v);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("timing: malformed numeric value in config");
    }
    t.validate();
    return t;
}

AsrResult asr_stub(const std::string& ground_truth_transcript, const SourceTiming& timing, int64_t query_time_us) {
    timing.validate();
    return {ground_truth_transcript, query_time_us + static_cast<int64_t>(timing.asr_delay_ms) * 1000};
}

std::vector<WordEvent> sim_llm_schedule(const std::string& script, const SourceTiming& timing,
                                        int64_t llm_start_us) {
    timing.validate();
    std::vector<std::string> words;
    {
        std::istringstream in(script);
        std::string w;
        while (in >> w) words.push_back(w);
    }
    const int64_t first = llm_start_us + static_cast<int64_t>(timing.first_word_delay_ms) * 1000;
    if (words.empty()) return {{"", first, true}};

    std::mt19937_64 rng(derive_seed(timing.seed, "sim_llm"));
    std::uniform_int_distribution<int> jitter(-timing.jitter_ms, timing.jitter_ms);
    const double interval_us = 1e6 / timing.words_per_second;

    std::vector<WordEvent> events;
    events.reserve(words.size());
    int64_t prev = llm_start_us;
    for (size_t i = 0; i < words.size(); ++i) {
        int64_t t = first + static_cast<int64_t>(std::llround(static_cast<double>(i) * interval_us));
        if (timing.jitter_ms > 0) t += static_cast<int64_t>(jitter(rng)) * 1000;
        t = std::max(t, prev);
        prev = t;
        events.push_back({words[i], t, i + 1 == words.size()});
    }
    return events;
}

int64_t SimWordSource::start(ExecContext& ctx) {
    const AsrResult asr = asr_stub(transcript_, timing_, ctx.now_us());
    ctx.sleep_until_us(asr.ready_time_us);
    schedule_ = sim_llm_schedule(script_, timing_, ctx.now_us());
    pos_ = 0;
    return asr.ready_time_us;
}

WordEvent SimWordSource::next(ExecContext& ctx) {
    if (pos_ >= schedule_.size()) throw std::logic_error("SimWordSource::next past the final event");
    WordEvent ev = schedule_[pos_++];
    ctx.sleep_until_us(ev.emit_time_us);
    return ev;
}

int64_t ExternalFeedSource::start(ExecContext& ctx) { return ctx.now_us(); }

WordEvent ExternalFeedSource::next(ExecContext& ctx) {
    if (done_) throw std::logic_error("ExternalFeedSource::next past the final event");
    std::string line;
    while (std::getline(*in_, line)) {
        size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        size_t e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        if (line == "<EOS>") {
            done_ = true;
            return {"", ctx.now_us(), true};
        }
        return {line, ctx.now_us(), false};
    }
    // end of stream without an explicit <EOS>
    done_ = true;
    return {"", ctx.now_us(), true};
}

}  // namespace llmvox::sources
