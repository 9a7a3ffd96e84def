#include "llmvox/streaming.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <mutex>

#include "llmvox/g2p.hpp"

namespace llmvox::streaming {

// ---- chunk schedule ----

ChunkPlan chunk_schedule(int initial_n, int total_tokens, int max_chunk) {
    if (initial_n < 1) throw ConfigError("chunk_schedule: initial_n must be >= 1");
    if (total_tokens < 0) throw ConfigError("chunk_schedule: negative token count");
    ChunkPlan plan;
    plan.initial_n = initial_n;
    int chunk_size = initial_n;
    int start = 1;
    while (start <= total_tokens) {
        const int end = std::min(start + chunk_size - 1, total_tokens);
        plan.ranges.emplace_back(start, end);
        start = end + 1;
        chunk_size *= 2;
        if (max_chunk > 0) chunk_size = std::min(chunk_size, max_chunk);
    }
    return plan;
}

void ChunkPlan::validate(int total_tokens, int max_chunk) const {
    int expect_start = 1;
    long long expect_size = initial_n;
    for (size_t k = 0; k < ranges.size(); ++k) {
        const auto [s, e] = ranges[k];
        if (s != expect_start) throw std::logic_error("chunk plan: ranges not contiguous");
        if (e < s || e > total_tokens) throw std::logic_error("chunk plan: range out of bounds");
        const bool last = k + 1 == ranges.size();
        const long long size = e - s + 1;
        if (!last && size != expect_size) throw std::logic_error("chunk plan: interior chunk size violates doubling");
        if (last && size > expect_size) throw std::logic_error("chunk plan: final chunk exceeds schedule");
        expect_start = e + 1;
        expect_size *= 2;
        if (max_chunk > 0) expect_size = std::min<long long>(expect_size, max_chunk);
    }
    if (expect_start != total_tokens + 1) throw std::logic_error("chunk plan: does not cover all tokens");
}

// ---- sentence splitting ----

namespace {

bool ends_sentence(const std::string& word) {
    if (word.empty()) return false;
    const char last = word.back();
    if (last == '.' || last == '!' || last == '?') return true;
    // U+061F Arabic question mark
    return word.size() >= 2 && static_cast<unsigned char>(word[word.size() - 2]) == 0xD8 &&
           static_cast<unsigned char>(word[word.size() - 1]) == 0x9F;
}

}  // namespace

std::optional<SentenceJob> SentenceSplitter::close_sentence() {
    std::string text = g2p::join_words(pending_);
    pending_.clear();
    if (text.empty()) return std::nullopt;
    SentenceJob job;
    job.index = next_index_++;
    job.text = std::move(text);
    job.assigned_worker = ((job.index - 1) % worker_count_) + 1;
    return job;
}

std::optional<SentenceJob> SentenceSplitter::feed(const std::string& word) {
    pending_.push_back(word);
    if (ends_sentence(word)) return close_sentence();
    return std::nullopt;
}

std::optional<SentenceJob> SentenceSplitter::flush() { return close_sentence(); }

std::vector<SentenceJob> split_sentences(std::span<const sources::WordEvent> words, int worker_count) {
    SentenceSplitter splitter(worker_count);
    std::vector<SentenceJob> jobs;
    for (const auto& ev : words) {
        if (!ev.word.empty()) {
            if (auto job = splitter.feed(ev.word)) jobs.push_back(std::move(*job));
        }
        if (ev.is_final) break;
    }
    if (auto job = splitter.flush()) jobs.push_back(std::move(*job));
    return jobs;
}

// ---- latency trace ----

void LatencyTrace::finalize() {
    int64_t* fields[] = {&t_query_us,       &t_asr_done_us,           &t_first_word_us,
                         &t_first_sentence_dispatch_us, &t_first_token_us, &t_first_chunk_decoded_us,
                         &t_first_audio_out_us,         &t_last_audio_out_us};
    int64_t prev = 0;
    for (auto* f : fields) {
        if (*f < 0) *f = prev;
        prev = *f;
    }
}

bool LatencyTrace::monotone() const {
    const int64_t ts[] = {t_query_us,       t_asr_done_us,           t_first_word_us, t_first_sentence_dispatch_us,
                          t_first_token_us, t_first_chunk_decoded_us, t_first_audio_out_us, t_last_audio_out_us};
    for (size_t i = 1; i < std::size(ts); ++i)
        if (ts[i] < ts[i - 1]) return false;
    return true;
}

std::string LatencyTrace::csv_header() {
    return "query_id,t_query_ms,t_asr_done_ms,t_first_word_ms,t_first_sentence_dispatch_ms,t_first_token_ms,"
           "t_first_chunk_decoded_ms,t_first_audio_out_ms,t_last_audio_out_ms,underrun_count,initial_n";
}

std::string LatencyTrace::csv_row() const {
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%s,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f,%d,%d", query_id.c_str(),
                  t_query_us / 1000.0, t_asr_done_us / 1000.0, t_first_word_us / 1000.0,
                  t_first_sentence_dispatch_us / 1000.0, t_first_token_us / 1000.0,
                  t_first_chunk_decoded_us / 1000.0, t_first_audio_out_us / 1000.0, t_last_audio_out_us / 1000.0,
                  underrun_count, initial_n);
    return buf;
}

// ---- engine ----

void EngineConfig::validate() const {
    if (worker_count < 1) throw ConfigError("engine: worker_count must be >= 1");
    if (queue_capacity < 1) throw ConfigError("engine: queue_capacity must be >= 1");
    if (initial_chunk_tokens < 1) throw ConfigError("engine: initial chunk size must be >= 1");
    if (max_chunk_tokens < 0 || max_tokens_per_sentence < 0)
        throw ConfigError("engine: chunk/token limits must be >= 0");
    if (cost.token_gen_us < 0 || cost.decode_fixed_us < 0 || cost.decode_per_token_us < 0)
        throw ConfigError("engine: cost model values must be >= 0");
}

namespace {

struct DecodeRequest {
    int sentence = 0;
    int ordinal = 0;
    std::vector<SpeechToken> tokens;
    bool sentence_end = false;
    bool poison = false;
    std::string error;
};

struct AudioChunk {
    int sentence = 0;
    int ordinal = 0;
    std::vector<float> samples;
    int64_t ready_us = 0;
    bool sentence_end = false;
    bool poison = false;
    std::string error;
};

void atomic_min_set(std::atomic<int64_t>& field, int64_t t) {
    int64_t cur = field.load();
    while ((cur < 0 || t < cur) && !field.compare_exchange_weak(cur, t)) {
    }
}

struct RunState {
    RunState(ExecContext& ctx, const EngineConfig& cfg)
        : q0("Q0.words", cfg.queue_capacity, ctx) {
        for (int i = 0; i < cfg.worker_count; ++i) {
            const std::string n = std::to_string(i + 1);
            job_q.push_back(std::make_unique<BoundedQueue<SentenceJob>>("Q" + n + ".jobs", cfg.queue_capacity, ctx));
            dec_q.push_back(
                std::make_unique<BoundedQueue<DecodeRequest>>("D" + n + ".decode", cfg.queue_capacity, ctx));
            prod_q.push_back(std::make_unique<BoundedQueue<AudioChunk>>("P" + n + ".audio", cfg.queue_capacity, ctx));
        }
        jobs_per_worker.assign(cfg.worker_count, 0);
        cache_resets.assign(cfg.worker_count, 0);
        max_steps.assign(cfg.worker_count, 0);
        worker_results.resize(cfg.worker_count);
    }

    BoundedQueue<sources::WordEvent> q0;
    std::vector<std::unique_ptr<BoundedQueue<SentenceJob>>> job_q;
    std::vector<std::unique_ptr<BoundedQueue<DecodeRequest>>> dec_q;
    std::vector<std::unique_ptr<BoundedQueue<AudioChunk>>> prod_q;

    // trace capture; single-writer fields plus atomic mins shared by workers
    int64_t t_query = -1, t_asr = -1, t_first_word = -1, t_dispatch = -1;
    int64_t t_first_audio = -1, t_last_audio = -1;
    std::atomic<int64_t> first_token{-1};
    std::atomic<int64_t> first_chunk{-1};
    int underruns = 0;

    std::vector<int> jobs_per_worker, cache_resets, max_steps;
    std::vector<std::vector<SentenceResult>> worker_results;
    int sentences_dispatched = 0;
    int poisoned = 0;
    std::atomic<int64_t> inflight_samples{0};
    std::atomic<int64_t> peak_inflight{0};

    std::vector<float> audio;

    std::mutex err_mu;
    std::exception_ptr first_error;

    void inflight_add(int64_t n) {
        const int64_t cur = inflight_samples.fetch_add(n) + n;
        int64_t peak = peak_inflight.load();
        while (cur > peak && !peak_inflight.compare_exchange_weak(peak, cur)) {
        }
    }

    void fail(std::exception_ptr err) {
        {
            std::lock_guard<std::mutex> lk(err_mu);
            if (!first_error) first_error = err;
        }
        q0.close();
        for (auto& q : job_q) q->close();
        for (auto& q : dec_q) q->close();
        for (auto& q : prod_q) q->close();
    }
};

int64_t samples_to_us(size_t samples, int rate) {
    return static_cast<int64_t>(samples) * 1000000 / rate;
}

}  // namespace

PipelineEngine::PipelineEngine(model::NetworkF& net, const codec::Codec& codec, EngineConfig cfg)
    : net_(&net), codec_(&codec), cfg_(cfg) {
    cfg_.validate();
    // constructing a session validates model/codec compatibility up front
    model::GenSession<float> probe(net, codec);
}

PipelineResult PipelineEngine::run(const Query& query, const sources::SourceTiming& timing, AudioSink* sink) {
    sources::SimWordSource source(query.transcript, query.script, timing);
    return run(source, query.id, sink);
}

PipelineResult PipelineEngine::run(sources::WordSource& source, const std::string& query_id, AudioSink* sink) {
    auto ctx_owner = make_context(cfg_.clock_mode);
    ExecContext& ctx = *ctx_owner;
    RunState st(ctx, cfg_);
    const int W = cfg_.worker_count;
    const int rate = codec_->config().sample_rate_hz;
    const int cap = [&] {
        const int block = net_->config().block_size;
        return cfg_.max_tokens_per_sentence > 0 ? std::min(cfg_.max_tokens_per_sentence, block) : block;
    }();

    auto guard = [&st](std::function<void()> body) {
        return [&st, body = std::move(body)] {
            try {
                body();
            } catch (const std::exception&) {
                st.fail(std::current_exception());
            }
        };
    };

    ctx.spawn("source", guard([&] {
        st.t_query = ctx.now_us();
        st.t_asr = source.start(ctx);
        for (;;) {
            const sources::WordEvent ev = source.next(ctx);
            if (st.t_first_word < 0) st.t_first_word = ctx.now_us();
            const bool final_event = ev.is_final;
            st.q0.push(ev);
            if (final_event) break;
        }
        st.q0.close();
    }));

    ctx.spawn("splitter", guard([&] {
        SentenceSplitter splitter(W);
        auto dispatch = [&](std::optional<SentenceJob> job) {
            if (!job) return;
            if (st.t_dispatch < 0) st.t_dispatch = ctx.now_us();
            ++st.sentences_dispatched;
            st.job_q[job->assigned_worker - 1]->push(std::move(*job));
        };
        while (auto ev = st.q0.pop()) {
            if (!ev->word.empty()) dispatch(splitter.feed(ev->word));
            if (ev->is_final) break;
        }
        dispatch(splitter.flush());
        for (auto& q : st.job_q) q->close();
    }));

    for (int w = 0; w < W; ++w) {
        ctx.spawn("worker" + std::to_string(w + 1), guard([&, w] {
            model::SamplingConfig sampling = cfg_.sampling;
            sampling.seed = derive_seed(cfg_.sampling.seed, "worker" + std::to_string(w + 1));
            model::GenSession<float> session(*net_, *codec_, sampling);
            while (auto job = st.job_q[w]->pop()) {
                ++st.jobs_per_worker[w];
                ++st.cache_resets[w];
                session.begin(job->text);
                SentenceResult res;
                res.index = job->index;
                res.worker = job->assigned_worker;
                std::vector<SpeechToken> chunk_tokens;
                int ordinal = 1;
                int chunk_size = cfg_.initial_chunk_tokens;
                int boundary = cfg_.initial_chunk_tokens;
                int chunk_start = 1;
                auto flush_chunk = [&] {
                    res.chunk_ranges.emplace_back(chunk_start, static_cast<int>(res.tokens.size()));
                    chunk_start = static_cast<int>(res.tokens.size()) + 1;
                    st.dec_q[w]->push({job->index, ordinal++, std::move(chunk_tokens), false, false, {}});
                    chunk_tokens.clear();
                };
                try {
                    while (session.steps() < cap) {
                        const auto tok = session.step();
                        ctx.charge_us(cfg_.cost.token_gen_us);
                        if (!tok) break;  // end-of-speech sentinel
                        if (res.tokens.empty()) atomic_min_set(st.first_token, ctx.now_us());
                        res.tokens.push_back(*tok);
                        chunk_tokens.push_back(*tok);
                        if (static_cast<int>(res.tokens.size()) == boundary) {
                            flush_chunk();
                            chunk_size *= 2;
                            if (cfg_.max_chunk_tokens > 0) chunk_size = std::min(chunk_size, cfg_.max_chunk_tokens);
                            boundary += chunk_size;
                        }
                    }
                    if (!chunk_tokens.empty()) flush_chunk();
                    st.dec_q[w]->push({job->index, ordinal, {}, true, false, {}});
                } catch (const std::exception& e) {
                    res.poisoned = true;
                    res.error = e.what();
                    st.dec_q[w]->push({job->index, ordinal, {}, true, true, e.what()});
                }
                st.max_steps[w] = std::max(st.max_steps[w], session.steps());
                st.worker_results[w].push_back(std::move(res));
            }
            st.dec_q[w]->close();
        }));
    }

    for (int w = 0; w < W; ++w) {
        ctx.spawn("decoder" + std::to_string(w + 1), guard([&, w] {
            while (auto req = st.dec_q[w]->pop()) {
                AudioChunk chunk;
                chunk.sentence = req->sentence;
                chunk.ordinal = req->ordinal;
                chunk.sentence_end = req->sentence_end;
                chunk.poison = req->poison;
                chunk.error = req->error;
                if (!req->poison && !req->tokens.empty()) {
                    codec::AudioBuffer buf = codec_->decode(req->tokens);
                    ctx.charge_us(cfg_.cost.decode_fixed_us +
                                  cfg_.cost.decode_per_token_us * static_cast<int64_t>(req->tokens.size()));
                    chunk.samples = std::move(buf.samples);
                }
                chunk.ready_us = ctx.now_us();
                if (!chunk.samples.empty()) {
                    atomic_min_set(st.first_chunk, chunk.ready_us);
                    st.inflight_add(static_cast<int64_t>(chunk.samples.size()));
                }
                st.prod_q[w]->push(std::move(chunk));
            }
            st.prod_q[w]->close();
        }));
    }

    ctx.spawn("playback", guard([&] {
        int next_sentence = 1;
        int64_t play_head = -1;
        auto emit = [&](std::span<const float> samples) {
            if (sink) sink->write(samples);
            if (cfg_.collect_audio) st.audio.insert(st.audio.end(), samples.begin(), samples.end());
        };
        for (;;) {
            auto& q = *st.prod_q[(next_sentence - 1) % W];
            auto chunk = q.pop();
            if (!chunk) break;  // queue closed and drained: no further sentences
            if (chunk->sentence != next_sentence)
                throw std::logic_error("playback: expected sentence " + std::to_string(next_sentence) + ", got " +
                                       std::to_string(chunk->sentence));
            if (chunk->poison) {
                ++st.poisoned;
                LLMVOX_LOG_WARN("sentence %d skipped after synthesis failure: %s", chunk->sentence,
                                chunk->error.c_str());
            }
            if (!chunk->samples.empty()) {
                const int64_t arrival = ctx.now_us();
                int64_t start;
                if (play_head < 0) {
                    start = arrival;
                    st.t_first_audio = start;
                } else if (arrival > play_head) {
                    ++st.underruns;
                    const int64_t gap_us = arrival - play_head;
                    const size_t silence = static_cast<size_t>(gap_us * rate / 1000000);
                    const std::vector<float> zeros(silence, 0.0f);
                    emit(zeros);
                    start = arrival;
                } else {
                    start = play_head;
                }
                emit(chunk->samples);
                st.inflight_add(-static_cast<int64_t>(chunk->samples.size()));
                play_head = start + samples_to_us(chunk->samples.size(), rate);
                st.t_last_audio = play_head;
                ctx.sleep_until_us(play_head);
            }
            if (chunk->sentence_end) ++next_sentence;
        }
    }));

    ctx.run_to_completion();
    if (st.first_error) std::rethrow_exception(st.first_error);

    PipelineResult result;
    result.trace.query_id = query_id;
    result.trace.initial_n = cfg_.initial_chunk_tokens;
    result.trace.t_query_us = st.t_query;
    result.trace.t_asr_done_us = st.t_asr;
    result.trace.t_first_word_us = st.t_first_word;
    result.trace.t_first_sentence_dispatch_us = st.t_dispatch;
    result.trace.t_first_token_us = st.first_token.load();
    result.trace.t_first_chunk_decoded_us = st.first_chunk.load();
    result.trace.t_first_audio_out_us = st.t_first_audio;
    result.trace.t_last_audio_out_us = st.t_last_audio;
    result.trace.underrun_count = st.underruns;
    result.trace.finalize();

    result.audio = std::move(st.audio);
    for (auto& wr : st.worker_results)
        for (auto& r : wr) result.sentences.push_back(std::move(r));
    std::sort(result.sentences.begin(), result.sentences.end(),
              [](const SentenceResult& a, const SentenceResult& b) { return a.index < b.index; });

    auto& stats = result.stats;
    stats.queue_peaks.emplace_back(st.q0.name(), st.q0.peak_occupancy());
    for (auto& q : st.job_q) stats.queue_peaks.emplace_back(q->name(), q->peak_occupancy());
    for (auto& q : st.dec_q) stats.queue_peaks.emplace_back(q->name(), q->peak_occupancy());
    for (auto& q : st.prod_q) stats.queue_peaks.emplace_back(q->name(), q->peak_occupancy());
    stats.jobs_per_worker = st.jobs_per_worker;
    stats.sentences = st.sentences_dispatched;
    stats.poisoned_sentences = st.poisoned;
    for (int c : st.cache_resets) stats.cache_resets += c;
    for (int m : st.max_steps) stats.max_session_steps = std::max(stats.max_session_steps, m);
    stats.peak_inflight_audio_samples = st.peak_inflight.load();
    return result;
}

}  // namespace llmvox::streaming
