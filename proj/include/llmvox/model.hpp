// Decoder-only autoregressive transformer over speech tokens. Each input
// frame concatenates the byte-level text embedding for the step with the
// previous token's codec feature, L2-normalized, plus a learned positional
// row. Templated on the scalar type so tests can run the identical math at
// 64-bit precision.
#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "llmvox/codec.hpp"
#include "llmvox/common.hpp"
#include "llmvox/g2p.hpp"
#include "llmvox/mat.hpp"
#include "llmvox/serialize.hpp"

namespace llmvox::model {

using codec::SpeechToken;

struct ModelConfig {
    int n_layer = 4;
    int n_head = 8;
    int block_size = 1024;
    int text_dim = 256;
    int feature_dim = 512;
    int vocab_out = 4097;  // codec vocab + end-of-speech sentinel
    uint64_t seed = 0;

    int n_embd() const { return text_dim + feature_dim; }
    int mlp_dim() const { return 4 * n_embd(); }
    SpeechToken sentinel_id() const { return vocab_out - 1; }

    void validate() const {
        if (n_layer < 1) throw ConfigError("model: n_layer must be >= 1");
        if (text_dim < 1 || feature_dim < 1) throw ConfigError("model: text_dim and feature_dim must be >= 1");
        if (n_head < 1 || n_embd() % n_head != 0)
            throw ConfigError("model: n_embd " + std::to_string(n_embd()) + " not divisible by n_head " +
                              std::to_string(n_head));
        if (block_size < 2) throw ConfigError("model: block_size must be >= 2");
        if (vocab_out < 2) throw ConfigError("model: vocab_out must be >= 2");
    }

    io::KvConfig to_kv() const;
    static ModelConfig from_kv(const io::KvConfig& kv);
};

struct TrainingPair {
    std::string text;
    std::vector<SpeechToken> speech_tokens;
};

template <class S>
struct LayerParams {
    Mat<S> ln1_g, ln1_b;
    Mat<S> wq, bq, wk, bk, wv, bv, wo, bo;
    Mat<S> ln2_g, ln2_b;
    Mat<S> w1, b1, w2, b2;
};

template <class S>
struct Params {
    Mat<S> text_table;  // g2p embedding table, trained jointly
    Mat<S> pos;
    std::vector<LayerParams<S>> layers;
    Mat<S> lnf_g, lnf_b;
    Mat<S> head;

    struct Named {
        std::string name;
        Mat<S>* mat;
        bool decay;  // decoupled weight decay applies to 2-D weights only
    };

    std::vector<Named> all() {
        std::vector<Named> out;
        out.push_back({"g2p.table", &text_table, true});
        out.push_back({"pos", &pos, true});
        for (size_t l = 0; l < layers.size(); ++l) {
            auto& lp = layers[l];
            const std::string p = "layer" + std::to_string(l) + ".";
            out.push_back({p + "ln1.g", &lp.ln1_g, false});
            out.push_back({p + "ln1.b", &lp.ln1_b, false});
            out.push_back({p + "attn.wq", &lp.wq, true});
            out.push_back({p + "attn.bq", &lp.bq, false});
            out.push_back({p + "attn.wk", &lp.wk, true});
            out.push_back({p + "attn.bk", &lp.bk, false});
            out.push_back({p + "attn.wv", &lp.wv, true});
            out.push_back({p + "attn.bv", &lp.bv, false});
            out.push_back({p + "attn.wo", &lp.wo, true});
            out.push_back({p + "attn.bo", &lp.bo, false});
            out.push_back({p + "ln2.g", &lp.ln2_g, false});
            out.push_back({p + "ln2.b", &lp.ln2_b, false});
            out.push_back({p + "mlp.w1", &lp.w1, true});
            out.push_back({p + "mlp.b1", &lp.b1, false});
            out.push_back({p + "mlp.w2", &lp.w2, true});
            out.push_back({p + "mlp.b2", &lp.b2, false});
        }
        out.push_back({"lnf.g", &lnf_g, false});
        out.push_back({"lnf.b", &lnf_b, false});
        out.push_back({"head", &head, true});
        return out;
    }

    void init_shapes(const ModelConfig& cfg) {
        const int d = cfg.n_embd();
        const int f = cfg.mlp_dim();
        text_table = Mat<S>(g2p::kTableRows, cfg.text_dim);
        pos = Mat<S>(cfg.block_size, d);
        layers.assign(cfg.n_layer, LayerParams<S>{});
        for (auto& lp : layers) {
            lp.ln1_g = Mat<S>(1, d);
            lp.ln1_b = Mat<S>(1, d);
            lp.wq = Mat<S>(d, d);
            lp.bq = Mat<S>(1, d);
            lp.wk = Mat<S>(d, d);
            lp.bk = Mat<S>(1, d);
            lp.wv = Mat<S>(d, d);
            lp.bv = Mat<S>(1, d);
            lp.wo = Mat<S>(d, d);
            lp.bo = Mat<S>(1, d);
            lp.ln2_g = Mat<S>(1, d);
            lp.ln2_b = Mat<S>(1, d);
            lp.w1 = Mat<S>(d, f);
            lp.b1 = Mat<S>(1, f);
            lp.w2 = Mat<S>(f, d);
            lp.b2 = Mat<S>(1, d);
        }
        lnf_g = Mat<S>(1, d);
        lnf_b = Mat<S>(1, d);
        head = Mat<S>(d, cfg.vocab_out);
    }

    void init_random(const ModelConfig& cfg) {
        init_shapes(cfg);
        for (auto& named : all()) {
            const bool is_gain = named.name.size() >= 2 && named.name.substr(named.name.size() - 2) == ".g" &&
                                 named.name.find("ln") != std::string::npos;
            const bool is_bias = !named.decay && !is_gain;
            std::mt19937_64 rng(derive_seed(cfg.seed, named.name));
            if (is_gain) {
                named.mat->fill_const(S(1));
            } else if (is_bias) {
                named.mat->fill_const(S(0));
            } else {
                named.mat->fill_normal(rng, 0.02);
            }
        }
    }

    void zero_all() {
        for (auto& named : all()) named.mat->zero();
    }

    bool all_finite() {
        for (auto& named : all())
            if (!named.mat->all_finite()) return false;
        return true;
    }
};

// Per-layer activations captured by the training forward pass.
template <class S>
struct LayerStash {
    Mat<S> h_in, xhat1, a1, q, k, v, probs /* n_head*T*T */, attcat, h_mid, xhat2, a2, u, g;
    std::vector<S> rstd1, rstd2;
};

template <class S>
struct ForwardStash {
    Mat<S> frames;  // assembled z (input to layer 0)
    std::vector<LayerStash<S>> layers;
    Mat<S> xhatf, hf;
    std::vector<S> rstdf;
    // embedding-assembly context (empty when forward ran on raw frames)
    std::vector<int> table_rows;      // text-table row used per step
    Mat<S> x_prenorm;
    std::vector<S> inv_norm;          // 0 marks an all-zero frame
};

template <class S>
class Network {
  public:
    explicit Network(const ModelConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        params_.init_random(cfg_);
    }

    const ModelConfig& config() const { return cfg_; }
    Params<S>& params() { return params_; }
    const Params<S>& params() const { return params_; }

    // Builds frames z_1..z_T with T = prev_tokens.size() + 1: text side is the
    // byte embedding while steps remain, PAD beyond; acoustic side is the
    // previous token's codec feature, zero at the first step.
    Mat<S> assemble_inputs(std::span<const g2p::ByteId> bytes, std::span<const SpeechToken> prev_tokens,
                           const codec::Codec& codec, ForwardStash<S>* stash = nullptr) const;

    // Full-sequence causal forward; row t of the result depends only on
    // frames 0..t.
    Mat<S> forward_frames(const Mat<S>& frames, ForwardStash<S>* stash = nullptr) const;

    Mat<S> forward_text(const std::string& text, std::span<const SpeechToken> prev_tokens,
                        const codec::Codec& codec) const {
        const auto bytes = g2p::subtokenize_text(text);
        return forward_frames(assemble_inputs(bytes, prev_tokens, codec));
    }

  private:
    void layer_norm_row(const S* x, const S* gain, const S* bias, int d, S* xhat, S* out, S* rstd) const;

    ModelConfig cfg_;
    Params<S> params_;

    template <class>
    friend class GenSession;
    template <class>
    friend class Trainer;
};

enum class SamplingMode { kGreedy, kTemperature };

struct SamplingConfig {
    SamplingMode mode = SamplingMode::kGreedy;
    double temperature = 1.0;
    uint64_t seed = 0;
};

// Incremental generation with a per-session KV cache. Logits from cached
// stepping match full-sequence recomputation.
template <class S>
class GenSession {
  public:
    GenSession(const Network<S>& net, const codec::Codec& codec, SamplingConfig sampling = {})
        : net_(&net), codec_(&codec), sampling_(sampling), rng_(derive_seed(sampling.seed, "gen.sampling")) {
        const auto& cfg = net.config();
        if (cfg.vocab_out != codec.config().vocab_size + 1)
            throw ConfigError("model vocab_out " + std::to_string(cfg.vocab_out) +
                              " != codec vocab_size + 1 = " + std::to_string(codec.config().vocab_size + 1));
        if (cfg.feature_dim != codec.config().feature_dim)
            throw ConfigError("model feature_dim != codec feature_dim");
        k_cache_.assign(cfg.n_layer, Mat<S>(cfg.block_size, cfg.n_embd()));
        v_cache_.assign(cfg.n_layer, Mat<S>(cfg.block_size, cfg.n_embd()));
    }

    // Resets the KV cache and starts a fresh utterance.
    void begin(const std::string& text) {
        bytes_ = g2p::subtokenize_text(text);
        steps_ = 0;
        finished_ = false;
        emitted_.clear();
    }

    // Runs one autoregressive step. Returns the emitted token, or nullopt
    // once the end-of-speech sentinel fires (sentinel excluded from output).
    std::optional<SpeechToken> step();

    bool finished() const { return finished_; }
    int steps() const { return steps_; }
    const std::vector<SpeechToken>& emitted() const { return emitted_; }
    const std::vector<S>& last_logits() const { return last_logits_; }

  private:
    SpeechToken pick_token();

    const Network<S>* net_;
    const codec::Codec* codec_;
    SamplingConfig sampling_;
    std::mt19937_64 rng_;
    std::vector<g2p::ByteId> bytes_;
    std::vector<Mat<S>> k_cache_, v_cache_;
    std::vector<SpeechToken> emitted_;
    std::vector<S> last_logits_;
    int steps_ = 0;
    bool finished_ = false;
};

// Non-streaming convenience path: emits tokens until the sentinel or
// max_tokens, whichever comes first.
template <class S>
std::vector<SpeechToken> generate(const std::string& text, const Network<S>& net, const codec::Codec& codec,
                                  int max_tokens, SamplingConfig sampling = {}) {
    if (g2p::subtokenize_text(text).empty()) {
        LLMVOX_LOG_WARN("generate called with zero-length text; emitting nothing");
        return {};
    }
    GenSession<S> session(net, codec, sampling);
    session.begin(text);
    const int limit = std::min(max_tokens, net.config().block_size);
    std::vector<SpeechToken> out;
    for (int i = 0; i < limit; ++i) {
        auto tok = session.step();
        if (!tok) break;
        out.push_back(*tok);
    }
    return out;
}

// ---- implementation ----

template <class S>
void Network<S>::layer_norm_row(const S* x, const S* gain, const S* bias, int d, S* xhat, S* out, S* rstd) const {
    S mu = S(0);
    for (int i = 0; i < d; ++i) mu += x[i];
    mu /= S(d);
    S var = S(0);
    for (int i = 0; i < d; ++i) {
        const S c = x[i] - mu;
        var += c * c;
    }
    var /= S(d);
    const S r = S(1) / std::sqrt(var + S(1e-5));
    *rstd = r;
    for (int i = 0; i < d; ++i) {
        xhat[i] = (x[i] - mu) * r;
        out[i] = xhat[i] * gain[i] + bias[i];
    }
}

template <class S>
Mat<S> Network<S>::assemble_inputs(std::span<const g2p::ByteId> bytes, std::span<const SpeechToken> prev_tokens,
                                   const codec::Codec& codec, ForwardStash<S>* stash) const {
    const int d = cfg_.n_embd();
    const int td = cfg_.text_dim;
    const int fd = cfg_.feature_dim;
    const size_t frames_n = prev_tokens.size() + 1;
    if (frames_n > static_cast<size_t>(cfg_.block_size))
        throw ContextOverflowError("context overflow: " + std::to_string(frames_n) + " frames exceed block_size " +
                                   std::to_string(cfg_.block_size));
    Mat<S> z(static_cast<int>(frames_n), d);
    if (stash) {
        stash->table_rows.assign(frames_n, 0);
        stash->x_prenorm = Mat<S>(static_cast<int>(frames_n), d);
        stash->inv_norm.assign(frames_n, S(0));
    }
    for (size_t t = 0; t < frames_n; ++t) {
        const int row_id = t < bytes.size() ? static_cast<int>(bytes[t]) : static_cast<int>(g2p::kPadId);
        S* zr = z.row(static_cast<int>(t));
        const S* brow = params_.text_table.row(row_id);
        for (int i = 0; i < td; ++i) zr[i] = brow[i];
        if (t == 0) {
            for (int i = 0; i < fd; ++i) zr[td + i] = S(0);
        } else {
            const auto feat = codec.feature_of(prev_tokens[t - 1]);
            for (int i = 0; i < fd; ++i) zr[td + i] = static_cast<S>(feat[i]);
        }
        if (stash) {
            stash->table_rows[t] = row_id;
            std::copy(zr, zr + d, stash->x_prenorm.row(static_cast<int>(t)));
        }
        const S norm = l2_norm(zr, d);
        S inv = S(0);
        if (norm > S(0)) {
            inv = S(1) / norm;
            for (int i = 0; i < d; ++i) zr[i] *= inv;
        }
        if (stash) stash->inv_norm[t] = inv;
        const S* pr = params_.pos.row(static_cast<int>(t));
        for (int i = 0; i < d; ++i) zr[i] += pr[i];
    }
    return z;
}

template <class S>
Mat<S> Network<S>::forward_frames(const Mat<S>& frames, ForwardStash<S>* stash) const {
    const int T = frames.rows;
    const int d = cfg_.n_embd();
    const int H = cfg_.n_head;
    const int hd = d / H;
    const int F = cfg_.mlp_dim();
    const S alpha = S(1) / std::sqrt(S(hd));
    if (T > cfg_.block_size)
        throw ContextOverflowError("context overflow: " + std::to_string(T) + " frames exceed block_size " +
                                   std::to_string(cfg_.block_size));
    if (frames.cols != d) throw ConfigError("forward: frame dim mismatch");

    if (stash) {
        stash->frames = frames;
        stash->layers.assign(cfg_.n_layer, LayerStash<S>{});
    }

    Mat<S> h = frames;
    Mat<S> xhat(T, d), a(T, d), q(T, d), k(T, d), v(T, d), attcat(T, d), tmp(T, d);
    Mat<S> u(T, F), g(T, F);
    std::vector<S> rstd(T);

    for (int l = 0; l < cfg_.n_layer; ++l) {
        const auto& lp = params_.layers[l];
        LayerStash<S>* ls = stash ? &stash->layers[l] : nullptr;
        if (ls) ls->h_in = h;

        for (int t = 0; t < T; ++t)
            layer_norm_row(h.row(t), lp.ln1_g.row(0), lp.ln1_b.row(0), d, xhat.row(t), a.row(t), &rstd[t]);
        if (ls) {
            ls->xhat1 = xhat;
            ls->a1 = a;
            ls->rstd1 = rstd;
        }

        matmul(a.v.data(), lp.wq.v.data(), q.v.data(), T, d, d);
        matmul(a.v.data(), lp.wk.v.data(), k.v.data(), T, d, d);
        matmul(a.v.data(), lp.wv.v.data(), v.v.data(), T, d, d);
        for (int t = 0; t < T; ++t) {
            axpy(S(1), lp.bq.row(0), q.row(t), d);
            axpy(S(1), lp.bk.row(0), k.row(t), d);
            axpy(S(1), lp.bv.row(0), v.row(t), d);
        }
        if (ls) {
            ls->q = q;
            ls->k = k;
            ls->v = v;
            ls->probs = Mat<S>(H, T * T);
        }

        std::vector<S> prow(T);
        for (int hh = 0; hh < H; ++hh) {
            const int off = hh * hd;
            for (int t = 0; t < T; ++t) {
                const S* qr = q.row(t) + off;
                for (int j = 0; j <= t; ++j) prow[j] = dot(qr, k.row(j) + off, hd) * alpha;
                softmax_inplace(prow.data(), t + 1);
                S* orow = attcat.row(t) + off;
                for (int i = 0; i < hd; ++i) orow[i] = S(0);
                for (int j = 0; j <= t; ++j) axpy(prow[j], v.row(j) + off, orow, hd);
                if (ls) {
                    S* dst = ls->probs.row(hh) + static_cast<size_t>(t) * T;
                    for (int j = 0; j <= t; ++j) dst[j] = prow[j];
                    for (int j = t + 1; j < T; ++j) dst[j] = S(0);
                }
            }
        }
        if (ls) ls->attcat = attcat;

        matmul(attcat.v.data(), lp.wo.v.data(), tmp.v.data(), T, d, d);
        for (int t = 0; t < T; ++t) {
            axpy(S(1), lp.bo.row(0), tmp.row(t), d);
            axpy(S(1), tmp.row(t), h.row(t), d);
        }
        if (ls) ls->h_mid = h;

        for (int t = 0; t < T; ++t)
            layer_norm_row(h.row(t), lp.ln2_g.row(0), lp.ln2_b.row(0), d, xhat.row(t), a.row(t), &rstd[t]);
        if (ls) {
            ls->xhat2 = xhat;
            ls->a2 = a;
            ls->rstd2 = rstd;
        }

        matmul(a.v.data(), lp.w1.v.data(), u.v.data(), T, d, F);
        for (int t = 0; t < T; ++t) axpy(S(1), lp.b1.row(0), u.row(t), F);
        for (size_t i = 0; i < u.v.size(); ++i) {
            const S x = u.v[i];
            g.v[i] = S(0.5) * x * (S(1) + std::erf(x / std::sqrt(S(2))));
        }
        if (ls) {
            ls->u = u;
            ls->g = g;
        }
        matmul(g.v.data(), lp.w2.v.data(), tmp.v.data(), T, F, d);
        for (int t = 0; t < T; ++t) {
            axpy(S(1), lp.b2.row(0), tmp.row(t), d);
            axpy(S(1), tmp.row(t), h.row(t), d);
        }
    }

    Mat<S> hf(T, d);
    for (int t = 0; t < T; ++t)
        layer_norm_row(h.row(t), params_.lnf_g.row(0), params_.lnf_b.row(0), d, xhat.row(t), hf.row(t), &rstd[t]);
    if (stash) {
        stash->xhatf = xhat;
        stash->hf = hf;
        stash->rstdf = rstd;
    }

    Mat<S> logits(T, cfg_.vocab_out);
    matmul(hf.v.data(), params_.head.v.data(), logits.v.data(), T, d, cfg_.vocab_out);
    return logits;
}

template <class S>
SpeechToken GenSession<S>::pick_token() {
    const int V = net_->config().vocab_out;
    if (sampling_.mode == SamplingMode::kGreedy) {
        int best = 0;
        for (int i = 1; i < V; ++i)
            if (last_logits_[i] > last_logits_[best]) best = i;  // ties keep the lowest id
        return best;
    }
    std::vector<S> p(last_logits_);
    const S inv_t = S(1) / static_cast<S>(sampling_.temperature);
    for (auto& x : p) x *= inv_t;
    softmax_inplace(p.data(), V);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double r = unif(rng_);
    double acc = 0.0;
    for (int i = 0; i < V; ++i) {
        acc += static_cast<double>(p[i]);
        if (r <= acc) return i;
    }
    return V - 1;
}

template <class S>
std::optional<SpeechToken> GenSession<S>::step() {
    if (finished_) return std::nullopt;
    const auto& cfg = net_->config();
    const int d = cfg.n_embd();
    const int H = cfg.n_head;
    const int hd = d / H;
    const int F = cfg.mlp_dim();
    const S alpha = S(1) / std::sqrt(S(hd));
    const int t = steps_;
    if (t >= cfg.block_size)
        throw ContextOverflowError("generation step " + std::to_string(t) + " exceeds block_size " +
                                   std::to_string(cfg.block_size));

    // assemble frame t
    std::vector<S> h(d);
    {
        const int row_id =
            static_cast<size_t>(t) < bytes_.size() ? static_cast<int>(bytes_[t]) : static_cast<int>(g2p::kPadId);
        const S* brow = net_->params_.text_table.row(row_id);
        for (int i = 0; i < cfg.text_dim; ++i) h[i] = brow[i];
        if (t == 0) {
            for (int i = 0; i < cfg.feature_dim; ++i) h[cfg.text_dim + i] = S(0);
        } else {
            const auto feat = codec_->feature_of(emitted_.empty() ? 0 : emitted_.back());
            // emitted_ can only be empty here if the sentinel fired at t==0,
            // which sets finished_; guarded above.
            for (int i = 0; i < cfg.feature_dim; ++i) h[cfg.text_dim + i] = static_cast<S>(feat[i]);
        }
        const S norm = l2_norm(h.data(), d);
        if (norm > S(0)) {
            const S inv = S(1) / norm;
            for (int i = 0; i < d; ++i) h[i] *= inv;
        }
        axpy(S(1), net_->params_.pos.row(t), h.data(), d);
    }

    std::vector<S> xhat(d), a(d), qrow(d), tmp(d), orow(d), u(F), g(F), prow(static_cast<size_t>(t) + 1);
    S rstd = S(0);
    for (int l = 0; l < cfg.n_layer; ++l) {
        const auto& lp = net_->params_.layers[l];
        net_->layer_norm_row(h.data(), lp.ln1_g.row(0), lp.ln1_b.row(0), d, xhat.data(), a.data(), &rstd);
        S* krow = k_cache_[l].row(t);
        S* vrow = v_cache_[l].row(t);
        matmul(a.data(), lp.wq.v.data(), qrow.data(), 1, d, d);
        matmul(a.data(), lp.wk.v.data(), krow, 1, d, d);
        matmul(a.data(), lp.wv.v.data(), vrow, 1, d, d);
        axpy(S(1), lp.bq.row(0), qrow.data(), d);
        axpy(S(1), lp.bk.row(0), krow, d);
        axpy(S(1), lp.bv.row(0), vrow, d);
        for (int hh = 0; hh < H; ++hh) {
            const int off = hh * hd;
            for (int j = 0; j <= t; ++j) prow[j] = dot(qrow.data() + off, k_cache_[l].row(j) + off, hd) * alpha;
            softmax_inplace(prow.data(), t + 1);
            S* oh = orow.data() + off;
            for (int i = 0; i < hd; ++i) oh[i] = S(0);
            for (int j = 0; j <= t; ++j) axpy(prow[j], v_cache_[l].row(j) + off, oh, hd);
        }
        matmul(orow.data(), lp.wo.v.data(), tmp.data(), 1, d, d);
        axpy(S(1), lp.bo.row(0), tmp.data(), d);
        axpy(S(1), tmp.data(), h.data(), d);

        net_->layer_norm_row(h.data(), lp.ln2_g.row(0), lp.ln2_b.row(0), d, xhat.data(), a.data(), &rstd);
        matmul(a.data(), lp.w1.v.data(), u.data(), 1, d, F);
        axpy(S(1), lp.b1.row(0), u.data(), F);
        for (int i = 0; i < F; ++i) g[i] = S(0.5) * u[i] * (S(1) + std::erf(u[i] / std::sqrt(S(2))));
        matmul(g.data(), lp.w2.v.data(), tmp.data(), 1, F, d);
        axpy(S(1), lp.b2.row(0), tmp.data(), d);
        axpy(S(1), tmp.data(), h.data(), d);
    }
    net_->layer_norm_row(h.data(), net_->params_.lnf_g.row(0), net_->params_.lnf_b.row(0), d, xhat.data(), a.data(),
                         &rstd);
    last_logits_.assign(cfg.vocab_out, S(0));
    matmul(a.data(), net_->params_.head.v.data(), last_logits_.data(), 1, d, cfg.vocab_out);
    for (S x : last_logits_)
        if (!std::isfinite(static_cast<double>(x)))
            throw std::runtime_error("generation produced non-finite logits at step " + std::to_string(t));

    ++steps_;
    const SpeechToken tok = pick_token();
    if (tok == cfg.sentinel_id()) {
        finished_ = true;
        return std::nullopt;
    }
    emitted_.push_back(tok);
    return tok;
}

using NetworkF = Network<float>;

// Checkpoint: sectioned LVX1 weight container plus a `<path>.cfg` key=value
// block carrying the model and codec configuration.
void save_checkpoint(const std::string& path, Network<float>& net, const codec::CodecConfig& codec_cfg);
std::pair<Network<float>, codec::CodecConfig> load_checkpoint(const std::string& path);

// The jointly-trained text table as a standalone g2p embedding table.
g2p::EmbeddingTable export_text_table(const Network<float>& net);

}  // namespace llmvox::model
