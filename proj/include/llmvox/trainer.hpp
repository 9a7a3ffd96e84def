// Cross-entropy training for the speech-token transformer: manual reverse
// pass, gradient-norm clipping, AdamW with decoupled weight decay, and a
// warmup-then-cosine learning-rate schedule.
#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "llmvox/model.hpp"

namespace llmvox::model {

struct TrainConfig {
    double lr = 3e-4;
    double min_lr = 3e-6;
    int warmup_steps = 200;
    int decay_steps = 10000;
    double weight_decay = 0.1;
    double grad_clip = 1.0;
    double beta1 = 0.9;
    double beta2 = 0.95;
    double adam_eps = 1e-8;
    int batch_size = 8;

    void validate() const {
        if (lr <= 0 || min_lr <= 0 || min_lr > lr) throw ConfigError("trainer: need 0 < min_lr <= lr");
        if (warmup_steps < 1 || decay_steps <= warmup_steps)
            throw ConfigError("trainer: need decay_steps > warmup_steps >= 1");
        if (grad_clip <= 0) throw ConfigError("trainer: grad_clip must be positive");
        if (batch_size < 1) throw ConfigError("trainer: batch_size must be >= 1");
    }
};

template <class S>
class Trainer {
  public:
    Trainer(Network<S>& net, const codec::Codec& codec, TrainConfig cfg = {})
        : net_(&net), codec_(&codec), cfg_(cfg) {
        cfg_.validate();
        grads_.init_shapes(net.config());
        adam_m_.init_shapes(net.config());
        adam_v_.init_shapes(net.config());
    }

    double lr_at(int step) const {
        if (step < cfg_.warmup_steps) return cfg_.lr * (step + 1) / cfg_.warmup_steps;
        if (step >= cfg_.decay_steps) return cfg_.min_lr;
        const double frac =
            static_cast<double>(step - cfg_.warmup_steps) / (cfg_.decay_steps - cfg_.warmup_steps);
        return cfg_.min_lr + 0.5 * (cfg_.lr - cfg_.min_lr) * (1.0 + std::cos(frac * 3.14159265358979323846));
    }

    // Mean NLL over every target position in the batch (each sequence
    // contributes its speech tokens plus the appended end-of-speech target).
    double compute_loss(std::span<const TrainingPair> batch) { return run_batch(batch, false); }
    double compute_loss_and_grads(std::span<const TrainingPair> batch) { return run_batch(batch, true); }

    // One optimizer update; returns the batch loss. Throws TrainDivergedError
    // on a non-finite loss.
    double train_step(std::span<const TrainingPair> batch) {
        const double loss = compute_loss_and_grads(batch);
        if (!std::isfinite(loss)) {
            std::string ids;
            for (size_t i = 0; i < batch.size() && i < 4; ++i)
                ids += (i ? ", " : "") + batch[i].text.substr(0, 24);
            throw TrainDivergedError("non-finite loss at step " + std::to_string(step_count_) +
                                     " (lr=" + std::to_string(lr_at(step_count_)) + ", batch: " + ids + ")");
        }
        apply_update();
        ++step_count_;
        return loss;
    }

    Params<S>& grads() { return grads_; }
    int step_count() const { return step_count_; }
    double last_grad_norm() const { return last_grad_norm_; }
    double last_lr() const { return last_lr_; }

  private:
    double run_batch(std::span<const TrainingPair> batch, bool with_grads);
    void backward(const ForwardStash<S>& stash, const Mat<S>& dlogits);
    void layer_norm_backward(const Mat<S>& dy, const Mat<S>& xhat, const std::vector<S>& rstd, const Mat<S>& gain,
                             Mat<S>& dgain, Mat<S>& dbias, Mat<S>& dx) const;
    void apply_update();

    Network<S>* net_;
    const codec::Codec* codec_;
    TrainConfig cfg_;
    Params<S> grads_, adam_m_, adam_v_;
    int step_count_ = 0;
    int adam_t_ = 0;
    double last_grad_norm_ = 0.0;
    double last_lr_ = 0.0;
};

template <class S>
double Trainer<S>::run_batch(std::span<const TrainingPair> batch, bool with_grads) {
    if (batch.empty()) throw ConfigError("trainer: empty batch");
    const auto& mc = net_->config();
    if (with_grads) grads_.zero_all();

    size_t total_positions = 0;
    for (const auto& pair : batch) total_positions += pair.speech_tokens.size() + 1;

    double loss_sum = 0.0;
    for (const auto& pair : batch) {
        const auto bytes = g2p::subtokenize_text(pair.text);
        const size_t T = pair.speech_tokens.size();
        if (bytes.size() > T) throw AlignmentError(bytes.size(), T);
        if (T + 1 > static_cast<size_t>(mc.block_size))
            throw ContextOverflowError("training pair needs " + std::to_string(T + 1) +
                                       " frames, block_size is " + std::to_string(mc.block_size));

        ForwardStash<S> stash;
        const Mat<S> z = net_->assemble_inputs(bytes, pair.speech_tokens, *codec_, with_grads ? &stash : nullptr);
        Mat<S> logits = net_->forward_frames(z, with_grads ? &stash : nullptr);

        // softmax + NLL per row; dlogits = (p - onehot) / total_positions
        const int V = mc.vocab_out;
        const int rows = logits.rows;
        const S inv_total = S(1) / static_cast<S>(total_positions);
        for (int t = 0; t < rows; ++t) {
            const SpeechToken target =
                t < static_cast<int>(T) ? pair.speech_tokens[static_cast<size_t>(t)] : mc.sentinel_id();
            if (target < 0 || target >= V)
                throw ConfigError("training target id " + std::to_string(target) + " out of range");
            S* row = logits.row(t);
            S mx = row[0];
            for (int i = 1; i < V; ++i) mx = std::max(mx, row[i]);
            S sum = S(0);
            for (int i = 0; i < V; ++i) {
                row[i] = std::exp(row[i] - mx);
                sum += row[i];
            }
            loss_sum -= static_cast<double>(std::log(row[target] / sum));
            if (with_grads) {
                const S inv_sum = S(1) / sum;
                for (int i = 0; i < V; ++i) row[i] *= inv_sum * inv_total;
                row[target] -= inv_total;
            }
        }
        if (with_grads) backward(stash, logits);
    }
    return loss_sum / static_cast<double>(total_positions);
}

template <class S>
void Trainer<S>::layer_norm_backward(const Mat<S>& dy, const Mat<S>& xhat, const std::vector<S>& rstd,
                                     const Mat<S>& gain, Mat<S>& dgain, Mat<S>& dbias, Mat<S>& dx) const {
    const int T = dy.rows;
    const int d = dy.cols;
    std::vector<S> dxg(d);
    for (int t = 0; t < T; ++t) {
        const S* dyr = dy.row(t);
        const S* xr = xhat.row(t);
        S* gg = dgain.row(0);
        S* gb = dbias.row(0);
        S m1 = S(0), m2 = S(0);
        for (int i = 0; i < d; ++i) {
            dxg[i] = dyr[i] * gain.at(0, i);
            gg[i] += dyr[i] * xr[i];
            gb[i] += dyr[i];
            m1 += dxg[i];
            m2 += dxg[i] * xr[i];
        }
        m1 /= S(d);
        m2 /= S(d);
        S* dxr = dx.row(t);
        for (int i = 0; i < d; ++i) dxr[i] = rstd[t] * (dxg[i] - m1 - xr[i] * m2);
    }
}

template <class S>
void Trainer<S>::backward(const ForwardStash<S>& stash, const Mat<S>& dlogits) {
    const auto& mc = net_->config();
    const auto& p = net_->params_;
    const int T = stash.frames.rows;
    const int d = mc.n_embd();
    const int H = mc.n_head;
    const int hd = d / H;
    const int F = mc.mlp_dim();
    const int V = mc.vocab_out;
    const S alpha = S(1) / std::sqrt(S(hd));

    Mat<S> dh(T, d), dtmp(T, d), dbranch(T, d);
    // head and final layer norm
    matmul_tn_acc(stash.hf.v.data(), dlogits.v.data(), grads_.head.v.data(), T, d, V);
    matmul_nt(dlogits.v.data(), p.head.v.data(), dtmp.v.data(), T, V, d);
    layer_norm_backward(dtmp, stash.xhatf, stash.rstdf, p.lnf_g, grads_.lnf_g, grads_.lnf_b, dh);

    Mat<S> dg(T, F), du(T, F), da(T, d), dq(T, d), dk(T, d), dv(T, d);
    std::vector<S> dprow;
    for (int l = mc.n_layer - 1; l >= 0; --l) {
        const auto& lp = p.layers[l];
        auto& gl = grads_.layers[l];
        const auto& ls = stash.layers[l];

        // mlp branch: h_out = h_mid + gelu(a2 W1 + b1) W2 + b2
        matmul_tn_acc(ls.g.v.data(), dh.v.data(), gl.w2.v.data(), T, F, d);
        for (int t = 0; t < T; ++t) axpy(S(1), dh.row(t), gl.b2.row(0), d);
        matmul_nt(dh.v.data(), lp.w2.v.data(), dg.v.data(), T, d, F);
        for (size_t i = 0; i < du.v.size(); ++i) {
            const S x = ls.u.v[i];
            const S cdf = S(0.5) * (S(1) + std::erf(x / std::sqrt(S(2))));
            const S pdf = std::exp(-x * x / S(2)) * S(0.39894228040143267794);
            du.v[i] = dg.v[i] * (cdf + x * pdf);
        }
        matmul_tn_acc(ls.a2.v.data(), du.v.data(), gl.w1.v.data(), T, d, F);
        for (int t = 0; t < T; ++t) axpy(S(1), du.row(t), gl.b1.row(0), F);
        matmul_nt(du.v.data(), lp.w1.v.data(), da.v.data(), T, F, d);
        layer_norm_backward(da, ls.xhat2, ls.rstd2, lp.ln2_g, gl.ln2_g, gl.ln2_b, dbranch);
        for (size_t i = 0; i < dh.v.size(); ++i) dh.v[i] += dbranch.v[i];

        // attention branch: h_mid = h_in + att(attcat) Wo + bo
        matmul_tn_acc(ls.attcat.v.data(), dh.v.data(), gl.wo.v.data(), T, d, d);
        for (int t = 0; t < T; ++t) axpy(S(1), dh.row(t), gl.bo.row(0), d);
        matmul_nt(dh.v.data(), lp.wo.v.data(), dtmp.v.data(), T, d, d);  // dattcat

        dq.zero();
        dk.zero();
        dv.zero();
        for (int hh = 0; hh < H; ++hh) {
            const int off = hh * hd;
            const S* probs = ls.probs.row(hh);
            for (int i = 0; i < T; ++i) {
                const S* dorow = dtmp.row(i) + off;
                const S* prow = probs + static_cast<size_t>(i) * T;
                dprow.assign(static_cast<size_t>(i) + 1, S(0));
                S psum = S(0);
                for (int j = 0; j <= i; ++j) {
                    dprow[j] = dot(dorow, ls.v.row(j) + off, hd);
                    psum += dprow[j] * prow[j];
                }
                for (int j = 0; j <= i; ++j) {
                    const S ds = prow[j] * (dprow[j] - psum) * alpha;
                    axpy(ds, ls.k.row(j) + off, dq.row(i) + off, hd);
                    axpy(ds, ls.q.row(i) + off, dk.row(j) + off, hd);
                    axpy(prow[j], dorow, dv.row(j) + off, hd);
                }
            }
        }

        matmul_tn_acc(ls.a1.v.data(), dq.v.data(), gl.wq.v.data(), T, d, d);
        matmul_tn_acc(ls.a1.v.data(), dk.v.data(), gl.wk.v.data(), T, d, d);
        matmul_tn_acc(ls.a1.v.data(), dv.v.data(), gl.wv.v.data(), T, d, d);
        for (int t = 0; t < T; ++t) {
            axpy(S(1), dq.row(t), gl.bq.row(0), d);
            axpy(S(1), dk.row(t), gl.bk.row(0), d);
            axpy(S(1), dv.row(t), gl.bv.row(0), d);
        }
        matmul_nt(dq.v.data(), lp.wq.v.data(), da.v.data(), T, d, d);
        matmul_nt(dk.v.data(), lp.wk.v.data(), dtmp.v.data(), T, d, d);
        for (size_t i = 0; i < da.v.size(); ++i) da.v[i] += dtmp.v[i];
        matmul_nt(dv.v.data(), lp.wv.v.data(), dtmp.v.data(), T, d, d);
        for (size_t i = 0; i < da.v.size(); ++i) da.v[i] += dtmp.v[i];

        layer_norm_backward(da, ls.xhat1, ls.rstd1, lp.ln1_g, gl.ln1_g, gl.ln1_b, dbranch);
        for (size_t i = 0; i < dh.v.size(); ++i) dh.v[i] += dbranch.v[i];
    }

    // positional rows, the L2 normalization, and the text table
    const int td = mc.text_dim;
    std::vector<S> dx(d);
    for (int t = 0; t < T; ++t) {
        axpy(S(1), dh.row(t), grads_.pos.row(t), d);
        const S inv = stash.inv_norm[t];
        if (inv == S(0)) continue;
        const S* xpre = stash.x_prenorm.row(t);
        const S* dxhat = dh.row(t);
        S c = S(0);
        for (int i = 0; i < d; ++i) c += dxhat[i] * xpre[i] * inv;
        for (int i = 0; i < d; ++i) dx[i] = inv * (dxhat[i] - c * xpre[i] * inv);
        axpy(S(1), dx.data(), grads_.text_table.row(stash.table_rows[t]), td);
    }
}

template <class S>
void Trainer<S>::apply_update() {
    // global-norm clip
    double norm2 = 0.0;
    auto gs = grads_.all();
    for (auto& g : gs)
        for (S x : g.mat->v) norm2 += static_cast<double>(x) * static_cast<double>(x);
    last_grad_norm_ = std::sqrt(norm2);
    const double scale = last_grad_norm_ > cfg_.grad_clip ? cfg_.grad_clip / last_grad_norm_ : 1.0;

    const double lr = lr_at(step_count_);
    last_lr_ = lr;
    ++adam_t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, adam_t_);
    const double bc2 = 1.0 - std::pow(cfg_.beta2, adam_t_);

    auto ps = net_->params_.all();
    auto ms = adam_m_.all();
    auto vs = adam_v_.all();
    for (size_t i = 0; i < ps.size(); ++i) {
        auto& w = ps[i].mat->v;
        auto& gv = gs[i].mat->v;
        auto& mv = ms[i].mat->v;
        auto& vv = vs[i].mat->v;
        const bool decay = ps[i].decay;
        for (size_t j = 0; j < w.size(); ++j) {
            const double g = static_cast<double>(gv[j]) * scale;
            const double m = cfg_.beta1 * static_cast<double>(mv[j]) + (1.0 - cfg_.beta1) * g;
            const double v = cfg_.beta2 * static_cast<double>(vv[j]) + (1.0 - cfg_.beta2) * g * g;
            mv[j] = static_cast<S>(m);
            vv[j] = static_cast<S>(v);
            double upd = lr * (m / bc1) / (std::sqrt(v / bc2) + cfg_.adam_eps);
            if (decay) upd += lr * cfg_.weight_decay * static_cast<double>(w[j]);
            w[j] = static_cast<S>(static_cast<double>(w[j]) - upd);
        }
    }
}

}  // namespace llmvox::model
