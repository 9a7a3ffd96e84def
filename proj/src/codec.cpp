#include "llmvox/codec.hpp"

#include <cmath>
#include <random>

#include "llmvox/mat.hpp"

namespace llmvox::codec {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr int kMaxSinBins = 64;
}  // namespace

void CodecConfig::validate() const {
    if (sample_rate_hz <= 0 || tokens_per_second <= 0)
        throw ConfigError("codec: sample_rate_hz and tokens_per_second must be positive");
    if (sample_rate_hz % tokens_per_second != 0)
        throw ConfigError("codec: sample_rate_hz " + std::to_string(sample_rate_hz) +
                          " not divisible by tokens_per_second " + std::to_string(tokens_per_second));
    if (vocab_size < 2) throw ConfigError("codec: vocab_size must be >= 2");
    if (feature_dim < 1) throw ConfigError("codec: feature_dim must be >= 1");
    const int spt = samples_per_token();
    const int max_bins = spt / 2 - 1;
    if (max_bins < 1) throw ConfigError("codec: samples_per_token too small for frame synthesis (need >= 4)");
    const int sin_bins = std::min(kMaxSinBins, max_bins);
    const int cos_bins = (vocab_size + sin_bins - 1) / sin_bins;
    if (cos_bins > max_bins)
        throw ConfigError("codec: vocab_size " + std::to_string(vocab_size) +
                          " too large for samples_per_token " + std::to_string(spt));
}

Codec::Codec(const CodecConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    const int spt = cfg_.samples_per_token();
    const int max_bins = spt / 2 - 1;
    sin_bins_ = std::min(kMaxSinBins, max_bins);
    cos_bins_ = (cfg_.vocab_size + sin_bins_ - 1) / sin_bins_;

    // Edge taper; every weight stays strictly positive so distinct harmonic
    // pairs always yield distinct frames.
    window_.assign(spt, 1.0f);
    const int ramp = std::min(16, spt / 4);
    for (int i = 0; i < ramp; ++i) {
        const float w = 0.5f - 0.5f * static_cast<float>(std::cos(kPi * (i + 1) / (ramp + 1)));
        window_[i] = w;
        window_[spt - 1 - i] = w;
    }

    sin_table_.resize(static_cast<size_t>(sin_bins_) * spt);
    for (int n = 1; n <= sin_bins_; ++n)
        for (int i = 0; i < spt; ++i)
            sin_table_[static_cast<size_t>(n - 1) * spt + i] =
                window_[i] * static_cast<float>(std::sin(2.0 * kPi * n * i / spt));
    cos_table_.resize(static_cast<size_t>(cos_bins_) * spt);
    for (int n = 1; n <= cos_bins_; ++n)
        for (int i = 0; i < spt; ++i)
            cos_table_[static_cast<size_t>(n - 1) * spt + i] =
                window_[i] * static_cast<float>(std::cos(2.0 * kPi * n * i / spt));
    sin_tr_.resize(sin_table_.size());
    cos_tr_.resize(cos_table_.size());
    for (int n = 0; n < sin_bins_; ++n)
        for (int i = 0; i < spt; ++i)
            sin_tr_[static_cast<size_t>(i) * sin_bins_ + n] = sin_table_[static_cast<size_t>(n) * spt + i];
    for (int n = 0; n < cos_bins_; ++n)
        for (int i = 0; i < spt; ++i)
            cos_tr_[static_cast<size_t>(i) * cos_bins_ + n] = cos_table_[static_cast<size_t>(n) * spt + i];

    frames_.resize(static_cast<size_t>(cfg_.vocab_size) * spt);
    frame_norm2_.resize(cfg_.vocab_size);
    for (int k = 0; k < cfg_.vocab_size; ++k) {
        const int n1 = k % sin_bins_;
        const int n2 = k / sin_bins_;
        const float* s = &sin_table_[static_cast<size_t>(n1) * spt];
        const float* c = &cos_table_[static_cast<size_t>(n2) * spt];
        float* f = &frames_[static_cast<size_t>(k) * spt];
        float norm2 = 0.0f;
        for (int i = 0; i < spt; ++i) {
            f[i] = 0.5f * (s[i] + c[i]);
            norm2 += f[i] * f[i];
        }
        frame_norm2_[k] = norm2;
    }

    std::mt19937_64 rng(derive_seed(cfg_.seed, "codec.features"));
    std::normal_distribution<double> dist(0.0, 1.0);
    features_.resize(static_cast<size_t>(cfg_.vocab_size) * cfg_.feature_dim);
    for (int k = 0; k < cfg_.vocab_size; ++k) {
        float* row = &features_[static_cast<size_t>(k) * cfg_.feature_dim];
        double norm = 0.0;
        do {
            norm = 0.0;
            for (int d = 0; d < cfg_.feature_dim; ++d) {
                row[d] = static_cast<float>(dist(rng));
                norm += static_cast<double>(row[d]) * row[d];
            }
            norm = std::sqrt(norm);
        } while (norm < 1e-6);
        const float inv = static_cast<float>(1.0 / norm);
        for (int d = 0; d < cfg_.feature_dim; ++d) row[d] *= inv;
    }
}

void Codec::check_token(SpeechToken token, size_t position) const {
    if (token < 0 || token >= cfg_.vocab_size)
        throw CodecError("out-of-vocabulary token id " + std::to_string(token) + " at position " +
                         std::to_string(position) + " (vocab_size " + std::to_string(cfg_.vocab_size) + ")");
}

AudioBuffer Codec::decode(std::span<const SpeechToken> tokens) const {
    const int spt = cfg_.samples_per_token();
    AudioBuffer out;
    out.sample_rate_hz = cfg_.sample_rate_hz;
    out.samples.resize(tokens.size() * static_cast<size_t>(spt));
    for (size_t t = 0; t < tokens.size(); ++t) {
        check_token(tokens[t], t);
        const float* f = &frames_[static_cast<size_t>(tokens[t]) * spt];
        std::copy(f, f + spt, out.samples.begin() + static_cast<ptrdiff_t>(t * spt));
    }
    return out;
}

SpeechToken Codec::nearest_from_projections(const float* proj_sin, const float* proj_cos) const {
    // dist^2(x, c_k) = |x|^2 - 2<x,c_k> + |c_k|^2; the |x|^2 term is shared,
    // and <x,c_k> = 0.5*(proj_sin[n1] + proj_cos[n2]).
    SpeechToken best = 0;
    float best_score = frame_norm2_[0] - (proj_sin[0] + proj_cos[0]);
    for (int k = 1; k < cfg_.vocab_size; ++k) {
        const int n1 = k % sin_bins_;
        const int n2 = k / sin_bins_;
        const float score = frame_norm2_[k] - (proj_sin[n1] + proj_cos[n2]);
        if (score < best_score) {  // ties keep the lowest token id
            best_score = score;
            best = k;
        }
    }
    return best;
}

std::vector<SpeechToken> Codec::encode(const AudioBuffer& audio) const {
    const int spt = cfg_.samples_per_token();
    const size_t n = audio.samples.size();
    if (n % static_cast<size_t>(spt) != 0)
        throw CodecError("framing error: " + std::to_string(n) + " samples leaves remainder " +
                         std::to_string(n % static_cast<size_t>(spt)) + " of " + std::to_string(spt) +
                         "-sample frames");
    const size_t frames = n / static_cast<size_t>(spt);
    std::vector<SpeechToken> out(frames);
    std::vector<float> proj_sin(sin_bins_), proj_cos(cos_bins_);
    for (size_t t = 0; t < frames; ++t) {
        const float* x = audio.samples.data() + t * spt;
        for (int b = 0; b < sin_bins_; ++b)
            proj_sin[b] = dot(x, &sin_table_[static_cast<size_t>(b) * spt], spt);
        for (int b = 0; b < cos_bins_; ++b)
            proj_cos[b] = dot(x, &cos_table_[static_cast<size_t>(b) * spt], spt);
        out[t] = nearest_from_projections(proj_sin.data(), proj_cos.data());
    }
    return out;
}

std::vector<SpeechToken> Codec::encode_exhaustive(const AudioBuffer& audio) const {
    const int spt = cfg_.samples_per_token();
    const size_t n = audio.samples.size();
    if (n % static_cast<size_t>(spt) != 0)
        throw CodecError("framing error: " + std::to_string(n) + " samples leaves remainder " +
                         std::to_string(n % static_cast<size_t>(spt)) + " of " + std::to_string(spt) +
                         "-sample frames");
    const size_t frames = n / static_cast<size_t>(spt);
    std::vector<SpeechToken> out(frames);
    for (size_t t = 0; t < frames; ++t) {
        const float* x = audio.samples.data() + t * spt;
        SpeechToken best = 0;
        float best_d2 = 0.0f;
        for (int k = 0; k < cfg_.vocab_size; ++k) {
            const float* f = &frames_[static_cast<size_t>(k) * spt];
            float d2 = 0.0f;
            for (int i = 0; i < spt; ++i) {
                const float d = x[i] - f[i];
                d2 += d * d;
            }
            if (k == 0 || d2 < best_d2) {
                best_d2 = d2;
                best = k;
            }
        }
        out[t] = best;
    }
    return out;
}

std::span<const float> Codec::feature_of(SpeechToken token) const {
    check_token(token, 0);
    return {&features_[static_cast<size_t>(token) * cfg_.feature_dim], static_cast<size_t>(cfg_.feature_dim)};
}

std::span<const float> Codec::frame_of(SpeechToken token) const {
    check_token(token, 0);
    return {&frames_[static_cast<size_t>(token) * cfg_.samples_per_token()],
            static_cast<size_t>(cfg_.samples_per_token())};
}

}  // namespace llmvox::codec
