// Deterministic discrete speech codec: token ids map to unit-norm latent
// feature rows and fixed windowed-sinusoid waveform frames. Encode is exact
// nearest-neighbor over the frame codebook, so encode(decode(s)) == s.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "llmvox/common.hpp"
#include "llmvox/serialize.hpp"

namespace llmvox::codec {

using SpeechToken = std::int32_t;

struct CodecConfig {
    int sample_rate_hz = 24000;
    int tokens_per_second = 40;
    int feature_dim = 512;
    int vocab_size = 4096;
    uint64_t seed = 0;

    int samples_per_token() const { return sample_rate_hz / tokens_per_second; }
    void validate() const;

    io::KvConfig to_kv() const;
    static CodecConfig from_kv(const io::KvConfig& kv);
};

struct AudioBuffer {
    std::vector<float> samples;
    int sample_rate_hz = 0;
};

class Codec {
  public:
    explicit Codec(const CodecConfig& cfg);

    const CodecConfig& config() const { return cfg_; }

    AudioBuffer decode(std::span<const SpeechToken> tokens) const;
    std::vector<SpeechToken> encode(const AudioBuffer& audio) const;
    std::span<const float> feature_of(SpeechToken token) const;
    std::span<const float> frame_of(SpeechToken token) const;

    // Reference nearest-neighbor over raw frame distances; same result as
    // encode() but O(vocab * samples) per frame. Kept as the slow second
    // route for cross-checking the projection-based search.
    std::vector<SpeechToken> encode_exhaustive(const AudioBuffer& audio) const;

    double duration_seconds(size_t token_count) const {
        return static_cast<double>(token_count) / cfg_.tokens_per_second;
    }

  private:
    SpeechToken nearest_from_projections(const float* proj_sin, const float* proj_cos) const;
    void check_token(SpeechToken token, size_t position) const;

    CodecConfig cfg_;
    int sin_bins_ = 0;  // harmonic index range for the sin component
    int cos_bins_ = 0;
    std::vector<float> features_;     // vocab x feature_dim, unit-norm rows
    std::vector<float> frames_;       // vocab x samples_per_token, in [-1, 1]
    std::vector<float> frame_norm2_;  // per-token squared frame norm
    std::vector<float> window_;       // edge taper, all entries > 0
    std::vector<float> sin_table_;    // sin_bins x samples_per_token, windowed
    std::vector<float> cos_table_;    // cos_bins x samples_per_token, windowed
    std::vector<float> sin_tr_;       // samples_per_token x sin_bins (projection layout)
    std::vector<float> cos_tr_;       // samples_per_token x cos_bins
};

}  // namespace llmvox::codec
