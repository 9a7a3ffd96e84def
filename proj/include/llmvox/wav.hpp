// RIFF/WAVE output: PCM 16-bit little-endian mono.
#pragma once

#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

namespace llmvox::io {

// Clamp to [-1, 1], scale by 32767, round half away from zero.
int16_t sample_to_pcm16(float s);

// Streaming writer: header sizes are patched on close so arbitrarily long
// runs never buffer samples in memory.
class WavWriter {
  public:
    WavWriter(const std::string& path, int sample_rate_hz);
    ~WavWriter();
    WavWriter(const WavWriter&) = delete;
    WavWriter& operator=(const WavWriter&) = delete;

    void write(std::span<const float> samples);
    void close();
    uint64_t samples_written() const { return samples_written_; }

  private:
    std::FILE* f_ = nullptr;
    uint64_t samples_written_ = 0;
};

void write_wav(const std::string& path, std::span<const float> samples, int sample_rate_hz);

}  // namespace llmvox::io
