#include "llmvox/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "llmvox/common.hpp"

namespace llmvox::io {

namespace {

void put_u32le(std::FILE* f, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff), static_cast<unsigned char>((v >> 24) & 0xff)};
    std::fwrite(b, 1, 4, f);
}

void put_u16le(std::FILE* f, uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>((v >> 8) & 0xff)};
    std::fwrite(b, 1, 2, f);
}

}  // namespace

int16_t sample_to_pcm16(float s) {
    float clamped = std::clamp(s, -1.0f, 1.0f);
    // lround rounds halfway cases away from zero
    long v = std::lround(static_cast<double>(clamped) * 32767.0);
    return static_cast<int16_t>(v);
}

WavWriter::WavWriter(const std::string& path, int sample_rate_hz) {
    f_ = std::fopen(path.c_str(), "wb");
    if (!f_) throw std::runtime_error("cannot open WAV file for writing: " + path);
    const uint32_t byte_rate = static_cast<uint32_t>(sample_rate_hz) * 2;  // mono, 16-bit
    std::fwrite("RIFF", 1, 4, f_);
    put_u32le(f_, 0);  // chunk size, patched on close
    std::fwrite("WAVE", 1, 4, f_);
    std::fwrite("fmt ", 1, 4, f_);
    put_u32le(f_, 16);
    put_u16le(f_, 1);  // PCM
    put_u16le(f_, 1);  // mono
    put_u32le(f_, static_cast<uint32_t>(sample_rate_hz));
    put_u32le(f_, byte_rate);
    put_u16le(f_, 2);   // block align
    put_u16le(f_, 16);  // bits per sample
    std::fwrite("data", 1, 4, f_);
    put_u32le(f_, 0);  // data size, patched on close
}

WavWriter::~WavWriter() {
    if (f_) close();
}

void WavWriter::write(std::span<const float> samples) {
    if (!f_) throw std::runtime_error("write on closed WAV writer");
    std::vector<unsigned char> buf(samples.size() * 2);
    for (size_t i = 0; i < samples.size(); ++i) {
        const uint16_t u = static_cast<uint16_t>(sample_to_pcm16(samples[i]));
        buf[2 * i] = static_cast<unsigned char>(u & 0xff);
        buf[2 * i + 1] = static_cast<unsigned char>((u >> 8) & 0xff);
    }
    if (!buf.empty() && std::fwrite(buf.data(), 1, buf.size(), f_) != buf.size())
        throw std::runtime_error("short write to WAV file");
    samples_written_ += samples.size();
}

void WavWriter::close() {
    if (!f_) return;
    const uint64_t data_bytes = samples_written_ * 2;
    if (data_bytes > 0xffffffffull - 36)
        LLMVOX_LOG_WARN("WAV data exceeds RIFF 32-bit size field; sizes truncated");
    std::fseek(f_, 4, SEEK_SET);
    put_u32le(f_, static_cast<uint32_t>(36 + data_bytes));
    std::fseek(f_, 40, SEEK_SET);
    put_u32le(f_, static_cast<uint32_t>(data_bytes));
    std::fclose(f_);
    f_ = nullptr;
}

void write_wav(const std::string& path, std::span<const float> samples, int sample_rate_hz) {
    WavWriter w(path, sample_rate_hz);
    w.write(samples);
    w.close();
}

}  // namespace llmvox::io
