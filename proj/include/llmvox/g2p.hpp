// Byte-level sub-tokenization and table-lookup text embedding with PAD
// alignment to the speech-token length.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "llmvox/common.hpp"

namespace llmvox::g2p {

// ids 0..255 are raw UTF-8 byte values; 256 is the PAD row.
using ByteId = std::uint16_t;
inline constexpr ByteId kPadId = 256;
inline constexpr int kTableRows = 257;

// Strips per-word edge whitespace, drops words that end up empty, joins the
// rest with single spaces. Keeps M independent of how the word stream was
// chunked upstream.
std::string join_words(std::span<const std::string> words);

std::vector<ByteId> subtokenize(std::span<const std::string> words);
std::vector<ByteId> subtokenize_text(const std::string& text);

struct EmbeddingTable {
    int dim = 256;
    uint64_t seed = 0;
    std::vector<float> weights;  // kTableRows x dim, row-major

    static EmbeddingTable random(int dim, uint64_t seed);

    const float* row(ByteId id) const { return weights.data() + static_cast<size_t>(id) * dim; }
    float* row(ByteId id) { return weights.data() + static_cast<size_t>(id) * dim; }
};

struct TextEmbeddingSeq {
    int dim = 0;
    size_t real_len = 0;          // M: count of non-PAD positions
    std::vector<float> vectors;   // T x dim, row-major

    size_t rows() const { return dim == 0 ? 0 : vectors.size() / static_cast<size_t>(dim); }
    const float* row(size_t t) const { return vectors.data() + t * static_cast<size_t>(dim); }
};

// Rows 0..M-1 are table lookups, rows M..T-1 the PAD row. Throws
// AlignmentError when T < M (training callers drop such pairs).
TextEmbeddingSeq embed_padded(std::span<const ByteId> subtokens, size_t target_len, const EmbeddingTable& table);

// Flat binary table format: magic "LVX1", u32 LE row count, u32 LE dim,
// then row-major f32 LE.
void save_table(const EmbeddingTable& table, const std::string& path);
EmbeddingTable load_table(const std::string& path);

}  // namespace llmvox::g2p
