#include "llmvox/g2p.hpp"

#include <cstring>
#include <fstream>
#include <random>

#include "llmvox/serialize.hpp"

namespace llmvox::g2p {

namespace {

bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string strip(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && is_ascii_space(s[b])) ++b;
    while (e > b && is_ascii_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

}  // namespace

std::string join_words(std::span<const std::string> words) {
    std::string joined;
    for (const auto& w : words) {
        std::string t = strip(w);
        if (t.empty()) continue;
        if (!joined.empty()) joined += ' ';
        joined += t;
    }
    return joined;
}

std::vector<ByteId> subtokenize(std::span<const std::string> words) {
    return subtokenize_text(join_words(words));
}

std::vector<ByteId> subtokenize_text(const std::string& text) {
    const std::string t = strip(text);
    std::vector<ByteId> ids;
    ids.reserve(t.size());
    for (unsigned char c : t) ids.push_back(static_cast<ByteId>(c));
    return ids;
}

EmbeddingTable EmbeddingTable::random(int dim, uint64_t seed) {
    if (dim < 1) throw ConfigError("g2p: embedding dim must be >= 1");
    EmbeddingTable table;
    table.dim = dim;
    table.seed = seed;
    table.weights.resize(static_cast<size_t>(kTableRows) * dim);
    std::mt19937_64 rng(derive_seed(seed, "g2p.table"));
    std::normal_distribution<double> dist(0.0, 0.02);
    for (auto& w : table.weights) w = static_cast<float>(dist(rng));
    return table;
}

TextEmbeddingSeq embed_padded(std::span<const ByteId> subtokens, size_t target_len, const EmbeddingTable& table) {
    const size_t m = subtokens.size();
    if (target_len < m) throw AlignmentError(m, target_len);
    TextEmbeddingSeq seq;
    seq.dim = table.dim;
    seq.real_len = m;
    seq.vectors.resize(target_len * static_cast<size_t>(table.dim));
    for (size_t t = 0; t < target_len; ++t) {
        const ByteId id = t < m ? subtokens[t] : kPadId;
        if (id >= kTableRows) throw ConfigError("g2p: byte id out of range: " + std::to_string(id));
        std::memcpy(seq.vectors.data() + t * static_cast<size_t>(table.dim), table.row(id),
                    sizeof(float) * static_cast<size_t>(table.dim));
    }
    return seq;
}

void save_table(const EmbeddingTable& table, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    io::write_magic(f);
    io::write_u32le(f, kTableRows);
    io::write_u32le(f, static_cast<uint32_t>(table.dim));
    io::write_f32le(f, table.weights);
    if (!f) throw std::runtime_error("short write: " + path);
}

EmbeddingTable load_table(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    io::read_magic(f, path);
    const uint32_t rows = io::read_u32le(f);
    const uint32_t dim = io::read_u32le(f);
    if (rows != kTableRows)
        throw std::runtime_error(path + ": expected " + std::to_string(kTableRows) + " rows, got " +
                                 std::to_string(rows));
    EmbeddingTable table;
    table.dim = static_cast<int>(dim);
    table.weights = io::read_f32le(f, static_cast<size_t>(rows) * dim, path);
    return table;
}

}  // namespace llmvox::g2p
