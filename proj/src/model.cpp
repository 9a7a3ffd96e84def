#include "llmvox/model.hpp"

#include <cstring>

namespace llmvox {

namespace {

std::string u64_str(uint64_t v) { return std::to_string(v); }

int kv_int(const io::KvConfig& kv, const std::string& key, int fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
        return std::stoi(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected integer, got '" + it->second + "'");
    }
}

uint64_t kv_u64(const io::KvConfig& kv, const std::string& key, uint64_t fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected unsigned integer, got '" + it->second + "'");
    }
}

}  // namespace

namespace codec {

io::KvConfig CodecConfig::to_kv() const {
    return {{"codec.sample_rate_hz", std::to_string(sample_rate_hz)},
            {"codec.tokens_per_second", std::to_string(tokens_per_second)},
            {"codec.feature_dim", std::to_string(feature_dim)},
            {"codec.vocab_size", std::to_string(vocab_size)},
            {"codec.seed", u64_str(seed)}};
}

CodecConfig CodecConfig::from_kv(const io::KvConfig& kv) {
    CodecConfig cfg;
    cfg.sample_rate_hz = kv_int(kv, "codec.sample_rate_hz", cfg.sample_rate_hz);
    cfg.tokens_per_second = kv_int(kv, "codec.tokens_per_second", cfg.tokens_per_second);
    cfg.feature_dim = kv_int(kv, "codec.feature_dim", cfg.feature_dim);
    cfg.vocab_size = kv_int(kv, "codec.vocab_size", cfg.vocab_size);
    cfg.seed = kv_u64(kv, "codec.seed", cfg.seed);
    cfg.validate();
    return cfg;
}

}  // namespace codec

namespace model {

io::KvConfig ModelConfig::to_kv() const {
    return {{"n_layer", std::to_string(n_layer)},
            {"n_head", std::to_string(n_head)},
            {"n_embd", std::to_string(n_embd())},
            {"block_size", std::to_string(block_size)},
            {"text_dim", std::to_string(text_dim)},
            {"feature_dim", std::to_string(feature_dim)},
            {"vocab_out", std::to_string(vocab_out)},
            {"model.seed", u64_str(seed)}};
}

ModelConfig ModelConfig::from_kv(const io::KvConfig& kv) {
    ModelConfig cfg;
    cfg.n_layer = kv_int(kv, "n_layer", cfg.n_layer);
    cfg.n_head = kv_int(kv, "n_head", cfg.n_head);
    cfg.block_size = kv_int(kv, "block_size", cfg.block_size);
    cfg.text_dim = kv_int(kv, "text_dim", cfg.text_dim);
    cfg.feature_dim = kv_int(kv, "feature_dim", cfg.feature_dim);
    cfg.vocab_out = kv_int(kv, "vocab_out", cfg.vocab_out);
    cfg.seed = kv_u64(kv, "model.seed", cfg.seed);
    const int declared = kv_int(kv, "n_embd", cfg.n_embd());
    if (declared != cfg.n_embd())
        throw ConfigError("n_embd " + std::to_string(declared) + " != text_dim + feature_dim = " +
                          std::to_string(cfg.n_embd()));
    cfg.validate();
    return cfg;
}

void save_checkpoint(const std::string& path, Network<float>& net, const codec::CodecConfig& codec_cfg) {
    std::vector<io::Section> sections;
    for (const auto& named : net.params().all()) {
        io::Section s;
        s.name = named.name;
        s.rows = static_cast<uint32_t>(named.mat->rows);
        s.cols = static_cast<uint32_t>(named.mat->cols);
        s.data = named.mat->v;
        sections.push_back(std::move(s));
    }
    io::save_sections(path, sections);

    io::KvConfig kv = net.config().to_kv();
    for (const auto& [k, v] : codec_cfg.to_kv()) kv[k] = v;
    io::save_kv(path + ".cfg", kv);
}

std::pair<Network<float>, codec::CodecConfig> load_checkpoint(const std::string& path) {
    const io::KvConfig kv = io::load_kv(path + ".cfg");
    const ModelConfig mc = ModelConfig::from_kv(kv);
    const codec::CodecConfig cc = codec::CodecConfig::from_kv(kv);
    Network<float> net(mc);

    const auto sections = io::load_sections(path);
    auto named = net.params().all();
    if (sections.size() != named.size())
        throw std::runtime_error(path + ": expected " + std::to_string(named.size()) + " sections, found " +
                                 std::to_string(sections.size()));
    for (size_t i = 0; i < named.size(); ++i) {
        const auto& s = sections[i];
        if (s.name != named[i].name)
            throw std::runtime_error(path + ": section '" + s.name + "' where '" + named[i].name + "' expected");
        if (static_cast<int>(s.rows) != named[i].mat->rows || static_cast<int>(s.cols) != named[i].mat->cols)
            throw std::runtime_error(path + ": section '" + s.name + "' shape mismatch");
        named[i].mat->v = s.data;
    }
    return {std::move(net), cc};
}

g2p::EmbeddingTable export_text_table(const Network<float>& net) {
    g2p::EmbeddingTable table;
    table.dim = net.config().text_dim;
    table.seed = net.config().seed;
    table.weights = net.params().text_table.v;
    return table;
}

}  // namespace model
}  // namespace llmvox
