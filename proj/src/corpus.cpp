#include "llmvox/corpus.hpp"

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "llmvox/g2p.hpp"

namespace llmvox::corpus {

LoadResult load_corpus(const std::string& path, int codec_vocab, int block_size) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open corpus: " + path);
    LoadResult out;
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const size_t tab = line.find('\t');
        if (tab == std::string::npos) throw CorpusParseError(line_no, "missing TAB separator");
        TrainingPair pair;
        pair.text = line.substr(0, tab);
        if (pair.text.empty()) throw CorpusParseError(line_no, "empty text field");
        std::istringstream toks(line.substr(tab + 1));
        std::string item;
        while (std::getline(toks, item, ',')) {
            try {
                const long v = std::stol(item);
                if (v < 0 || v >= codec_vocab)
                    throw CorpusParseError(line_no, "token id " + std::to_string(v) + " outside vocab of " +
                                                        std::to_string(codec_vocab));
                pair.speech_tokens.push_back(static_cast<model::SpeechToken>(v));
            } catch (const CorpusParseError&) {
                throw;
            } catch (const std::exception&) {
                throw CorpusParseError(line_no, "malformed token '" + item + "'");
            }
        }
        if (pair.speech_tokens.empty()) throw CorpusParseError(line_no, "no speech tokens");

        const size_t m = g2p::subtokenize_text(pair.text).size();
        if (m > pair.speech_tokens.size() || pair.speech_tokens.size() + 1 > static_cast<size_t>(block_size)) {
            ++out.dropped;
            LLMVOX_LOG_INFO("corpus line %d dropped (M=%zu, T=%zu, block=%d)", line_no, m,
                            pair.speech_tokens.size(), block_size);
            continue;
        }
        out.pairs.push_back(std::move(pair));
    }
    return out;
}

void save_corpus(const std::string& path, const std::vector<TrainingPair>& pairs) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& p : pairs) {
        f << p.text << '\t';
        for (size_t i = 0; i < p.speech_tokens.size(); ++i) {
            if (i) f << ',';
            f << p.speech_tokens[i];
        }
        f << '\n';
    }
    if (!f) throw std::runtime_error("short write: " + path);
}

std::vector<model::SpeechToken> tokens_for_text(const std::string& text, int codec_vocab, int min_tokens,
                                                int max_tokens) {
    const uint64_t h = fnv1a64(text);
    const size_t m = g2p::subtokenize_text(text).size();
    size_t count = static_cast<size_t>(min_tokens) + h % static_cast<uint64_t>(max_tokens - min_tokens + 1);
    count = std::max(count, m);  // keep M <= T
    std::vector<model::SpeechToken> tokens(count);
    for (size_t k = 0; k < count; ++k) {
        const uint64_t v = h * (k + 1) + 0x9e3779b97f4a7c15ull * k;
        tokens[k] = static_cast<model::SpeechToken>(v % static_cast<uint64_t>(codec_vocab));
    }
    return tokens;
}

std::vector<TrainingPair> generate_corpus(const GenSpec& spec) {
    if (spec.pairs < 1 || spec.min_words < 1 || spec.max_words < spec.min_words || spec.min_tokens < 1 ||
        spec.max_tokens < spec.min_tokens || spec.codec_vocab < 2)
        throw ConfigError("gen-corpus: invalid generator parameters");

    static const char* kLexicon[] = {
        "alpha", "bravo", "cedar",  "delta", "ember", "fjord", "gleam", "harbor", "indigo", "jasper",
        "koral", "lumen", "marble", "nimbus", "ochre", "pearl", "quill", "raven",  "slate",  "timber",
        "umber", "velvet", "willow", "xenon", "yarrow", "zephyr"};
    const size_t lex_n = std::size(kLexicon);

    std::mt19937_64 rng(derive_seed(spec.seed, "corpus.gen"));
    std::uniform_int_distribution<int> word_count(spec.min_words, spec.max_words);
    std::uniform_int_distribution<size_t> word_pick(0, lex_n - 1);

    std::vector<TrainingPair> pairs;
    std::set<std::string> seen;
    int guard = 0;
    while (static_cast<int>(pairs.size()) < spec.pairs) {
        if (++guard > spec.pairs * 1000) throw ConfigError("gen-corpus: cannot generate enough distinct texts");
        const int n = word_count(rng);
        std::string text;
        for (int i = 0; i < n; ++i) {
            if (i) text += ' ';
            text += kLexicon[word_pick(rng)];
        }
        if (!seen.insert(text).second) continue;
        TrainingPair pair;
        pair.text = text;
        pair.speech_tokens = tokens_for_text(text, spec.codec_vocab, spec.min_tokens, spec.max_tokens);
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

}  // namespace llmvox::corpus
