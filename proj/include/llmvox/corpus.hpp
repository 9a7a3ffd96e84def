// Training corpus handling: line-delimited `text<TAB>token,token,...`
// records plus a deterministic synthetic generator so training needs no
// external data.
#pragma once

#include <string>
#include <vector>

#include "llmvox/model.hpp"

namespace llmvox::corpus {

using model::TrainingPair;

struct LoadResult {
    std::vector<TrainingPair> pairs;
    int dropped = 0;  // pairs violating M <= T or the block-size bound
};

// Throws CorpusParseError (with the line number) on malformed records or
// out-of-vocabulary token ids; drops pairs whose text is longer than their
// token sequence.
LoadResult load_corpus(const std::string& path, int codec_vocab, int block_size);

void save_corpus(const std::string& path, const std::vector<TrainingPair>& pairs);

struct GenSpec {
    int pairs = 32;
    int codec_vocab = 4096;
    int min_words = 2;
    int max_words = 4;
    int min_tokens = 16;
    int max_tokens = 28;
    uint64_t seed = 0;
};

// Seeded word choices with token sequences that are a pure function of the
// text bytes, so regenerating with the same spec is bit-identical.
std::vector<TrainingPair> generate_corpus(const GenSpec& spec);

// The deterministic text -> tokens rule used by the generator.
std::vector<model::SpeechToken> tokens_for_text(const std::string& text, int codec_vocab, int min_tokens,
                                                int max_tokens);

}  // namespace llmvox::corpus
