#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asrsim/substitution.hpp"

namespace asrsim {

// One whitespace-delimited token, decomposed so that
// prefix + core + suffix is the original surface form.
struct Token {
  std::string prefix;  // leading non-alphanumeric shell
  std::string core;    // body, original casing
  std::string suffix;  // trailing non-alphanumeric shell
  std::string lookup;  // lowercase core, the table key
  bool eligible = false;
};

struct TokenizedSentence {
  std::string raw;
  // separators[i] precedes tokens[i]; separators.back() trails the line.
  // Joining separators and token surfaces reproduces raw byte for byte.
  std::vector<std::string> separators;
  std::vector<Token> tokens;

  std::string reconstruct() const;
};

// Whitespace split with punctuation shells peeled from each end of a token.
// Bytes >= 0x80 are treated as word characters so UTF-8 text passes through
// unharmed.
TokenizedSentence tokenize(const std::string& line);
TokenizedSentence tokenize(const std::string& line, const SubstitutionTable& table);

void mark_eligible(TokenizedSentence& sentence, const SubstitutionTable& table);

// Lowercase lookup cores of a line, empty cores dropped. The token stream
// the embedding and frequency layers consume.
std::vector<std::string> lookup_tokens(const std::string& line);

struct Position {
  std::size_t sentence;
  std::size_t token;
  bool operator==(const Position&) const = default;
  bool operator<(const Position& o) const {
    return sentence != o.sentence ? sentence < o.sentence : token < o.token;
  }
};

struct CorruptionRecord {
  std::size_t sentence_index;
  std::size_t token_index;
  std::string original;     // lowercase core before substitution
  std::string replacement;  // candidate token drawn from the PMF
  double probability;       // stored PMF probability of the drawn candidate
};

struct CorruptionOptions {
  bool per_sentence = false;  // apply the WER per sentence instead of corpus-wide
};

struct CorruptionResult {
  std::vector<std::string> lines;
  std::vector<CorruptionRecord> records;
  std::size_t tokens_total = 0;
  std::size_t eligible_total = 0;
  std::size_t substituted = 0;
  double realized_wer_eligible = 0.0;
  double realized_wer_all = 0.0;
};

// Exactly round(wer * E) distinct eligible positions, drawn by a single
// seeded shuffle of all eligible positions. Selections at lower WER are a
// prefix subset of selections at higher WER under the same seed.
// Returned in document order.
std::vector<Position> select_positions(const std::vector<TokenizedSentence>& corpus,
                                       double wer, std::uint64_t seed,
                                       const CorruptionOptions& opts = {});

// Applies sampled substitutions at the selected positions. The replacement
// draw for a position depends only on (corpus, seed), so draws for shared
// positions are identical across WER levels.
CorruptionResult corrupt_corpus(const std::vector<std::string>& lines,
                                const SubstitutionTable& table, double wer,
                                std::uint64_t seed, const CorruptionOptions& opts = {});

std::vector<std::string> read_lines(const std::string& path);
void write_lines(const std::vector<std::string>& lines, const std::string& path);

}  // namespace asrsim
