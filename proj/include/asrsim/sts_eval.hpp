#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "asrsim/corruption.hpp"
#include "asrsim/embeddings.hpp"
#include "asrsim/substitution.hpp"

namespace asrsim {

struct SentencePair {
  std::string id;
  std::string sentence_a;
  std::string sentence_b;
  double gold_score;
  std::string split;  // "train"/"trial"/"test"/... when the source carries one
};

// SICK distribution format: TSV with a header naming at least pair_ID,
// sentence_A, sentence_B and relatedness_score (gold on [1,5]). Rows failing
// the range or column checks are skipped and counted.
std::vector<SentencePair> load_sick(const std::string& path, std::size_t* skipped = nullptr,
                                    const std::string& default_split = "all");

// STS-benchmark distribution format: headerless TSV
// genre, filename, year, index, score, sentence1, sentence2 (gold on [0,5]).
std::vector<SentencePair> load_stsb(const std::string& path, std::size_t* skipped = nullptr,
                                    const std::string& default_split = "all");

// Sample Pearson correlation. Throws on length mismatch, fewer than two
// points, or a constant input (undefined correlation).
double pearson(const std::vector<double>& x, const std::vector<double>& y);

struct SweepConfig {
  std::vector<EmbedMethod> methods;
  std::vector<double> wer_grid;  // fractions in [0,1]
  std::uint64_t seed = 42;
  double sif_a = 0.001;
  std::size_t subspace_rank = 4;
  std::size_t usif_m = 5;
  const StopwordList* stopwords = nullptr;
};

struct SweepRow {
  EmbedMethod method;
  double wer;
  double mean_self_similarity;
  std::size_t n_sentences;
  std::size_t n_excluded;  // degenerate sentences left out of the mean
};

// Self-similarity sweep: corrupt the corpus at each WER level (nested
// selections under one seed), embed original and corrupted versions with
// each method, and average the per-sentence similarity. Vector methods use
// cosine; subspaces use the normalized principal-angle similarity so the
// 0%-WER baseline is exactly 1.
std::vector<SweepRow> robustness_sweep(const std::vector<std::string>& lines,
                                       const SubstitutionTable& table,
                                       const VectorLexicon& lex, const SweepConfig& cfg);

struct EvalResult {
  std::string method;
  std::string dataset;
  std::string split;
  double wer = 0.0;
  double pcc = 0.0;
  std::size_t n_pairs = 0;
  std::size_t n_excluded_degenerate = 0;
  std::uint64_t seed = 0;
  std::string config_digest;
};

struct StsRunConfig {
  EmbedMethod method = EmbedMethod::kAvg;
  double wer = 0.0;
  std::uint64_t seed = 42;
  double sif_a = 0.001;
  std::size_t subspace_rank = 4;
  std::size_t usif_m = 5;
  const StopwordList* stopwords = nullptr;
  // External sentence vectors (precomputed encoder output) keyed
  // "<pair id>:a" / "<pair id>:b". `external_corrupted` holds vectors of the
  // corrupted sentences and is required when wer > 0.
  const std::unordered_map<std::string, SentenceVector>* external_clean = nullptr;
  const std::unordered_map<std::string, SentenceVector>* external_corrupted = nullptr;
};

// One STS evaluation: corrupt both sentences of every pair at the given WER
// (bypassed entirely at 0), embed, score each pair with the method's
// similarity, and correlate with the gold scores. Degenerate pairs are
// excluded and counted; more than 10% exclusions is an error.
EvalResult sts_run(const std::vector<SentencePair>& pairs, const SubstitutionTable& table,
                   const VectorLexicon& lex, const StsRunConfig& cfg);

// The corrupted (or clean, at wer = 0) pair sentences in the exact form
// sts_run embeds, keyed like the external-vector TSV. Lets an external
// encoder be run on precisely the evaluated text.
std::vector<std::pair<std::string, std::string>> sts_corrupted_sentences(
    const std::vector<SentencePair>& pairs, const SubstitutionTable& table, double wer,
    std::uint64_t seed);

}  // namespace asrsim
