#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "asrsim/resources.hpp"

namespace asrsim {

// Unigram probabilities estimated from a corpus (or an external count file).
// Unseen words have p = 0, which the SIF-style weights map to weight 1.
class FrequencyModel {
 public:
  static FrequencyModel from_sentences(const std::vector<std::vector<std::string>>& sentences);
  // Text file of "token count" or "token<TAB>count" lines.
  static FrequencyModel from_file(const std::string& path);

  double probability(const std::string& token) const;
  std::size_t vocabulary_size() const { return counts_.size(); }
  std::size_t total() const { return total_; }
  // Number of vocabulary words with probability strictly above p.
  std::size_t count_above(double p) const;

 private:
  std::unordered_map<std::string, std::size_t> counts_;
  std::size_t total_ = 0;
};

struct SentenceVector {
  std::vector<double> values;
  bool degenerate = false;  // no token resolved; values are all zero
};

struct SentenceSubspace {
  Eigen::MatrixXd basis;  // d x r, orthonormal columns
  bool degenerate = false;

  std::size_t rank() const { return degenerate ? 0 : static_cast<std::size_t>(basis.cols()); }
};

// Common directions fitted on a corpus of sentence vectors. For SIF a single
// component with weight 1; for uSIF the top m components weighted by
// lambda_i = sigma_i^2 / sum_m sigma_j^2 (lambdas sum to 1).
struct CommonComponentModel {
  std::vector<std::vector<double>> components;
  std::vector<double> weights;
  std::vector<double> singular_values;
};

enum class CommonComponentMode { kSif, kUsif };

// --- per-sentence representations ---------------------------------------

// Arithmetic mean of the resolvable word vectors. With a stopword list the
// mean is taken over non-stopwords; if that removes every resolvable token
// the unfiltered set is used instead.
SentenceVector embed_average(const VectorLexicon& lex, const std::vector<std::string>& tokens,
                             const StopwordList* stopwords = nullptr);

// a / (a + p(w)); unseen words get weight 1.
double sif_weight(const FrequencyModel& freq, double a, const std::string& token);

// Weighted mean with SIF weights. Common-component removal is a separate
// corpus-level pass; see fit_common_components / remove_common_components.
SentenceVector embed_sif(const VectorLexicon& lex, const FrequencyModel& freq,
                         const std::vector<std::string>& tokens, double a = 0.001);

// uSIF's weight parameter is computed from corpus statistics, not tuned:
//   threshold = 1 - (1 - 1/V)^n,  alpha = |{w : p(w) > threshold}| / V,
//   Z = V/2,  a = (1 - alpha) / (alpha Z),  weight(w) = a / (a/2 + p(w)),
// with n the average sentence length and V the vocabulary size.
struct UsifParams {
  double a = 0.0;
  double alpha = 0.0;
  long n = 1;
  std::size_t vocab_size = 0;
};
UsifParams usif_params(const FrequencyModel& freq, double avg_sentence_length);
double usif_weight(const FrequencyModel& freq, const UsifParams& params,
                   const std::string& token);
SentenceVector embed_usif(const VectorLexicon& lex, const FrequencyModel& freq,
                          const std::vector<std::string>& tokens, const UsifParams& params);

// Orthonormal basis of the top-r principal directions of the sentence's
// word vectors (uncentered). r = min(n_rank, number of distinct resolvable
// tokens). Stopword handling as in embed_average.
SentenceSubspace embed_subspace(const VectorLexicon& lex, const std::vector<std::string>& tokens,
                                std::size_t n_rank,
                                const StopwordList* stopwords = nullptr);

// --- corpus-level pass ----------------------------------------------------

// Top-m right singular directions of the stacked (uncentered) sentence
// matrix. Degenerate vectors are ignored; throws if fewer than m remain.
// SIF mode forces m = 1.
CommonComponentModel fit_common_components(const std::vector<SentenceVector>& vectors,
                                           CommonComponentMode mode, std::size_t m = 5);

// v - sum_i lambda_i (c_i . v) c_i
SentenceVector remove_common_components(const SentenceVector& v,
                                        const CommonComponentModel& ccm);

// --- similarities -----------------------------------------------------------

// u.v / (|u||v|); 0 (degenerate) if either vector is zero or flagged.
double cosine_similarity(const SentenceVector& u, const SentenceVector& v);

// sqrt(sum_t sigma_t^2) over the singular values of basis1^T basis2.
// Identical rank-r subspaces give sqrt(r); orthogonal subspaces give 0.
double principal_angle_similarity(const SentenceSubspace& a, const SentenceSubspace& b);

// Principal angle similarity divided by sqrt(min(r1, r2)) so identical
// subspaces score exactly 1 regardless of rank.
double normalized_principal_angle_similarity(const SentenceSubspace& a,
                                             const SentenceSubspace& b);

// --- whole-corpus embedding -------------------------------------------------

enum class EmbedMethod { kAvg, kAvgNoStop, kSif, kUsif, kSubspace };

std::string embed_method_name(EmbedMethod m);
EmbedMethod embed_method_from_name(const std::string& name);

struct EmbedConfig {
  EmbedMethod method = EmbedMethod::kAvg;
  double sif_a = 0.001;
  std::size_t subspace_rank = 4;
  std::size_t usif_m = 5;
  const StopwordList* stopwords = nullptr;  // used by kAvgNoStop and kSubspace
};

struct CorpusEmbedding {
  EmbedMethod method = EmbedMethod::kAvg;
  std::vector<SentenceVector> vectors;      // vector methods, post-removal for SIF/uSIF
  std::vector<SentenceSubspace> subspaces;  // subspace method
  CommonComponentModel ccm;                 // fitted components (SIF/uSIF only)
  UsifParams usif;                          // populated for kUsif
  std::size_t n_degenerate = 0;
};

// Weighting pass, component fit and removal composed per method.
CorpusEmbedding embed_corpus(const EmbedConfig& cfg, const VectorLexicon& lex,
                             const FrequencyModel& freq,
                             const std::vector<std::vector<std::string>>& sentences);

// --- external sentence vectors ----------------------------------------------

// TSV "id<TAB>v1 v2 ... vd". Throws on duplicate ids or inconsistent
// dimensions, naming the offending line.
std::unordered_map<std::string, SentenceVector> load_external_embeddings(
    const std::string& path);

// Inverse of load_external_embeddings, 9 significant digits.
void export_embeddings(const std::vector<std::string>& ids,
                       const std::vector<SentenceVector>& vectors, const std::string& path);

}  // namespace asrsim
