#pragma once

#include <string>
#include <vector>

#include "asrsim/resources.hpp"

namespace asrsim {

enum class IndelPolicy {
  kSpecifiedFeatureCount,  // cost of inserting/deleting p = its non-0 feature count
  kConstant,
};

enum class ZeroPolicy {
  kZeroCountsAsDifference,  // 0 vs +/- prices as one feature edit
  kZeroMatchesAnything,
};

// Per-phoneme edit costs derived from an articulation feature table.
// Substitution cost is symmetric and zero on the diagonal under both
// zero policies.
class PhonemeCostModel {
 public:
  explicit PhonemeCostModel(const FeatureTable& table,
                            IndelPolicy indel = IndelPolicy::kSpecifiedFeatureCount,
                            ZeroPolicy zero = ZeroPolicy::kZeroCountsAsDifference,
                            double constant_indel = 1.0)
      : table_(&table),
        indel_policy_(indel),
        zero_policy_(zero),
        constant_indel_(constant_indel) {}

  const FeatureTable& table() const { return *table_; }
  IndelPolicy indel_policy() const { return indel_policy_; }
  ZeroPolicy zero_policy() const { return zero_policy_; }

  // Number of feature positions where p and q differ under the zero policy.
  double sub_cost(const std::string& p, const std::string& q) const;

  // Insertion/deletion cost of a single phoneme.
  double indel_cost(const std::string& p) const;

 private:
  const std::string& row(const std::string& p) const;

  const FeatureTable* table_;
  IndelPolicy indel_policy_;
  ZeroPolicy zero_policy_;
  double constant_indel_;
};

using PhonemeSeq = std::vector<std::string>;

// Minimal edit cost between two phoneme sequences (Levenshtein DP with
// feature-based substitution costs). Sequences must be non-empty and all
// phonemes known to the cost model's table.
double phono_edit_distance(const PhonemeCostModel& model, const PhonemeSeq& a,
                           const PhonemeSeq& b);

// Same, but also returns the (|a|+1) x (|b|+1) DP matrix for inspection.
double phono_edit_distance_matrix(const PhonemeCostModel& model, const PhonemeSeq& a,
                                  const PhonemeSeq& b,
                                  std::vector<std::vector<double>>* matrix);

// Minimum edit distance over all pronunciation pairs of the two words.
// Throws if a word is missing from the lexicon.
double word_phono_distance(const PhonemeCostModel& model, const PronouncingLexicon& lex,
                           const std::string& w1, const std::string& w2);

}  // namespace asrsim
