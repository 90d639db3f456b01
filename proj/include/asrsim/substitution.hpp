#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asrsim/neighbors.hpp"
#include "asrsim/phonology.hpp"
#include "asrsim/resources.hpp"

namespace asrsim {

// Shape of the PMF exponent. Sigma itself is always the mean distance of
// the kept candidate cluster.
enum class SigmaMode {
  kMeanSq,      // p ~ exp(-d / sigma^2)
  kMeanLinear,  // p ~ exp(-d / sigma)
};

enum class ThreshMode {
  kAbsolute,  // keep candidates with d_phono <= thresh
  kQuantile,  // keep candidates with d_phono <= per-word q-quantile of neighbor distances
};

std::string sigma_mode_name(SigmaMode m);
SigmaMode sigma_mode_from_name(const std::string& s);

struct Candidate {
  std::string token;
  double d_phono;
  double probability;
};

// Substitution candidates for one source word, sorted by
// (d_phono ascending, token); probabilities sum to 1.
struct CandidateSet {
  std::vector<Candidate> candidates;
  double sigma = 0.0;  // mean kept distance; 0 means uniform probabilities

  std::size_t size() const { return candidates.size(); }
};

struct BuildConfig {
  std::size_t n_semantic = 1000;
  double thresh = 6.0;
  ThreshMode thresh_mode = ThreshMode::kAbsolute;
  SigmaMode sigma_mode = SigmaMode::kMeanSq;
  // Optional combined-distance hook: exponent distance becomes
  // d_phono + semantic_weight * d_semantic. Off (0) by default.
  double semantic_weight = 0.0;
  ZeroPolicy zero_policy = ZeroPolicy::kZeroCountsAsDifference;
  IndelPolicy indel_policy = IndelPolicy::kSpecifiedFeatureCount;
  std::size_t workers = 1;
  std::size_t shards = 1;  // build only eligible words with index % shards == shard
  std::size_t shard = 0;
};

struct TableMeta {
  std::string vector_file_id;
  std::string dict_file_id;
  std::string features_file_id;
  std::size_t n_semantic = 1000;
  double phono_threshold = 6.0;
  ThreshMode thresh_mode = ThreshMode::kAbsolute;
  SigmaMode sigma_mode = SigmaMode::kMeanSq;
  double semantic_weight = 0.0;
  std::string zero_policy = "difference";
  std::string indel_policy = "specified_feature_count";
  std::size_t shards = 1;
  std::size_t shard = 0;
};

class SubstitutionTable {
 public:
  TableMeta meta;

  std::size_t size() const { return entries_.size(); }
  bool contains(const std::string& token) const { return entries_.count(token) > 0; }
  const CandidateSet* find(const std::string& token) const;
  void insert(const std::string& token, CandidateSet cs);
  // Entries keyed by source token, sorted (std::map) so serialization is
  // schedule-independent.
  const std::map<std::string, CandidateSet>& entries() const { return entries_; }

 private:
  std::map<std::string, CandidateSet> entries_;
};

// Candidate distribution for one source word: phonological distance to
// each semantic neighbor, threshold filter, sigma = mean kept distance,
// exponential PMF. Returns nullopt when no candidate survives the
// threshold (the word stays uncorruptible).
std::optional<CandidateSet> build_candidate_set(
    const std::string& w, const NeighborList& nbrs, const PronouncingLexicon& plex,
    const PhonemeCostModel& cost, double thresh,
    ThreshMode thresh_mode = ThreshMode::kAbsolute,
    SigmaMode sigma_mode = SigmaMode::kMeanSq, double semantic_weight = 0.0);

// Full offline table build over the eligible vocabulary
// (corpus_vocab intersected with the vector lexicon and the pronouncing
// dictionary). Parallelizes across source words; output is identical for
// any worker count.
SubstitutionTable build_table(const std::set<std::string>& corpus_vocab,
                              const VectorLexicon& lex, const PronouncingLexicon& plex,
                              const FeatureTable& ftab, const BuildConfig& cfg);

// Inverse-CDF draw: first candidate whose cumulative probability exceeds r.
const std::string& sample_substitute(const CandidateSet& cs, double r);

// Versioned text serialization; fixed 12-significant-digit reals.
void save_table(const SubstitutionTable& table, const std::string& path);
SubstitutionTable load_table(const std::string& path);

// Merge shard tables built with identical configuration (used by the CLI's
// sharded build). Throws on meta mismatch or duplicate source words.
SubstitutionTable merge_tables(const std::vector<SubstitutionTable>& shards);

}  // namespace asrsim
