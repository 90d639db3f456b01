#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace asrsim {

// Word -> dense vector table with cached Euclidean norms.
// All tables in this header are immutable once loaded and safe to share
// across threads.
class VectorLexicon {
 public:
  struct LoadStats {
    std::size_t parsed = 0;
    std::size_t duplicates = 0;    // same lowercase token seen again (first wins)
    std::size_t malformed = 0;     // wrong field count / unparsable number
    std::size_t zero_vectors = 0;  // all-zero vectors are rejected
    bool header_detected = false;
  };

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  bool contains(const std::string& token) const { return index_.count(token) > 0; }
  const std::vector<double>* find(const std::string& token) const;
  double norm(const std::string& token) const;  // throws if absent
  const LoadStats& stats() const { return stats_; }
  std::string file_id() const { return file_id_; }

  // Tokens in insertion order (file order, duplicates dropped).
  const std::vector<std::string>& tokens() const { return tokens_; }

  friend VectorLexicon load_vectors(const std::string& path,
                                    std::optional<std::size_t> expected_dim);

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> tokens_;
  std::vector<std::vector<double>> vectors_;
  std::vector<double> norms_;
  std::unordered_map<std::string, std::size_t> index_;
  LoadStats stats_;
  std::string file_id_;
};

// Word -> ARPABET pronunciations (stress digits stripped, possibly several
// per word).
class PronouncingLexicon {
 public:
  using Pronunciation = std::vector<std::string>;

  std::size_t size() const { return entries_.size(); }
  bool contains(const std::string& token) const { return entries_.count(token) > 0; }
  const std::vector<Pronunciation>* find(const std::string& token) const;

  // Every distinct phoneme symbol that occurs in any pronunciation.
  std::set<std::string> phoneme_inventory() const;
  const std::unordered_map<std::string, std::vector<Pronunciation>>& entries() const {
    return entries_;
  }
  std::string file_id() const { return file_id_; }

  friend PronouncingLexicon load_cmudict(const std::string& path);

 private:
  std::unordered_map<std::string, std::vector<Pronunciation>> entries_;
  std::string file_id_;
};

// Phoneme -> articulation feature values over {+, -, 0}; 0 = unspecified.
class FeatureTable {
 public:
  std::size_t feature_count() const { return feature_names_.size(); }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  bool contains(const std::string& phoneme) const { return rows_.count(phoneme) > 0; }
  const std::string* find(const std::string& phoneme) const;  // row as "+-0..." chars
  std::size_t size() const { return rows_.size(); }
  std::string file_id() const { return file_id_; }

  friend FeatureTable load_feature_table(const std::string& path, bool binary_fold);

 private:
  std::vector<std::string> feature_names_;
  std::map<std::string, std::string> rows_;  // value chars, one per feature
  std::string file_id_;
};

class StopwordList {
 public:
  bool contains(const std::string& token) const { return words_.count(token) > 0; }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

  friend StopwordList load_stopwords(const std::string& path);

 private:
  std::unordered_set<std::string> words_;
};

struct ValidationReport {
  std::size_t eligible = 0;                 // tokens in vectors AND dictionary
  std::vector<std::string> missing_phonemes;  // used by dict, absent from table (fatal)
  double vector_coverage_of_dict = 0.0;     // % of dict tokens that have a vector
  double dict_coverage_of_vectors = 0.0;    // % of vector tokens with a pronunciation
  std::size_t vector_count = 0;
  std::size_t dict_count = 0;

  bool fatal() const { return !missing_phonemes.empty(); }
  std::string to_string() const;
};

// Loaders. All throw std::runtime_error on unreadable files or files that
// yield no usable entries.

// Whitespace-separated "token v1 ... vd" lines, optionally preceded by a
// "count dim" header (detected as a first line of exactly two integers).
VectorLexicon load_vectors(const std::string& path,
                           std::optional<std::size_t> expected_dim = std::nullopt);

// CMU dictionary text convention: ";;;" comments, "WORD PH1 PH2 ...",
// alternates flagged "WORD(2)".
PronouncingLexicon load_cmudict(const std::string& path);

// CSV, header row of feature names (optionally with a leading label for the
// phoneme column), data rows "SYMBOL,v1,...,vk" with values in {+,-,0}.
// binary_fold maps every 0 to - at load, giving the strictly binary reading.
FeatureTable load_feature_table(const std::string& path, bool binary_fold = false);

// One token per line, "#" comments.
StopwordList load_stopwords(const std::string& path);

ValidationReport validate_resources(const VectorLexicon& vectors,
                                    const PronouncingLexicon& dict,
                                    const FeatureTable& features);

}  // namespace asrsim
