#include "asrsim/resources.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "asrsim/util.hpp"

namespace asrsim {

namespace {

bool is_integer_field(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

bool parse_double(const std::string& s, double* out) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + s.size() || s.empty()) return false;
  if (!std::isfinite(v)) return false;
  *out = v;
  return true;
}

// "READ(2)" -> "READ"; leaves words like ")CLOSE-PAREN" alone.
std::string strip_variant_suffix(const std::string& word) {
  if (word.size() < 3 || word.back() != ')') return word;
  auto open = word.rfind('(');
  if (open == std::string::npos || open == 0) return word;
  for (std::size_t i = open + 1; i + 1 < word.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(word[i]))) return word;
  }
  return word.substr(0, open);
}

// "AE1" -> "AE". Stress digits only ever appear as a single trailing 0/1/2.
std::string strip_stress(const std::string& phoneme) {
  if (!phoneme.empty()) {
    char c = phoneme.back();
    if (c == '0' || c == '1' || c == '2') return phoneme.substr(0, phoneme.size() - 1);
  }
  return phoneme;
}

}  // namespace

const std::vector<double>* VectorLexicon::find(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? nullptr : &vectors_[it->second];
}

double VectorLexicon::norm(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) throw std::runtime_error("token not in vector lexicon: " + token);
  return norms_[it->second];
}

VectorLexicon load_vectors(const std::string& path,
                           std::optional<std::size_t> expected_dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vector file: " + path);

  VectorLexicon lex;
  lex.file_id_ = file_identity(path);

  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split_ws(line);
    if (first) {
      first = false;
      // word2vec-text header: exactly two integer fields ("count dim").
      if (fields.size() == 2 && is_integer_field(fields[0]) && is_integer_field(fields[1])) {
        lex.stats_.header_detected = true;
        continue;
      }
    }
    if (fields.empty()) continue;
    if (fields.size() < 2) {
      ++lex.stats_.malformed;
      continue;
    }
    std::vector<double> vec;
    vec.reserve(fields.size() - 1);
    bool ok = true;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double v;
      if (!parse_double(fields[i], &v)) {
        ok = false;
        break;
      }
      vec.push_back(v);
    }
    if (!ok) {
      ++lex.stats_.malformed;
      continue;
    }
    if (lex.dim_ == 0) {
      lex.dim_ = vec.size();
      if (expected_dim && *expected_dim != lex.dim_) {
        throw std::runtime_error("vector dimension " + std::to_string(lex.dim_) +
                                 " does not match expected " + std::to_string(*expected_dim));
      }
    }
    if (vec.size() != lex.dim_) {
      ++lex.stats_.malformed;
      continue;
    }
    double sq = 0.0;
    for (double v : vec) sq += v * v;
    if (sq == 0.0) {
      ++lex.stats_.zero_vectors;
      continue;
    }
    std::string token = to_lower(fields[0]);
    if (lex.index_.count(token)) {
      ++lex.stats_.duplicates;
      continue;
    }
    lex.index_.emplace(token, lex.vectors_.size());
    lex.tokens_.push_back(token);
    lex.vectors_.push_back(std::move(vec));
    lex.norms_.push_back(std::sqrt(sq));
    ++lex.stats_.parsed;
  }
  if (lex.vectors_.empty()) {
    throw std::runtime_error("no valid vector entries in " + path);
  }
  return lex;
}

const std::vector<PronouncingLexicon::Pronunciation>* PronouncingLexicon::find(
    const std::string& token) const {
  auto it = entries_.find(token);
  return it == entries_.end() ? nullptr : &it->second;
}

std::set<std::string> PronouncingLexicon::phoneme_inventory() const {
  std::set<std::string> inv;
  for (const auto& [word, prons] : entries_) {
    for (const auto& pron : prons) {
      for (const auto& ph : pron) inv.insert(ph);
    }
  }
  return inv;
}

PronouncingLexicon load_cmudict(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pronouncing dictionary: " + path);

  PronouncingLexicon lex;
  lex.file_id_ = file_identity(path);

  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind(";;;", 0) == 0) continue;
    auto fields = split_ws(line);
    if (fields.size() < 2) continue;
    std::string word = to_lower(strip_variant_suffix(fields[0]));
    PronouncingLexicon::Pronunciation pron;
    pron.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      pron.push_back(strip_stress(fields[i]));
    }
    lex.entries_[word].push_back(std::move(pron));
  }
  if (lex.entries_.empty()) {
    throw std::runtime_error("no entries in pronouncing dictionary " + path);
  }
  return lex;
}

const std::string* FeatureTable::find(const std::string& phoneme) const {
  auto it = rows_.find(phoneme);
  return it == rows_.end() ? nullptr : &it->second;
}

FeatureTable load_feature_table(const std::string& path, bool binary_fold) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open feature table: " + path);

  FeatureTable table;
  table.file_id_ = file_identity(path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty feature table: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_char(line, ',');

  // The header may carry a leading label for the phoneme column. Peek at the
  // first data row to decide.
  std::vector<std::vector<std::string>> data_rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_char(line, ',');
    if (!data_rows.empty() && fields.size() != data_rows.front().size()) {
      throw std::runtime_error("ragged feature row at line " + std::to_string(line_no) +
                               " in " + path);
    }
    data_rows.push_back(std::move(fields));
  }
  if (data_rows.empty()) throw std::runtime_error("no phonemes in feature table " + path);

  std::size_t row_len = data_rows.front().size();
  if (header.size() == row_len) {
    table.feature_names_.assign(header.begin() + 1, header.end());
  } else if (header.size() + 1 == row_len) {
    table.feature_names_.assign(header.begin(), header.end());
  } else {
    throw std::runtime_error("feature header width does not match rows in " + path);
  }
  for (auto& name : table.feature_names_) name = trim(name);

  std::size_t n_feat = table.feature_names_.size();
  for (std::size_t r = 0; r < data_rows.size(); ++r) {
    const auto& fields = data_rows[r];
    std::string phoneme = trim(fields[0]);
    if (phoneme.empty()) {
      throw std::runtime_error("empty phoneme symbol in row " + std::to_string(r + 2) +
                               " of " + path);
    }
    if (table.rows_.count(phoneme)) {
      throw std::runtime_error("duplicate phoneme symbol " + phoneme + " in " + path);
    }
    std::string values;
    values.reserve(n_feat);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      std::string cell = trim(fields[c]);
      char v;
      if (cell == "+") {
        v = '+';
      } else if (cell == "-" || cell == "\xe2\x88\x92") {  // ASCII or U+2212
        v = '-';
      } else if (cell == "0") {
        v = binary_fold ? '-' : '0';
      } else {
        throw std::runtime_error("invalid feature value '" + cell + "' for phoneme " +
                                 phoneme + ", column " + table.feature_names_[c - 1] +
                                 " in " + path);
      }
      values.push_back(v);
    }
    table.rows_.emplace(std::move(phoneme), std::move(values));
  }
  return table;
}

StopwordList load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stopword list: " + path);
  StopwordList list;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string word = trim(line);
    if (!word.empty()) list.words_.insert(to_lower(word));
  }
  if (list.words_.empty()) {
    throw std::runtime_error("stopword list is empty: " + path);
  }
  return list;
}

ValidationReport validate_resources(const VectorLexicon& vectors,
                                    const PronouncingLexicon& dict,
                                    const FeatureTable& features) {
  ValidationReport report;
  report.vector_count = vectors.size();
  report.dict_count = dict.size();

  std::size_t dict_with_vector = 0;
  for (const auto& [word, prons] : dict.entries()) {
    if (vectors.contains(word)) ++dict_with_vector;
  }
  report.eligible = dict_with_vector;
  report.vector_coverage_of_dict =
      dict.size() ? 100.0 * static_cast<double>(dict_with_vector) / dict.size() : 0.0;
  report.dict_coverage_of_vectors =
      vectors.size() ? 100.0 * static_cast<double>(dict_with_vector) / vectors.size() : 0.0;

  std::set<std::string> missing;
  for (const auto& ph : dict.phoneme_inventory()) {
    if (!features.contains(ph)) missing.insert(ph);
  }
  report.missing_phonemes.assign(missing.begin(), missing.end());
  return report;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  os << "eligible_vocabulary=" << eligible << "\n"
     << "vector_entries=" << vector_count << "\n"
     << "dictionary_entries=" << dict_count << "\n"
     << "vector_coverage_of_dict_pct=" << format_real_9(vector_coverage_of_dict) << "\n"
     << "dict_coverage_of_vectors_pct=" << format_real_9(dict_coverage_of_vectors) << "\n";
  os << "missing_phonemes=";
  for (std::size_t i = 0; i < missing_phonemes.size(); ++i) {
    if (i) os << ",";
    os << missing_phonemes[i];
  }
  os << "\n";
  return os.str();
}

}  // namespace asrsim
