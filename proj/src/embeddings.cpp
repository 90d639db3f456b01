#include "asrsim/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "asrsim/util.hpp"

namespace asrsim {

FrequencyModel FrequencyModel::from_sentences(
    const std::vector<std::vector<std::string>>& sentences) {
  FrequencyModel fm;
  for (const auto& sent : sentences) {
    for (const auto& tok : sent) {
      if (tok.empty()) continue;
      ++fm.counts_[tok];
      ++fm.total_;
    }
  }
  return fm;
}

FrequencyModel FrequencyModel::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open frequency file: " + path);
  FrequencyModel fm;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split_ws(line);
    if (fields.size() != 2) continue;
    char* end = nullptr;
    unsigned long long c = std::strtoull(fields[1].c_str(), &end, 10);
    if (end != fields[1].c_str() + fields[1].size()) continue;
    fm.counts_[to_lower(fields[0])] += static_cast<std::size_t>(c);
    fm.total_ += static_cast<std::size_t>(c);
  }
  if (fm.counts_.empty()) throw std::runtime_error("no counts in frequency file: " + path);
  return fm;
}

double FrequencyModel::probability(const std::string& token) const {
  auto it = counts_.find(token);
  if (it == counts_.end() || total_ == 0) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(total_);
}

std::size_t FrequencyModel::count_above(double p) const {
  if (total_ == 0) return 0;
  std::size_t n = 0;
  for (const auto& [token, count] : counts_) {
    if (static_cast<double>(count) / static_cast<double>(total_) > p) ++n;
  }
  return n;
}

namespace {

// Resolvable tokens with the stopword fallback rule shared by the
// average and subspace methods.
std::vector<const std::vector<double>*> resolve_tokens(
    const VectorLexicon& lex, const std::vector<std::string>& tokens,
    const StopwordList* stopwords, std::vector<std::string>* kept_tokens = nullptr) {
  std::vector<const std::vector<double>*> vecs;
  std::vector<std::string> kept;
  if (stopwords) {
    for (const auto& tok : tokens) {
      if (stopwords->contains(tok)) continue;
      if (const auto* v = lex.find(tok)) {
        vecs.push_back(v);
        kept.push_back(tok);
      }
    }
  }
  if (vecs.empty()) {
    for (const auto& tok : tokens) {
      if (const auto* v = lex.find(tok)) {
        vecs.push_back(v);
        kept.push_back(tok);
      }
    }
  }
  if (kept_tokens) *kept_tokens = std::move(kept);
  return vecs;
}

SentenceVector degenerate_vector(std::size_t dim) {
  SentenceVector sv;
  sv.values.assign(dim, 0.0);
  sv.degenerate = true;
  return sv;
}

template <typename WeightFn>
SentenceVector weighted_mean(const VectorLexicon& lex, const std::vector<std::string>& tokens,
                             WeightFn weight) {
  SentenceVector sv;
  sv.values.assign(lex.dim(), 0.0);
  std::size_t used = 0;
  for (const auto& tok : tokens) {
    const auto* v = lex.find(tok);
    if (!v) continue;
    double w = weight(tok);
    for (std::size_t i = 0; i < sv.values.size(); ++i) sv.values[i] += w * (*v)[i];
    ++used;
  }
  if (used == 0) return degenerate_vector(lex.dim());
  for (auto& x : sv.values) x /= static_cast<double>(used);
  return sv;
}

}  // namespace

SentenceVector embed_average(const VectorLexicon& lex, const std::vector<std::string>& tokens,
                             const StopwordList* stopwords) {
  auto vecs = resolve_tokens(lex, tokens, stopwords);
  if (vecs.empty()) return degenerate_vector(lex.dim());
  SentenceVector sv;
  sv.values.assign(lex.dim(), 0.0);
  for (const auto* v : vecs) {
    for (std::size_t i = 0; i < sv.values.size(); ++i) sv.values[i] += (*v)[i];
  }
  for (auto& x : sv.values) x /= static_cast<double>(vecs.size());
  return sv;
}

double sif_weight(const FrequencyModel& freq, double a, const std::string& token) {
  if (a <= 0.0) throw std::invalid_argument("SIF weight parameter a must be positive");
  return a / (a + freq.probability(token));
}

SentenceVector embed_sif(const VectorLexicon& lex, const FrequencyModel& freq,
                         const std::vector<std::string>& tokens, double a) {
  return weighted_mean(lex, tokens,
                       [&](const std::string& tok) { return sif_weight(freq, a, tok); });
}

UsifParams usif_params(const FrequencyModel& freq, double avg_sentence_length) {
  UsifParams p;
  p.vocab_size = freq.vocabulary_size();
  if (p.vocab_size == 0) throw std::invalid_argument("usif_params: empty frequency model");
  p.n = std::max(1L, std::lround(avg_sentence_length));
  double v = static_cast<double>(p.vocab_size);
  double threshold = 1.0 - std::pow(1.0 - 1.0 / v, static_cast<double>(p.n));
  std::size_t above = freq.count_above(threshold);
  p.alpha = static_cast<double>(above) / v;
  if (p.alpha <= 0.0) p.alpha = 1.0 / v;  // every word rare: keep a finite
  double z = 0.5 * v;
  p.a = (1.0 - p.alpha) / (p.alpha * z);
  return p;
}

double usif_weight(const FrequencyModel& freq, const UsifParams& params,
                   const std::string& token) {
  return params.a / (0.5 * params.a + freq.probability(token));
}

SentenceVector embed_usif(const VectorLexicon& lex, const FrequencyModel& freq,
                          const std::vector<std::string>& tokens, const UsifParams& params) {
  return weighted_mean(
      lex, tokens, [&](const std::string& tok) { return usif_weight(freq, params, tok); });
}

SentenceSubspace embed_subspace(const VectorLexicon& lex, const std::vector<std::string>& tokens,
                                std::size_t n_rank, const StopwordList* stopwords) {
  if (n_rank == 0) throw std::invalid_argument("subspace rank must be positive");
  std::vector<std::string> kept;
  auto vecs = resolve_tokens(lex, tokens, stopwords, &kept);
  SentenceSubspace ss;
  if (vecs.empty()) {
    ss.basis = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(lex.dim()), 0);
    ss.degenerate = true;
    return ss;
  }
  std::set<std::string> distinct(kept.begin(), kept.end());
  std::size_t r = std::min({n_rank, distinct.size(), vecs.size()});

  Eigen::MatrixXd words(static_cast<Eigen::Index>(lex.dim()),
                        static_cast<Eigen::Index>(vecs.size()));
  for (std::size_t c = 0; c < vecs.size(); ++c) {
    for (std::size_t i = 0; i < lex.dim(); ++i) {
      words(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = (*vecs[c])[i];
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(words, Eigen::ComputeThinU);
  ss.basis = svd.matrixU().leftCols(static_cast<Eigen::Index>(r));
  return ss;
}

CommonComponentModel fit_common_components(const std::vector<SentenceVector>& vectors,
                                           CommonComponentMode mode, std::size_t m) {
  if (mode == CommonComponentMode::kSif) m = 1;
  if (m == 0) throw std::invalid_argument("component count must be positive");

  std::vector<const SentenceVector*> usable;
  for (const auto& v : vectors) {
    if (!v.degenerate) usable.push_back(&v);
  }
  if (usable.size() < m) {
    throw std::runtime_error("fit_common_components: need at least " + std::to_string(m) +
                             " non-degenerate vectors, have " + std::to_string(usable.size()));
  }
  std::size_t dim = usable.front()->values.size();

  // Top right-singular directions of the stacked n x d matrix, computed via
  // the d x d Gram matrix (d is small; n can be large).
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                               static_cast<Eigen::Index>(dim));
  for (const auto* v : usable) {
    Eigen::Map<const Eigen::VectorXd> x(v->values.data(), static_cast<Eigen::Index>(dim));
    gram.noalias() += x * x.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("fit_common_components: eigendecomposition failed");
  }

  CommonComponentModel ccm;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    Eigen::Index col = static_cast<Eigen::Index>(dim - 1 - i);  // eigenvalues ascending
    double lambda = std::max(0.0, eig.eigenvalues()(col));
    double sigma = std::sqrt(lambda);
    Eigen::VectorXd c = eig.eigenvectors().col(col);
    c.normalize();
    ccm.components.emplace_back(c.data(), c.data() + c.size());
    ccm.singular_values.push_back(sigma);
    sum_sq += sigma * sigma;
  }
  if (mode == CommonComponentMode::kSif) {
    ccm.weights.assign(1, 1.0);
  } else {
    ccm.weights.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      ccm.weights[i] = sum_sq > 0.0 ? (ccm.singular_values[i] * ccm.singular_values[i]) / sum_sq
                                    : 1.0 / static_cast<double>(m);
    }
  }
  return ccm;
}

SentenceVector remove_common_components(const SentenceVector& v,
                                        const CommonComponentModel& ccm) {
  if (v.degenerate) return v;
  SentenceVector out = v;
  for (std::size_t k = 0; k < ccm.components.size(); ++k) {
    const auto& c = ccm.components[k];
    if (c.size() != v.values.size()) {
      throw std::invalid_argument("remove_common_components: dimension mismatch");
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) dot += c[i] * v.values[i];
    double scale = ccm.weights[k] * dot;
    for (std::size_t i = 0; i < c.size(); ++i) out.values[i] -= scale * c[i];
  }
  return out;
}

double cosine_similarity(const SentenceVector& u, const SentenceVector& v) {
  if (u.degenerate || v.degenerate) return 0.0;
  if (u.values.size() != v.values.size()) {
    throw std::invalid_argument("cosine_similarity: dimension mismatch");
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    dot += u.values[i] * v.values[i];
    nu += u.values[i] * u.values[i];
    nv += v.values[i] * v.values[i];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

double principal_angle_similarity(const SentenceSubspace& a, const SentenceSubspace& b) {
  if (a.degenerate || b.degenerate) return 0.0;
  if (a.basis.rows() != b.basis.rows()) {
    throw std::invalid_argument("principal_angle_similarity: ambient dimension mismatch");
  }
  Eigen::MatrixXd product = a.basis.transpose() * b.basis;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(product);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    double s = svd.singularValues()(i);
    sum += s * s;
  }
  return std::sqrt(sum);
}

double normalized_principal_angle_similarity(const SentenceSubspace& a,
                                             const SentenceSubspace& b) {
  if (a.degenerate || b.degenerate) return 0.0;
  double r = static_cast<double>(std::min(a.rank(), b.rank()));
  if (r == 0.0) return 0.0;
  return principal_angle_similarity(a, b) / std::sqrt(r);
}

std::string embed_method_name(EmbedMethod m) {
  switch (m) {
    case EmbedMethod::kAvg: return "avg";
    case EmbedMethod::kAvgNoStop: return "avg-nostop";
    case EmbedMethod::kSif: return "sif";
    case EmbedMethod::kUsif: return "usif";
    case EmbedMethod::kSubspace: return "subspace";
  }
  return "avg";
}

EmbedMethod embed_method_from_name(const std::string& name) {
  if (name == "avg") return EmbedMethod::kAvg;
  if (name == "avg-nostop") return EmbedMethod::kAvgNoStop;
  if (name == "sif") return EmbedMethod::kSif;
  if (name == "usif") return EmbedMethod::kUsif;
  if (name == "subspace") return EmbedMethod::kSubspace;
  throw std::runtime_error("unknown embedding method: " + name);
}

CorpusEmbedding embed_corpus(const EmbedConfig& cfg, const VectorLexicon& lex,
                             const FrequencyModel& freq,
                             const std::vector<std::vector<std::string>>& sentences) {
  CorpusEmbedding out;
  out.method = cfg.method;

  switch (cfg.method) {
    case EmbedMethod::kAvg:
    case EmbedMethod::kAvgNoStop: {
      const StopwordList* sw = cfg.method == EmbedMethod::kAvgNoStop ? cfg.stopwords : nullptr;
      if (cfg.method == EmbedMethod::kAvgNoStop && (!sw || sw->empty())) {
        throw std::invalid_argument("avg-nostop requires a non-empty stopword list");
      }
      out.vectors.reserve(sentences.size());
      for (const auto& sent : sentences) out.vectors.push_back(embed_average(lex, sent, sw));
      break;
    }
    case EmbedMethod::kSif: {
      out.vectors.reserve(sentences.size());
      for (const auto& sent : sentences) {
        out.vectors.push_back(embed_sif(lex, freq, sent, cfg.sif_a));
      }
      out.ccm = fit_common_components(out.vectors, CommonComponentMode::kSif, 1);
      for (auto& v : out.vectors) v = remove_common_components(v, out.ccm);
      break;
    }
    case EmbedMethod::kUsif: {
      double total_len = 0.0;
      for (const auto& sent : sentences) total_len += static_cast<double>(sent.size());
      double avg_len = sentences.empty() ? 1.0 : total_len / static_cast<double>(sentences.size());
      out.usif = usif_params(freq, avg_len);
      out.vectors.reserve(sentences.size());
      for (const auto& sent : sentences) {
        out.vectors.push_back(embed_usif(lex, freq, sent, out.usif));
      }
      out.ccm = fit_common_components(out.vectors, CommonComponentMode::kUsif, cfg.usif_m);
      for (auto& v : out.vectors) v = remove_common_components(v, out.ccm);
      break;
    }
    case EmbedMethod::kSubspace: {
      out.subspaces.reserve(sentences.size());
      for (const auto& sent : sentences) {
        out.subspaces.push_back(embed_subspace(lex, sent, cfg.subspace_rank, cfg.stopwords));
      }
      break;
    }
  }
  for (const auto& v : out.vectors) {
    if (v.degenerate) ++out.n_degenerate;
  }
  for (const auto& s : out.subspaces) {
    if (s.degenerate) ++out.n_degenerate;
  }
  return out;
}

std::unordered_map<std::string, SentenceVector> load_external_embeddings(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embeddings file: " + path);
  std::unordered_map<std::string, SentenceVector> out;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": missing tab separator");
    }
    std::string id = line.substr(0, tab);
    auto fields = split_ws(line.substr(tab + 1));
    if (fields.empty()) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": empty vector");
    }
    SentenceVector sv;
    sv.values.reserve(fields.size());
    for (const auto& f : fields) {
      char* end = nullptr;
      double v = std::strtod(f.c_str(), &end);
      if (end != f.c_str() + f.size()) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": bad number '" + f + "'");
      }
      sv.values.push_back(v);
    }
    if (dim == 0) {
      dim = sv.values.size();
    } else if (sv.values.size() != dim) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": dimension " +
                               std::to_string(sv.values.size()) + " != " + std::to_string(dim));
    }
    if (!out.emplace(id, std::move(sv)).second) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": duplicate id '" + id + "'");
    }
  }
  if (out.empty()) throw std::runtime_error("no embeddings in " + path);
  return out;
}

void export_embeddings(const std::vector<std::string>& ids,
                       const std::vector<SentenceVector>& vectors, const std::string& path) {
  if (ids.size() != vectors.size()) {
    throw std::invalid_argument("export_embeddings: ids/vectors size mismatch");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write embeddings: " + path);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out << ids[i] << '\t';
    for (std::size_t j = 0; j < vectors[i].values.size(); ++j) {
      if (j) out << ' ';
      out << format_real_9(vectors[i].values[j]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace asrsim
