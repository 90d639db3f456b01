#include "asrsim/sts_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "asrsim/util.hpp"

namespace asrsim {

namespace {

bool parse_score(const std::string& s, double* out) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (s.empty() || end != begin + s.size() || !std::isfinite(v)) return false;
  *out = v;
  return true;
}

}  // namespace

std::vector<SentencePair> load_sick(const std::string& path, std::size_t* skipped,
                                    const std::string& default_split) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open SICK file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty SICK file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_char(line, '\t');
  auto col = [&](const std::string& name) -> long {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return static_cast<long>(i);
    }
    return -1;
  };
  long c_id = col("pair_ID"), c_a = col("sentence_A"), c_b = col("sentence_B");
  long c_score = col("relatedness_score"), c_split = col("SemEval_set");
  if (c_id < 0 || c_a < 0 || c_b < 0 || c_score < 0) {
    throw std::runtime_error("SICK header missing required columns in " + path);
  }

  std::vector<SentencePair> pairs;
  std::size_t n_skipped = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_char(line, '\t');
    long needed = std::max({c_id, c_a, c_b, c_score, c_split});
    if (static_cast<long>(fields.size()) <= needed) {
      ++n_skipped;
      continue;
    }
    double score;
    if (!parse_score(fields[c_score], &score) || score < 1.0 || score > 5.0) {
      ++n_skipped;
      continue;
    }
    SentencePair p;
    p.id = trim(fields[c_id]);
    p.sentence_a = fields[c_a];
    p.sentence_b = fields[c_b];
    p.gold_score = score;
    p.split = c_split >= 0 ? to_lower(trim(fields[c_split])) : default_split;
    if (p.split.empty()) p.split = default_split;
    pairs.push_back(std::move(p));
  }
  if (skipped) *skipped = n_skipped;
  if (pairs.empty()) throw std::runtime_error("no valid pairs in " + path);
  return pairs;
}

std::vector<SentencePair> load_stsb(const std::string& path, std::size_t* skipped,
                                    const std::string& default_split) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open STS-benchmark file: " + path);
  std::vector<SentencePair> pairs;
  std::size_t n_skipped = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_char(line, '\t');
    // genre filename year index score sentence1 sentence2 [extra...]
    if (fields.size() < 7) {
      ++n_skipped;
      continue;
    }
    double score;
    if (!parse_score(fields[4], &score) || score < 0.0 || score > 5.0) {
      ++n_skipped;
      continue;
    }
    SentencePair p;
    p.id = std::to_string(line_no);
    p.sentence_a = fields[5];
    p.sentence_b = fields[6];
    p.gold_score = score;
    p.split = default_split;
    pairs.push_back(std::move(p));
  }
  if (skipped) *skipped = n_skipped;
  if (pairs.empty()) throw std::runtime_error("no valid pairs in " + path);
  return pairs;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("pearson: need at least two points");
  double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw std::runtime_error("pearson: correlation undefined for constant input");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

std::vector<std::vector<std::string>> token_lists(const std::vector<std::string>& lines) {
  std::vector<std::vector<std::string>> out;
  out.reserve(lines.size());
  for (const auto& line : lines) out.push_back(lookup_tokens(line));
  return out;
}

double method_similarity(const CorpusEmbedding& a, const CorpusEmbedding& b, std::size_t ia,
                         std::size_t ib, bool normalized_subspace, bool* degenerate) {
  if (a.method == EmbedMethod::kSubspace) {
    const auto& sa = a.subspaces[ia];
    const auto& sb = b.subspaces[ib];
    if (sa.degenerate || sb.degenerate) {
      *degenerate = true;
      return 0.0;
    }
    *degenerate = false;
    return normalized_subspace ? normalized_principal_angle_similarity(sa, sb)
                               : principal_angle_similarity(sa, sb);
  }
  const auto& va = a.vectors[ia];
  const auto& vb = b.vectors[ib];
  if (va.degenerate || vb.degenerate) {
    *degenerate = true;
    return 0.0;
  }
  *degenerate = false;
  return cosine_similarity(va, vb);
}

}  // namespace

std::vector<SweepRow> robustness_sweep(const std::vector<std::string>& lines,
                                       const SubstitutionTable& table,
                                       const VectorLexicon& lex, const SweepConfig& cfg) {
  if (cfg.methods.empty()) throw std::invalid_argument("sweep: no methods configured");
  if (cfg.wer_grid.empty()) throw std::invalid_argument("sweep: empty WER grid");

  auto original_tokens = token_lists(lines);
  FrequencyModel freq = FrequencyModel::from_sentences(original_tokens);

  std::vector<CorpusEmbedding> original_embeddings;
  original_embeddings.reserve(cfg.methods.size());
  for (EmbedMethod method : cfg.methods) {
    EmbedConfig ec{method, cfg.sif_a, cfg.subspace_rank, cfg.usif_m, cfg.stopwords};
    original_embeddings.push_back(embed_corpus(ec, lex, freq, original_tokens));
  }

  std::vector<SweepRow> rows;
  for (double wer : cfg.wer_grid) {
    // Same seed at every level: selections nest, so the curve is a
    // monotone refinement rather than independent resamples.
    std::vector<std::vector<std::string>> corrupted_tokens;
    if (wer == 0.0) {
      corrupted_tokens = original_tokens;
    } else {
      CorruptionResult cr = corrupt_corpus(lines, table, wer, cfg.seed);
      corrupted_tokens = token_lists(cr.lines);
    }
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      EmbedConfig ec{cfg.methods[mi], cfg.sif_a, cfg.subspace_rank, cfg.usif_m, cfg.stopwords};
      CorpusEmbedding corrupted = embed_corpus(ec, lex, freq, corrupted_tokens);
      double sum = 0.0;
      std::size_t used = 0, excluded = 0;
      for (std::size_t i = 0; i < lines.size(); ++i) {
        bool degenerate = false;
        double sim = method_similarity(original_embeddings[mi], corrupted, i, i,
                                       /*normalized_subspace=*/true, &degenerate);
        if (degenerate) {
          ++excluded;
          continue;
        }
        sum += sim;
        ++used;
      }
      SweepRow row;
      row.method = cfg.methods[mi];
      row.wer = wer;
      row.mean_self_similarity = used ? sum / static_cast<double>(used) : 0.0;
      row.n_sentences = used;
      row.n_excluded = excluded;
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {

std::vector<std::string> paired_lines(const std::vector<SentencePair>& pairs) {
  std::vector<std::string> lines;
  lines.reserve(pairs.size() * 2);
  for (const auto& p : pairs) {
    lines.push_back(p.sentence_a);
    lines.push_back(p.sentence_b);
  }
  return lines;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> sts_corrupted_sentences(
    const std::vector<SentencePair>& pairs, const SubstitutionTable& table, double wer,
    std::uint64_t seed) {
  std::vector<std::string> lines = paired_lines(pairs);
  if (wer > 0.0) lines = corrupt_corpus(lines, table, wer, seed).lines;
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(lines.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out.emplace_back(pairs[i].id + ":a", lines[2 * i]);
    out.emplace_back(pairs[i].id + ":b", lines[2 * i + 1]);
  }
  return out;
}

EvalResult sts_run(const std::vector<SentencePair>& pairs, const SubstitutionTable& table,
                   const VectorLexicon& lex, const StsRunConfig& cfg) {
  if (pairs.empty()) throw std::invalid_argument("sts_run: no pairs");

  std::vector<std::string> clean_lines = paired_lines(pairs);
  std::vector<std::string> eval_lines = clean_lines;
  if (cfg.wer > 0.0) {
    eval_lines = corrupt_corpus(clean_lines, table, cfg.wer, cfg.seed).lines;
  }

  bool external = cfg.external_clean != nullptr;
  std::vector<double> sims;
  std::vector<double> golds;
  std::size_t excluded = 0;

  if (external) {
    const auto* vecs = cfg.wer > 0.0 ? cfg.external_corrupted : cfg.external_clean;
    if (!vecs) {
      throw std::runtime_error("sts_run: corrupted-text external vectors required at WER > 0");
    }
    for (const auto& p : pairs) {
      auto ia = vecs->find(p.id + ":a");
      auto ib = vecs->find(p.id + ":b");
      if (ia == vecs->end() || ib == vecs->end()) {
        throw std::runtime_error("sts_run: external vectors missing for pair " + p.id);
      }
      double sim = cosine_similarity(ia->second, ib->second);
      bool degenerate = ia->second.degenerate || ib->second.degenerate;
      if (!degenerate) {
        double na = 0.0, nb = 0.0;
        for (double v : ia->second.values) na += v * v;
        for (double v : ib->second.values) nb += v * v;
        degenerate = na == 0.0 || nb == 0.0;
      }
      if (degenerate) {
        ++excluded;
        continue;
      }
      sims.push_back(sim);
      golds.push_back(p.gold_score);
    }
  } else {
    // Frequencies come from the clean evaluation text so the weighting is
    // identical across WER levels of the same run.
    FrequencyModel freq = FrequencyModel::from_sentences(token_lists(clean_lines));
    EmbedConfig ec{cfg.method, cfg.sif_a, cfg.subspace_rank, cfg.usif_m, cfg.stopwords};
    CorpusEmbedding emb = embed_corpus(ec, lex, freq, token_lists(eval_lines));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      bool degenerate = false;
      double sim = method_similarity(emb, emb, 2 * i, 2 * i + 1,
                                     /*normalized_subspace=*/false, &degenerate);
      if (degenerate) {
        ++excluded;
        continue;
      }
      sims.push_back(sim);
      golds.push_back(pairs[i].gold_score);
    }
  }

  if (excluded * 10 > pairs.size()) {
    throw std::runtime_error("sts_run: " + std::to_string(excluded) + " of " +
                             std::to_string(pairs.size()) +
                             " pairs degenerate (more than 10%)");
  }

  EvalResult result;
  result.method = external ? "external" : embed_method_name(cfg.method);
  result.wer = cfg.wer;
  result.pcc = pearson(sims, golds);
  result.n_pairs = sims.size();
  result.n_excluded_degenerate = excluded;
  result.seed = cfg.seed;
  return result;
}

}  // namespace asrsim
