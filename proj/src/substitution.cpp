#include "asrsim/substitution.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "asrsim/util.hpp"

namespace asrsim {

namespace {
constexpr const char* kMagic = "#asrsim-subst-table";
constexpr const char* kVersion = "v1";
}  // namespace

std::string sigma_mode_name(SigmaMode m) {
  return m == SigmaMode::kMeanSq ? "mean_sq" : "mean_linear";
}

SigmaMode sigma_mode_from_name(const std::string& s) {
  if (s == "mean_sq") return SigmaMode::kMeanSq;
  if (s == "mean_linear") return SigmaMode::kMeanLinear;
  throw std::runtime_error("unknown sigma mode: " + s);
}

const CandidateSet* SubstitutionTable::find(const std::string& token) const {
  auto it = entries_.find(token);
  return it == entries_.end() ? nullptr : &it->second;
}

void SubstitutionTable::insert(const std::string& token, CandidateSet cs) {
  entries_[token] = std::move(cs);
}

std::optional<CandidateSet> build_candidate_set(const std::string& w,
                                                const NeighborList& nbrs,
                                                const PronouncingLexicon& plex,
                                                const PhonemeCostModel& cost, double thresh,
                                                ThreshMode thresh_mode, SigmaMode sigma_mode,
                                                double semantic_weight) {
  struct Scored {
    const Neighbor* nbr;
    double d_phono;
  };
  std::vector<Scored> scored;
  scored.reserve(nbrs.neighbors.size());
  for (const auto& nbr : nbrs.neighbors) {
    if (!plex.contains(nbr.token)) continue;  // filtered upstream; skip defensively
    scored.push_back({&nbr, word_phono_distance(cost, plex, w, nbr.token)});
  }
  if (scored.empty()) return std::nullopt;

  double cutoff = thresh;
  if (thresh_mode == ThreshMode::kQuantile) {
    // Nearest-rank quantile of the per-word neighbor distances.
    if (thresh <= 0.0 || thresh > 1.0) {
      throw std::invalid_argument("quantile threshold must lie in (0, 1]");
    }
    std::vector<double> ds;
    ds.reserve(scored.size());
    for (const auto& s : scored) ds.push_back(s.d_phono);
    std::sort(ds.begin(), ds.end());
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(thresh * static_cast<double>(ds.size())));
    if (rank == 0) rank = 1;
    cutoff = ds[rank - 1];
  }

  std::vector<Scored> kept;
  for (const auto& s : scored) {
    if (s.d_phono <= cutoff) kept.push_back(s);
  }
  if (kept.empty()) return std::nullopt;

  std::sort(kept.begin(), kept.end(), [](const Scored& a, const Scored& b) {
    if (a.d_phono != b.d_phono) return a.d_phono < b.d_phono;
    return a.nbr->token < b.nbr->token;
  });

  CandidateSet cs;
  cs.candidates.reserve(kept.size());
  std::vector<double> exponent_dist;
  exponent_dist.reserve(kept.size());
  double sum_d = 0.0;
  for (const auto& s : kept) {
    double d_used = s.d_phono + semantic_weight * s.nbr->semantic_distance;
    exponent_dist.push_back(d_used);
    sum_d += d_used;
    cs.candidates.push_back({s.nbr->token, s.d_phono, 0.0});
  }
  cs.sigma = sum_d / static_cast<double>(kept.size());

  if (cs.sigma == 0.0) {
    // All kept distances zero (e.g. only homophones): uniform PMF.
    double p = 1.0 / static_cast<double>(kept.size());
    for (auto& c : cs.candidates) c.probability = p;
    return cs;
  }

  double inv_scale = sigma_mode == SigmaMode::kMeanSq ? 1.0 / (cs.sigma * cs.sigma)
                                                      : 1.0 / cs.sigma;
  // Shift by the minimum distance before exponentiating; the common factor
  // cancels in the normalization and avoids underflow for tight clusters.
  double d_min = *std::min_element(exponent_dist.begin(), exponent_dist.end());
  double total = 0.0;
  std::vector<double> weights(exponent_dist.size());
  for (std::size_t i = 0; i < exponent_dist.size(); ++i) {
    double wgt = std::exp(-(exponent_dist[i] - d_min) * inv_scale);
    if (wgt <= 0.0) wgt = std::numeric_limits<double>::min();
    weights[i] = wgt;
    total += wgt;
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cs.candidates[i].probability = weights[i] / total;
  }
  return cs;
}

SubstitutionTable build_table(const std::set<std::string>& corpus_vocab,
                              const VectorLexicon& lex, const PronouncingLexicon& plex,
                              const FeatureTable& ftab, const BuildConfig& cfg) {
  if (cfg.n_semantic == 0) throw std::invalid_argument("n_semantic must be >= 1");
  if (cfg.shards == 0 || cfg.shard >= cfg.shards) {
    throw std::invalid_argument("invalid shard configuration");
  }

  std::vector<std::string> eligible;
  for (const auto& token : corpus_vocab) {
    if (lex.contains(token) && plex.contains(token)) eligible.push_back(token);
  }
  if (eligible.empty()) throw std::runtime_error("eligible vocabulary is empty");
  // std::set iteration is already sorted; keep the explicit invariant local.
  std::sort(eligible.begin(), eligible.end());

  std::vector<std::size_t> work;
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    if (i % cfg.shards == cfg.shard) work.push_back(i);
  }

  PhonemeCostModel cost(ftab, cfg.indel_policy, cfg.zero_policy);
  NeighborScanner scanner(lex, eligible);
  std::vector<std::optional<CandidateSet>> results(work.size());

  auto compute = [&](std::size_t k) {
    const std::string& w = eligible[work[k]];
    NeighborList nbrs = scanner.top_n(w, cfg.n_semantic);
    results[k] = build_candidate_set(w, nbrs, plex, cost, cfg.thresh, cfg.thresh_mode,
                                     cfg.sigma_mode, cfg.semantic_weight);
  };

  std::size_t n_workers = std::max<std::size_t>(1, cfg.workers);
  if (n_workers == 1 || work.size() < 2) {
    for (std::size_t k = 0; k < work.size(); ++k) compute(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t t = 0; t < n_workers; ++t) {
      pool.emplace_back([&] {
        while (true) {
          std::size_t k = next.fetch_add(1);
          if (k >= work.size()) break;
          compute(k);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  SubstitutionTable table;
  table.meta.vector_file_id = lex.file_id();
  table.meta.dict_file_id = plex.file_id();
  table.meta.features_file_id = ftab.file_id();
  table.meta.n_semantic = cfg.n_semantic;
  table.meta.phono_threshold = cfg.thresh;
  table.meta.thresh_mode = cfg.thresh_mode;
  table.meta.sigma_mode = cfg.sigma_mode;
  table.meta.semantic_weight = cfg.semantic_weight;
  table.meta.zero_policy = cfg.zero_policy == ZeroPolicy::kZeroCountsAsDifference
                               ? "difference"
                               : "match_any";
  table.meta.indel_policy = cfg.indel_policy == IndelPolicy::kSpecifiedFeatureCount
                                ? "specified_feature_count"
                                : "constant";
  table.meta.shards = cfg.shards;
  table.meta.shard = cfg.shard;

  for (std::size_t k = 0; k < work.size(); ++k) {
    if (results[k]) table.insert(eligible[work[k]], std::move(*results[k]));
  }
  return table;
}

const std::string& sample_substitute(const CandidateSet& cs, double r) {
  if (cs.candidates.empty()) throw std::invalid_argument("sample from empty candidate set");
  double cum = 0.0;
  for (const auto& c : cs.candidates) {
    cum += c.probability;
    if (cum > r) return c.token;
  }
  return cs.candidates.back().token;  // r at/above total mass (rounding)
}

namespace {

ThreshMode thresh_mode_from_name(const std::string& s) {
  if (s == "absolute") return ThreshMode::kAbsolute;
  if (s == "quantile") return ThreshMode::kQuantile;
  throw std::runtime_error("unknown threshold mode: " + s);
}

std::string thresh_mode_name(ThreshMode m) {
  return m == ThreshMode::kAbsolute ? "absolute" : "quantile";
}

double parse_real(const std::string& s, const std::string& what) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (s.empty() || end != begin + s.size()) {
    throw std::runtime_error("bad " + what + " value: '" + s + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& s, const std::string& what) {
  double v = parse_real(s, what);
  if (v < 0 || v != std::floor(v)) throw std::runtime_error("bad " + what + ": " + s);
  return static_cast<std::size_t>(v);
}

}  // namespace

void save_table(const SubstitutionTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write table: " + path);
  const TableMeta& m = table.meta;
  out << kMagic << ' ' << kVersion << '\n'
      << "vector_file_id=" << m.vector_file_id << '\n'
      << "dict_file_id=" << m.dict_file_id << '\n'
      << "features_file_id=" << m.features_file_id << '\n'
      << "n_semantic=" << m.n_semantic << '\n'
      << "phono_threshold=" << format_real_12(m.phono_threshold) << '\n'
      << "thresh_mode=" << thresh_mode_name(m.thresh_mode) << '\n'
      << "sigma_mode=" << sigma_mode_name(m.sigma_mode) << '\n'
      << "semantic_weight=" << format_real_12(m.semantic_weight) << '\n'
      << "zero_policy=" << m.zero_policy << '\n'
      << "indel_policy=" << m.indel_policy << '\n'
      << "shards=" << m.shards << '\n'
      << "shard=" << m.shard << '\n'
      << "entries=" << table.size() << '\n';
  for (const auto& [token, cs] : table.entries()) {
    out << token << '\t' << cs.size() << '\t' << format_real_12(cs.sigma);
    for (const auto& c : cs.candidates) {
      out << '\t' << c.token << '\t' << format_real_12(c.d_phono) << '\t'
          << format_real_12(c.probability);
    }
    out << '\n';
  }
  out << "#end\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

SubstitutionTable load_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open table: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty table file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    auto fields = split_ws(line);
    if (fields.size() != 2 || fields[0] != kMagic) {
      throw std::runtime_error("not a substitution table: " + path);
    }
    if (fields[1] != kVersion) {
      throw std::runtime_error("unsupported table version '" + fields[1] + "' in " + path +
                               " (expected " + kVersion + ")");
    }
  }

  SubstitutionTable table;
  std::size_t expected_entries = 0;
  bool have_entries = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("malformed table header line: '" + line + "'");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    if (key == "vector_file_id") {
      table.meta.vector_file_id = value;
    } else if (key == "dict_file_id") {
      table.meta.dict_file_id = value;
    } else if (key == "features_file_id") {
      table.meta.features_file_id = value;
    } else if (key == "n_semantic") {
      table.meta.n_semantic = parse_count(value, "n_semantic");
    } else if (key == "phono_threshold") {
      table.meta.phono_threshold = parse_real(value, "phono_threshold");
    } else if (key == "thresh_mode") {
      table.meta.thresh_mode = thresh_mode_from_name(value);
    } else if (key == "sigma_mode") {
      table.meta.sigma_mode = sigma_mode_from_name(value);
    } else if (key == "semantic_weight") {
      table.meta.semantic_weight = parse_real(value, "semantic_weight");
    } else if (key == "zero_policy") {
      table.meta.zero_policy = value;
    } else if (key == "indel_policy") {
      table.meta.indel_policy = value;
    } else if (key == "shards") {
      table.meta.shards = parse_count(value, "shards");
    } else if (key == "shard") {
      table.meta.shard = parse_count(value, "shard");
    } else if (key == "entries") {
      expected_entries = parse_count(value, "entries");
      have_entries = true;
      break;
    } else {
      throw std::runtime_error("unknown table header key: " + key);
    }
  }
  if (!have_entries) throw std::runtime_error("truncated table header in " + path);

  for (std::size_t e = 0; e < expected_entries; ++e) {
    if (!std::getline(in, line)) {
      throw std::runtime_error("truncated table: expected " + std::to_string(expected_entries) +
                               " entries, got " + std::to_string(e));
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split_char(line, '\t');
    if (fields.size() < 3) throw std::runtime_error("malformed table record: '" + line + "'");
    CandidateSet cs;
    std::string token = fields[0];
    std::size_t m = parse_count(fields[1], "candidate count");
    cs.sigma = parse_real(fields[2], "sigma");
    if (fields.size() != 3 + 3 * m || m == 0) {
      throw std::runtime_error("malformed table record for '" + token + "'");
    }
    cs.candidates.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
      Candidate c;
      c.token = fields[3 + 3 * i];
      c.d_phono = parse_real(fields[4 + 3 * i], "d_phono");
      c.probability = parse_real(fields[5 + 3 * i], "probability");
      cs.candidates.push_back(std::move(c));
    }
    if (table.contains(token)) {
      throw std::runtime_error("duplicate table entry: " + token);
    }
    table.insert(token, std::move(cs));
  }
  if (!std::getline(in, line)) throw std::runtime_error("truncated table: missing end marker");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "#end") throw std::runtime_error("corrupt table: bad end marker");
  return table;
}

SubstitutionTable merge_tables(const std::vector<SubstitutionTable>& shards) {
  if (shards.empty()) throw std::invalid_argument("no tables to merge");
  SubstitutionTable merged;
  merged.meta = shards.front().meta;
  merged.meta.shards = 1;
  merged.meta.shard = 0;
  for (const auto& t : shards) {
    const TableMeta& a = merged.meta;
    const TableMeta& b = t.meta;
    if (a.vector_file_id != b.vector_file_id || a.dict_file_id != b.dict_file_id ||
        a.features_file_id != b.features_file_id || a.n_semantic != b.n_semantic ||
        a.phono_threshold != b.phono_threshold || a.thresh_mode != b.thresh_mode ||
        a.sigma_mode != b.sigma_mode || a.semantic_weight != b.semantic_weight ||
        a.zero_policy != b.zero_policy || a.indel_policy != b.indel_policy) {
      throw std::runtime_error("cannot merge tables built with different configuration");
    }
    for (const auto& [token, cs] : t.entries()) {
      if (merged.contains(token)) throw std::runtime_error("duplicate entry across shards: " + token);
      merged.insert(token, cs);
    }
  }
  return merged;
}

}  // namespace asrsim
