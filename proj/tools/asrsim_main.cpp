// asrsim: word substitution error simulation and sentence embedding
// robustness evaluation. One binary, file-to-file subcommands:
//
//   validate     check vector/dictionary/feature-table consistency
//   subst-table  build (or merge shards of) a substitution table
//   corrupt      inject substitution errors into a corpus at a given WER
//   embed        write sentence vectors for a corpus
//   sweep        self-similarity vs WER curves
//   sts          STS benchmark correlation at a given WER
//
// Every command echoes its effective configuration to stderr as
// "key=value" lines and stamps outputs with a stable config digest.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "asrsim/corruption.hpp"
#include "asrsim/embeddings.hpp"
#include "asrsim/neighbors.hpp"
#include "asrsim/phonology.hpp"
#include "asrsim/resources.hpp"
#include "asrsim/sts_eval.hpp"
#include "asrsim/substitution.hpp"
#include "asrsim/util.hpp"

namespace {

using namespace asrsim;

// Effective configuration of one run: echoed to stderr and hashed into the
// digest carried by every output row.
class RunConfig {
 public:
  explicit RunConfig(std::string command) : command_(std::move(command)) {
    set("command", command_);
  }

  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  void set(const std::string& key, double value) { kv_[key] = format_real_12(value); }
  void set(const std::string& key, std::uint64_t value) { kv_[key] = std::to_string(value); }

  std::string digest() const {
    std::string canon;
    for (const auto& [k, v] : kv_) {
      canon += k;
      canon += '=';
      canon += v;
      canon += '\n';
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canon)));
    return hex;
  }

  void log() const {
    for (const auto& [k, v] : kv_) std::cerr << "[asrsim] " << k << "=" << v << "\n";
    std::cerr << "[asrsim] config_digest=" << digest() << "\n";
  }

 private:
  std::string command_;
  std::map<std::string, std::string> kv_;
};

std::string data_dir_default(const std::string& filename) {
  const char* dir = std::getenv("ASRSIM_DATA_DIR");
  if (!dir || !*dir) return {};
  std::string path = dir;
  if (!path.empty() && path.back() != '/') path += '/';
  return path + filename;
}

// "0:50:5" (percent, inclusive) or "0,10,30" -> fractions.
std::vector<double> parse_wer_grid(const std::string& spec) {
  std::vector<double> grid;
  if (spec.find(':') != std::string::npos) {
    auto parts = split_char(spec, ':');
    if (parts.size() != 3) throw std::runtime_error("bad --wer-grid, want start:stop:step");
    double start = std::stod(parts[0]), stop = std::stod(parts[1]), step = std::stod(parts[2]);
    if (step <= 0 || stop < start) throw std::runtime_error("bad --wer-grid range");
    for (double v = start; v <= stop + 1e-9; v += step) grid.push_back(v / 100.0);
  } else {
    for (const auto& p : split_char(spec, ',')) {
      if (trim(p).empty()) continue;
      grid.push_back(std::stod(trim(p)) / 100.0);
    }
  }
  if (grid.empty()) throw std::runtime_error("empty --wer-grid");
  for (double w : grid) {
    if (w < 0.0 || w > 1.0) throw std::runtime_error("WER grid values must be 0..100 percent");
  }
  return grid;
}

std::vector<EmbedMethod> parse_methods(const std::string& spec) {
  std::vector<EmbedMethod> methods;
  for (const auto& name : split_char(spec, ',')) {
    if (trim(name).empty()) continue;
    methods.push_back(embed_method_from_name(trim(name)));
  }
  if (methods.empty()) throw std::runtime_error("no methods given");
  return methods;
}

std::set<std::string> corpus_vocabulary(const std::vector<std::string>& corpus_files) {
  std::set<std::string> vocab;
  for (const auto& path : corpus_files) {
    for (const auto& line : read_lines(path)) {
      for (auto& tok : lookup_tokens(line)) vocab.insert(std::move(tok));
    }
  }
  return vocab;
}

struct SharedOptions {
  std::string vectors_path;
  std::string cmudict_path;
  std::string features_path;
  std::string stopwords_path;
  bool binary_features = false;
};

void print_dp_matrix(const PhonemeCostModel& cost, const PronouncingLexicon& dict,
                     const std::string& w1, const std::string& w2) {
  const auto* p1 = dict.find(to_lower(w1));
  const auto* p2 = dict.find(to_lower(w2));
  if (!p1) throw std::runtime_error("word not in dictionary: " + w1);
  if (!p2) throw std::runtime_error("word not in dictionary: " + w2);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : *p1) {
    for (const auto& b : *p2) {
      std::vector<std::vector<double>> dp;
      double d = phono_edit_distance_matrix(cost, a, b, &dp);
      best = std::min(best, d);
      std::cout << w1 << " [";
      for (std::size_t i = 0; i < a.size(); ++i) std::cout << (i ? " " : "") << a[i];
      std::cout << "]  x  " << w2 << " [";
      for (std::size_t i = 0; i < b.size(); ++i) std::cout << (i ? " " : "") << b[i];
      std::cout << "]  distance=" << format_real_12(d) << "\n";
      for (const auto& row : dp) {
        for (std::size_t j = 0; j < row.size(); ++j) {
          std::cout << (j ? "\t" : "") << format_real_12(row[j]);
        }
        std::cout << "\n";
      }
    }
  }
  std::cout << "word_distance=" << format_real_12(best) << "\n";
}

// ------------------------------------------------------------------ validate

int cmd_validate(const SharedOptions& shared) {
  RunConfig rc("validate");
  VectorLexicon lex = load_vectors(shared.vectors_path);
  PronouncingLexicon dict = load_cmudict(shared.cmudict_path);
  FeatureTable feats = load_feature_table(shared.features_path, shared.binary_features);
  rc.set("vector_file_id", lex.file_id());
  rc.set("dict_file_id", dict.file_id());
  rc.set("features_file_id", feats.file_id());
  rc.set("binary_features", std::string(shared.binary_features ? "true" : "false"));
  rc.log();

  ValidationReport report = validate_resources(lex, dict, feats);
  std::cout << report.to_string();
  const auto& st = lex.stats();
  std::cout << "vector_duplicates=" << st.duplicates << "\n"
            << "vector_malformed_lines=" << st.malformed << "\n"
            << "vector_zero_vectors=" << st.zero_vectors << "\n";
  if (report.fatal()) {
    std::cerr << "error: pronouncing dictionary uses phonemes missing from the feature table\n";
    return 3;
  }
  return 0;
}

// --------------------------------------------------------------- subst-table

struct BuildOptions {
  std::vector<std::string> corpus_files;
  std::string out_path;
  BuildConfig cfg;
  std::optional<double> thresh_quantile;
  std::vector<std::string> phono_debug;  // two words when set
  std::string zero_policy = "difference";
  std::string indel_policy = "specified_feature_count";
};

int cmd_build(const SharedOptions& shared, const BuildOptions& opt) {
  BuildConfig cfg = opt.cfg;
  if (opt.thresh_quantile) {
    cfg.thresh_mode = ThreshMode::kQuantile;
    cfg.thresh = *opt.thresh_quantile;
  }
  cfg.zero_policy = opt.zero_policy == "match_any" ? ZeroPolicy::kZeroMatchesAnything
                                                   : ZeroPolicy::kZeroCountsAsDifference;
  cfg.indel_policy = opt.indel_policy == "constant" ? IndelPolicy::kConstant
                                                    : IndelPolicy::kSpecifiedFeatureCount;

  if (!opt.phono_debug.empty()) {
    PronouncingLexicon dict = load_cmudict(shared.cmudict_path);
    FeatureTable feats = load_feature_table(shared.features_path, shared.binary_features);
    PhonemeCostModel cost(feats, cfg.indel_policy, cfg.zero_policy);
    print_dp_matrix(cost, dict, opt.phono_debug[0], opt.phono_debug[1]);
    return 0;
  }
  if (shared.vectors_path.empty() || opt.corpus_files.empty() || opt.out_path.empty()) {
    std::cerr << "error: subst-table build requires --vectors, --corpus and --out\n";
    return 2;
  }

  RunConfig rc("subst-table-build");
  VectorLexicon lex = load_vectors(shared.vectors_path);
  PronouncingLexicon dict = load_cmudict(shared.cmudict_path);
  FeatureTable feats = load_feature_table(shared.features_path, shared.binary_features);

  ValidationReport report = validate_resources(lex, dict, feats);
  if (report.fatal()) {
    std::cerr << "error: feature table is missing phonemes:";
    for (const auto& p : report.missing_phonemes) std::cerr << " " << p;
    std::cerr << "\n";
    return 3;
  }

  rc.set("vector_file_id", lex.file_id());
  rc.set("dict_file_id", dict.file_id());
  rc.set("features_file_id", feats.file_id());
  rc.set("n_semantic", cfg.n_semantic);
  rc.set("thresh", cfg.thresh);
  rc.set("thresh_mode", cfg.thresh_mode == ThreshMode::kQuantile ? "quantile" : "absolute");
  rc.set("sigma_mode", sigma_mode_name(cfg.sigma_mode));
  rc.set("semantic_weight", cfg.semantic_weight);
  rc.set("zero_policy", opt.zero_policy);
  rc.set("indel_policy", opt.indel_policy);
  rc.set("binary_features", std::string(shared.binary_features ? "true" : "false"));
  rc.set("shards", cfg.shards);
  rc.set("shard", cfg.shard);
  rc.set("out", opt.out_path);
  for (std::size_t i = 0; i < opt.corpus_files.size(); ++i) {
    rc.set("corpus_" + std::to_string(i), file_identity(opt.corpus_files[i]));
  }
  rc.log();

  std::set<std::string> vocab = corpus_vocabulary(opt.corpus_files);
  SubstitutionTable table = build_table(vocab, lex, dict, feats, cfg);
  save_table(table, opt.out_path);

  // Distribution of candidate-set sizes, the calibration aid for --thresh.
  std::map<std::size_t, std::size_t> m_histogram;
  for (const auto& [token, cs] : table.entries()) ++m_histogram[cs.size()];
  std::cerr << "[asrsim] corpus_vocabulary=" << vocab.size() << "\n";
  std::cerr << "[asrsim] table_entries=" << table.size() << "\n";
  for (const auto& [m, count] : m_histogram) {
    std::cerr << "[asrsim] candidates_m=" << m << " words=" << count << "\n";
  }
  return 0;
}

int cmd_merge(const std::vector<std::string>& inputs, const std::string& out_path) {
  std::vector<SubstitutionTable> tables;
  tables.reserve(inputs.size());
  for (const auto& path : inputs) tables.push_back(load_table(path));
  SubstitutionTable merged = merge_tables(tables);
  save_table(merged, out_path);
  std::cerr << "[asrsim] merged_entries=" << merged.size() << "\n";
  return 0;
}

// ----------------------------------------------------------------- corrupt

int cmd_corrupt(const std::string& table_path, const std::string& in_path, double wer,
                std::uint64_t seed, const std::string& out_path,
                const std::string& records_path, bool per_sentence) {
  RunConfig rc("corrupt");
  SubstitutionTable table = load_table(table_path);
  rc.set("table_file_id", file_identity(table_path));
  rc.set("corpus_file_id", file_identity(in_path));
  rc.set("wer", wer);
  rc.set("seed", seed);
  rc.set("per_sentence", std::string(per_sentence ? "true" : "false"));
  rc.set("out", out_path);
  rc.log();

  std::vector<std::string> lines = read_lines(in_path);
  CorruptionOptions opts;
  opts.per_sentence = per_sentence;
  CorruptionResult result = corrupt_corpus(lines, table, wer, seed, opts);
  write_lines(result.lines, out_path);

  if (!records_path.empty()) {
    std::ofstream rec(records_path, std::ios::binary);
    if (!rec) throw std::runtime_error("cannot write records: " + records_path);
    rec << "sentence_index\ttoken_index\toriginal\treplacement\tprobability\n";
    for (const auto& r : result.records) {
      rec << r.sentence_index << '\t' << r.token_index << '\t' << r.original << '\t'
          << r.replacement << '\t' << format_real_12(r.probability) << '\n';
    }
  }
  std::cerr << "[asrsim] tokens_total=" << result.tokens_total << "\n"
            << "[asrsim] eligible_tokens=" << result.eligible_total << "\n"
            << "[asrsim] substituted=" << result.substituted << "\n"
            << "[asrsim] realized_wer_eligible=" << format_real_9(result.realized_wer_eligible)
            << "\n"
            << "[asrsim] realized_wer_all=" << format_real_9(result.realized_wer_all) << "\n";
  return 0;
}

// ------------------------------------------------------------------- embed

int cmd_embed(const SharedOptions& shared, const std::string& method_name, double a,
              std::size_t rank, const std::string& freq_file, const std::string& in_path,
              const std::string& out_path, bool a_given) {
  RunConfig rc("embed");
  EmbedMethod method = embed_method_from_name(method_name);
  if (a_given && method != EmbedMethod::kSif) {
    std::cerr << "[asrsim] warning: --a only applies to the sif method; ignored\n";
    a = 0.001;
  }

  VectorLexicon lex = load_vectors(shared.vectors_path);
  StopwordList stopwords;
  bool have_stopwords = !shared.stopwords_path.empty();
  if (have_stopwords) stopwords = load_stopwords(shared.stopwords_path);
  if ((method == EmbedMethod::kAvgNoStop) && !have_stopwords) {
    std::cerr << "error: method avg-nostop requires --stopwords\n";
    return 2;
  }

  std::vector<std::string> lines = read_lines(in_path);
  std::vector<std::vector<std::string>> sentences;
  sentences.reserve(lines.size());
  for (const auto& line : lines) sentences.push_back(lookup_tokens(line));

  FrequencyModel freq = freq_file.empty() ? FrequencyModel::from_sentences(sentences)
                                          : FrequencyModel::from_file(freq_file);

  rc.set("vector_file_id", lex.file_id());
  rc.set("method", method_name);
  if (method == EmbedMethod::kUsif) rc.set("usif_estimator", std::string("piecewise-corpus"));
  rc.set("a", a);
  rc.set("rank", rank);
  rc.set("freq_source", freq_file.empty() ? std::string("corpus") : file_identity(freq_file));
  rc.set("corpus_file_id", file_identity(in_path));
  rc.set("out", out_path);
  if (have_stopwords) rc.set("stopwords_file_id", file_identity(shared.stopwords_path));
  rc.log();

  EmbedConfig cfg;
  cfg.method = method;
  cfg.sif_a = a;
  cfg.subspace_rank = rank;
  cfg.stopwords = have_stopwords ? &stopwords : nullptr;
  CorpusEmbedding emb = embed_corpus(cfg, lex, freq, sentences);

  if (method == EmbedMethod::kSubspace) {
    // Subspaces export one row per basis column: "<id>:<col>".
    std::vector<std::string> ids;
    std::vector<SentenceVector> vecs;
    for (std::size_t i = 0; i < emb.subspaces.size(); ++i) {
      const auto& basis = emb.subspaces[i].basis;
      for (Eigen::Index c = 0; c < basis.cols(); ++c) {
        ids.push_back(std::to_string(i) + ":" + std::to_string(c));
        SentenceVector sv;
        sv.values.assign(basis.col(c).data(), basis.col(c).data() + basis.rows());
        vecs.push_back(std::move(sv));
      }
    }
    export_embeddings(ids, vecs, out_path);
  } else {
    std::vector<std::string> ids;
    ids.reserve(emb.vectors.size());
    for (std::size_t i = 0; i < emb.vectors.size(); ++i) ids.push_back(std::to_string(i));
    export_embeddings(ids, emb.vectors, out_path);
  }
  std::cerr << "[asrsim] sentences=" << sentences.size()
            << " degenerate=" << emb.n_degenerate << "\n";
  if (method == EmbedMethod::kUsif) {
    std::cerr << "[asrsim] usif_a=" << format_real_12(emb.usif.a)
              << " usif_alpha=" << format_real_12(emb.usif.alpha) << " usif_n=" << emb.usif.n
              << " usif_vocab=" << emb.usif.vocab_size << "\n";
  }
  return 0;
}

// ------------------------------------------------------------------- sweep

int cmd_sweep(const SharedOptions& shared, const std::string& table_path,
              const std::string& corpus_path, const std::string& methods_spec,
              const std::string& grid_spec, std::uint64_t seed, double a, std::size_t rank,
              const std::string& out_path) {
  RunConfig rc("sweep");
  SubstitutionTable table = load_table(table_path);
  VectorLexicon lex = load_vectors(shared.vectors_path);
  StopwordList stopwords;
  bool have_stopwords = !shared.stopwords_path.empty();
  if (have_stopwords) stopwords = load_stopwords(shared.stopwords_path);

  SweepConfig cfg;
  cfg.methods = parse_methods(methods_spec);
  cfg.wer_grid = parse_wer_grid(grid_spec);
  cfg.seed = seed;
  cfg.sif_a = a;
  cfg.subspace_rank = rank;
  cfg.stopwords = have_stopwords ? &stopwords : nullptr;

  for (EmbedMethod m : cfg.methods) {
    if (m == EmbedMethod::kAvgNoStop && !have_stopwords) {
      std::cerr << "error: method avg-nostop requires --stopwords\n";
      return 2;
    }
  }

  rc.set("table_file_id", file_identity(table_path));
  rc.set("vector_file_id", lex.file_id());
  rc.set("corpus_file_id", file_identity(corpus_path));
  rc.set("methods", methods_spec);
  for (EmbedMethod m : cfg.methods) {
    if (m == EmbedMethod::kUsif) rc.set("usif_estimator", std::string("piecewise-corpus"));
  }
  rc.set("wer_grid", grid_spec);
  rc.set("seed", seed);
  rc.set("a", a);
  rc.set("rank", rank);
  rc.set("out", out_path);
  if (have_stopwords) rc.set("stopwords_file_id", file_identity(shared.stopwords_path));
  rc.log();

  std::vector<std::string> lines = read_lines(corpus_path);
  std::vector<SweepRow> rows = robustness_sweep(lines, table, lex, cfg);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write: " + out_path);
  out << "method,wer,mean_self_similarity,n_sentences,n_excluded,seed,config_digest\n";
  for (const auto& row : rows) {
    out << embed_method_name(row.method) << ',' << format_real_12(row.wer) << ','
        << format_real_12(row.mean_self_similarity) << ',' << row.n_sentences << ','
        << row.n_excluded << ',' << seed << ',' << rc.digest() << '\n';
  }
  return 0;
}

// --------------------------------------------------------------------- sts

struct StsOptions {
  std::string dataset;
  std::vector<std::string> files;
  std::string table_path;
  std::string method_name = "avg";
  std::vector<double> wers;
  std::uint64_t seed = 42;
  std::size_t repeats = 1;
  double a = 0.001;
  std::size_t rank = 4;
  std::string out_path;
  std::string external_vecs;
  std::string external_vecs_corrupted;
  std::string dump_corrupted;
};

std::string split_label(const std::string& path) {
  std::string base = path;
  auto slash = base.find_last_of("/\\");
  if (slash != std::string::npos) base = base.substr(slash + 1);
  auto dot = base.find_last_of('.');
  if (dot != std::string::npos && dot > 0) base = base.substr(0, dot);
  return base;
}

int cmd_sts(const SharedOptions& shared, const StsOptions& opt) {
  RunConfig rc("sts");
  bool external = !opt.external_vecs.empty();

  SubstitutionTable table = load_table(opt.table_path);
  VectorLexicon lex;
  StopwordList stopwords;
  bool have_stopwords = false;
  if (!external) {
    if (shared.vectors_path.empty()) {
      std::cerr << "error: sts requires --vectors (or --external-vecs)\n";
      return 2;
    }
    lex = load_vectors(shared.vectors_path);
    have_stopwords = !shared.stopwords_path.empty();
    if (have_stopwords) stopwords = load_stopwords(shared.stopwords_path);
  }

  // Pairs per split, plus the pooled view that matches the headline numbers.
  std::map<std::string, std::vector<SentencePair>> by_split;
  std::vector<SentencePair> pooled;
  std::size_t skipped_total = 0;
  for (const auto& path : opt.files) {
    std::size_t skipped = 0;
    std::vector<SentencePair> pairs =
        opt.dataset == "sick" ? load_sick(path, &skipped, split_label(path))
                              : load_stsb(path, &skipped, split_label(path));
    skipped_total += skipped;
    for (auto& p : pairs) {
      by_split[p.split].push_back(p);
      pooled.push_back(std::move(p));
    }
  }
  if (by_split.size() > 1) by_split["pooled"] = pooled;

  rc.set("dataset", opt.dataset);
  rc.set("table_file_id", file_identity(opt.table_path));
  if (!external) rc.set("vector_file_id", lex.file_id());
  rc.set("method", external ? std::string("external") : opt.method_name);
  if (opt.method_name == "usif" && !external) {
    rc.set("usif_estimator", std::string("piecewise-corpus"));
  }
  rc.set("seed", opt.seed);
  rc.set("repeats", opt.repeats);
  rc.set("a", opt.a);
  rc.set("rank", opt.rank);
  rc.set("out", opt.out_path);
  for (std::size_t i = 0; i < opt.files.size(); ++i) {
    rc.set("file_" + std::to_string(i), file_identity(opt.files[i]));
  }
  {
    std::string wer_list;
    for (double w : opt.wers) {
      if (!wer_list.empty()) wer_list += ",";
      wer_list += format_real_12(w);
    }
    rc.set("wer", wer_list);
  }
  if (external) {
    rc.set("external_vecs", file_identity(opt.external_vecs));
    if (!opt.external_vecs_corrupted.empty()) {
      rc.set("external_vecs_corrupted", file_identity(opt.external_vecs_corrupted));
    }
  }
  rc.log();
  if (skipped_total) std::cerr << "[asrsim] skipped_rows=" << skipped_total << "\n";

  if (!opt.dump_corrupted.empty()) {
    double wer = opt.wers.empty() ? 0.0 : opt.wers.front();
    std::ofstream dump(opt.dump_corrupted, std::ios::binary);
    if (!dump) throw std::runtime_error("cannot write: " + opt.dump_corrupted);
    for (const auto& [id, text] : sts_corrupted_sentences(pooled, table, wer, opt.seed)) {
      dump << id << '\t' << text << '\n';
    }
    std::cerr << "[asrsim] dumped_sentences=" << 2 * pooled.size() << " wer="
              << format_real_12(wer) << "\n";
    if (opt.out_path.empty()) return 0;
  }

  std::unordered_map<std::string, SentenceVector> ext_clean, ext_corr;
  if (external) {
    ext_clean = load_external_embeddings(opt.external_vecs);
    if (!opt.external_vecs_corrupted.empty()) {
      ext_corr = load_external_embeddings(opt.external_vecs_corrupted);
    }
  }

  std::ofstream out(opt.out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write: " + opt.out_path);
  out << "method,dataset,split,wer,pcc,pcc_x100,pcc_ratio_vs_0,n_pairs,n_excluded,"
         "repeats,pcc_sd,seed,config_digest\n";

  for (const auto& [split, pairs] : by_split) {
    std::map<double, double> mean_pcc_by_wer;
    struct RowData {
      EvalResult result;
      double sd;
      std::size_t repeats;
    };
    std::vector<RowData> rows;
    for (double wer : opt.wers) {
      StsRunConfig cfg;
      cfg.method = external ? EmbedMethod::kAvg : embed_method_from_name(opt.method_name);
      cfg.wer = wer;
      cfg.seed = opt.seed;
      cfg.sif_a = opt.a;
      cfg.subspace_rank = opt.rank;
      cfg.stopwords = have_stopwords ? &stopwords : nullptr;
      if (external) {
        cfg.external_clean = &ext_clean;
        cfg.external_corrupted = ext_corr.empty() ? nullptr : &ext_corr;
      }
      std::size_t repeats = wer > 0.0 ? opt.repeats : 1;
      std::vector<double> pccs;
      EvalResult first;
      for (std::size_t r = 0; r < repeats; ++r) {
        cfg.seed = opt.seed + r;
        EvalResult res = sts_run(pairs, table, lex, cfg);
        if (r == 0) first = res;
        pccs.push_back(res.pcc);
      }
      double mean = 0.0;
      for (double p : pccs) mean += p;
      mean /= static_cast<double>(pccs.size());
      double var = 0.0;
      for (double p : pccs) var += (p - mean) * (p - mean);
      double sd = pccs.size() > 1 ? std::sqrt(var / static_cast<double>(pccs.size() - 1)) : 0.0;
      first.pcc = mean;
      first.dataset = opt.dataset;
      first.split = split;
      first.seed = opt.seed;
      first.config_digest = rc.digest();
      mean_pcc_by_wer[wer] = mean;
      rows.push_back({first, sd, repeats});
    }
    for (const auto& row : rows) {
      const EvalResult& r = row.result;
      out << r.method << ',' << r.dataset << ',' << r.split << ',' << format_real_12(r.wer)
          << ',' << format_real_12(r.pcc) << ',' << format_real_12(100.0 * r.pcc) << ',';
      auto zero = mean_pcc_by_wer.find(0.0);
      if (r.wer > 0.0 && zero != mean_pcc_by_wer.end() && zero->second != 0.0) {
        out << format_real_12(r.pcc / zero->second);
      }
      out << ',' << r.n_pairs << ',' << r.n_excluded_degenerate << ',' << row.repeats << ','
          << format_real_12(row.sd) << ',' << r.seed << ',' << r.config_digest << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"word substitution error simulator and sentence embedding benchmark"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI file (flags win)");
  app.fallthrough(false);

  SharedOptions shared;
  shared.features_path = data_dir_default("hayes_features.csv");
  shared.stopwords_path = data_dir_default("stopwords.txt");

  // validate
  auto* validate = app.add_subcommand("validate", "cross-check the three lexical resources");
  validate->add_option("--vectors", shared.vectors_path, "word vector text file")->required();
  validate->add_option("--cmudict", shared.cmudict_path, "pronouncing dictionary")->required();
  auto* vfeat = validate->add_option("--features", shared.features_path, "feature-table CSV");
  validate->add_flag("--binary-features", shared.binary_features,
                     "fold unspecified feature values to '-' at load");

  // subst-table
  auto* subst = app.add_subcommand("subst-table", "substitution table operations");
  subst->require_subcommand(1);
  auto* build = subst->add_subcommand("build", "build a table from resources and corpora");
  BuildOptions bopt;
  build->add_option("--vectors", shared.vectors_path, "word vector text file");
  build->add_option("--cmudict", shared.cmudict_path, "pronouncing dictionary")->required();
  auto* bfeat = build->add_option("--features", shared.features_path, "feature-table CSV");
  build->add_flag("--binary-features", shared.binary_features,
                  "fold unspecified feature values to '-' at load");
  build->add_option("--corpus", bopt.corpus_files, "corpus file(s), one sentence per line");
  build->add_option("--top-n", bopt.cfg.n_semantic, "semantic neighborhood size")
      ->default_val(1000);
  build->add_option("--thresh", bopt.cfg.thresh, "phonological distance threshold")
      ->default_val(6.0);
  double thresh_quantile = 0.0;
  auto* tq = build->add_option("--thresh-quantile", thresh_quantile,
                               "use the per-word q-quantile of neighbor distances instead");
  std::string sigma_mode = "mean_sq";
  build->add_option("--sigma-mode", sigma_mode, "mean_sq | mean_linear")
      ->check(CLI::IsMember({"mean_sq", "mean_linear"}));
  build->add_option("--semantic-weight", bopt.cfg.semantic_weight,
                    "combined-distance hook: exponent uses d_phono + w * d_semantic")
      ->default_val(0.0);
  build->add_option("--zero-policy", bopt.zero_policy, "difference | match_any")
      ->check(CLI::IsMember({"difference", "match_any"}));
  build->add_option("--indel-policy", bopt.indel_policy, "specified_feature_count | constant")
      ->check(CLI::IsMember({"specified_feature_count", "constant"}));
  build->add_option("--out", bopt.out_path, "output table path");
  build->add_option("--workers", bopt.cfg.workers, "worker threads")
      ->default_val(std::max(1u, std::thread::hardware_concurrency()));
  build->add_option("--shards", bopt.cfg.shards, "total shard count")->default_val(1);
  build->add_option("--shard", bopt.cfg.shard, "shard index to build")->default_val(0);
  build->add_option("--phono-debug", bopt.phono_debug,
                    "print the edit-distance DP matrix for two words and exit")
      ->expected(2);

  auto* merge = subst->add_subcommand("merge", "merge shard tables");
  std::vector<std::string> merge_inputs;
  std::string merge_out;
  merge->add_option("--out", merge_out, "merged table path")->required();
  merge->add_option("inputs", merge_inputs, "shard tables")->required()->expected(-1);

  // corrupt
  auto* corrupt = app.add_subcommand("corrupt", "inject substitution errors at a target WER");
  std::string c_table, c_in, c_out, c_records;
  double c_wer = 0.0;
  std::uint64_t c_seed = 42;
  bool c_per_sentence = false;
  corrupt->add_option("--table", c_table, "substitution table")->required();
  corrupt->add_option("--in", c_in, "input corpus, one sentence per line")->required();
  corrupt->add_option("--wer", c_wer, "word error rate in [0,1]")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  corrupt->add_option("--seed", c_seed, "random seed")->default_val(42);
  corrupt->add_option("--out", c_out, "corrupted corpus path")->required();
  corrupt->add_option("--records", c_records, "substitution audit TSV");
  corrupt->add_flag("--per-sentence", c_per_sentence, "apply the WER per sentence");

  // embed
  auto* embed = app.add_subcommand("embed", "write sentence vectors for a corpus");
  std::string e_method = "avg", e_freq_file, e_in, e_out;
  double e_a = 0.001;
  std::size_t e_rank = 4;
  embed->add_option("--method", e_method, "avg | avg-nostop | sif | usif | subspace")
      ->required()
      ->check(CLI::IsMember({"avg", "avg-nostop", "sif", "usif", "subspace"}));
  embed->add_option("--vectors", shared.vectors_path, "word vector text file")->required();
  auto* esw = embed->add_option("--stopwords", shared.stopwords_path, "stopword list");
  auto* ea = embed->add_option("--a", e_a, "SIF weight parameter");
  embed->add_option("--rank", e_rank, "subspace rank")->default_val(4);
  embed->add_option("--freq-file", e_freq_file, "external 'token count' file for p(w)");
  embed->add_option("--in", e_in, "corpus file")->required();
  embed->add_option("--out", e_out, "output TSV")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "self-similarity vs WER robustness sweep");
  std::string sw_table, sw_corpus, sw_methods = "avg,avg-nostop,sif,usif,subspace";
  std::string sw_grid = "0:50:5", sw_out;
  std::uint64_t sw_seed = 42;
  double sw_a = 0.001;
  std::size_t sw_rank = 4;
  sweep->add_option("--table", sw_table, "substitution table")->required();
  sweep->add_option("--vectors", shared.vectors_path, "word vector text file")->required();
  sweep->add_option("--corpus", sw_corpus, "corpus file")->required();
  sweep->add_option("--methods", sw_methods, "comma-separated method list");
  sweep->add_option("--wer-grid", sw_grid, "start:stop:step in percent, or comma list");
  sweep->add_option("--seed", sw_seed, "random seed")->default_val(42);
  auto* swsw = sweep->add_option("--stopwords", shared.stopwords_path, "stopword list");
  sweep->add_option("--a", sw_a, "SIF weight parameter")->default_val(0.001);
  sweep->add_option("--rank", sw_rank, "subspace rank")->default_val(4);
  sweep->add_option("--out", sw_out, "output CSV")->required();

  // sts
  auto* sts = app.add_subcommand("sts", "STS correlation at one or more WER levels");
  StsOptions sopt;
  std::vector<double> sts_wers;
  sts->add_option("--dataset", sopt.dataset, "sick | stsb")
      ->required()
      ->check(CLI::IsMember({"sick", "stsb"}));
  sts->add_option("--file", sopt.files, "dataset file(s); each file is a split")->required();
  sts->add_option("--table", sopt.table_path, "substitution table")->required();
  sts->add_option("--vectors", shared.vectors_path, "word vector text file");
  sts->add_option("--method", sopt.method_name, "avg | avg-nostop | sif | usif | subspace")
      ->check(CLI::IsMember({"avg", "avg-nostop", "sif", "usif", "subspace"}));
  sts->add_option("--wer", sts_wers, "word error rate(s) in [0,1]")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  sts->add_option("--seed", sopt.seed, "random seed")->default_val(42);
  sts->add_option("--repeats", sopt.repeats, "corruption repeats (mean and sd reported)")
      ->default_val(1);
  auto* stsw = sts->add_option("--stopwords", shared.stopwords_path, "stopword list");
  auto* sa = sts->add_option("--a", sopt.a, "SIF weight parameter");
  sts->add_option("--rank", sopt.rank, "subspace rank")->default_val(4);
  sts->add_option("--out", sopt.out_path, "output CSV");
  sts->add_option("--external-vecs", sopt.external_vecs,
                  "precomputed clean-sentence vectors (TSV)");
  sts->add_option("--external-vecs-corrupted", sopt.external_vecs_corrupted,
                  "precomputed corrupted-sentence vectors (TSV)");
  sts->add_option("--dump-corrupted", sopt.dump_corrupted,
                  "write the evaluated sentences as 'id<TAB>text' and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*validate) {
      if (vfeat->count() == 0 && shared.features_path.empty()) {
        std::cerr << "error: --features required (or set ASRSIM_DATA_DIR)\n";
        return 2;
      }
      return cmd_validate(shared);
    }
    if (*subst) {
      if (*build) {
        if (bfeat->count() == 0 && shared.features_path.empty()) {
          std::cerr << "error: --features required (or set ASRSIM_DATA_DIR)\n";
          return 2;
        }
        if (tq->count() > 0) bopt.thresh_quantile = thresh_quantile;
        bopt.cfg.sigma_mode = sigma_mode_from_name(sigma_mode);
        return cmd_build(shared, bopt);
      }
      if (*merge) return cmd_merge(merge_inputs, merge_out);
    }
    if (*corrupt) {
      return cmd_corrupt(c_table, c_in, c_wer, c_seed, c_out, c_records, c_per_sentence);
    }
    if (*embed) {
      if (esw->count() == 0) shared.stopwords_path = data_dir_default("stopwords.txt");
      return cmd_embed(shared, e_method, e_a, e_rank, e_freq_file, e_in, e_out,
                       ea->count() > 0);
    }
    if (*sweep) {
      if (swsw->count() == 0) shared.stopwords_path = data_dir_default("stopwords.txt");
      return cmd_sweep(shared, sw_table, sw_corpus, sw_methods, sw_grid, sw_seed, sw_a,
                       sw_rank, sw_out);
    }
    if (*sts) {
      if (stsw->count() == 0) shared.stopwords_path = data_dir_default("stopwords.txt");
      sopt.wers = sts_wers;
      if (sa->count() > 0 && sopt.method_name != "sif") {
        std::cerr << "[asrsim] warning: --a only applies to the sif method; ignored\n";
        sopt.a = 0.001;
      }
      if (sopt.out_path.empty() && sopt.dump_corrupted.empty()) {
        std::cerr << "error: sts requires --out (or --dump-corrupted)\n";
        return 2;
      }
      return cmd_sts(shared, sopt);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
