#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "asrsim/corruption.hpp"
#include "test_support.hpp"

using namespace asrsim;
using testsupport::TempDir;
using testsupport::data_path;
using testsupport::write_file;

namespace {

// Table fixture shared by the corruption tests.
SubstitutionTable fixture_table(std::size_t top_n = 60, double thresh = 6.0) {
  VectorLexicon lex = load_vectors(data_path("toy_vectors.txt"));
  PronouncingLexicon dict = load_cmudict(data_path("cmudict_subset.dict"));
  FeatureTable feat = load_feature_table(data_path("hayes_features.csv"));
  std::set<std::string> vocab(lex.tokens().begin(), lex.tokens().end());
  BuildConfig cfg;
  cfg.n_semantic = top_n;
  cfg.thresh = thresh;
  cfg.workers = 2;
  return build_table(vocab, lex, dict, feat, cfg);
}

std::vector<std::string> fixture_lines() { return read_lines(data_path("fixture_corpus.txt")); }

}  // namespace

TEST_CASE("tokenize peels punctuation shells") {
  TokenizedSentence s = tokenize("A white cat.");
  REQUIRE(s.tokens.size() == 3);
  CHECK(s.tokens[0].lookup == "a");
  CHECK(s.tokens[1].lookup == "white");
  CHECK(s.tokens[2].lookup == "cat");
  CHECK(s.tokens[2].suffix == ".");
  CHECK(s.tokens[2].prefix.empty());
  CHECK(s.reconstruct() == "A white cat.");
}

TEST_CASE("tokenize handles quotes, apostrophes and digits") {
  TokenizedSentence s = tokenize("  \"Don't stop,\" said Tom-42. ");
  CHECK(s.reconstruct() == "  \"Don't stop,\" said Tom-42. ");
  REQUIRE(s.tokens.size() == 4);
  CHECK(s.tokens[0].prefix == "\"");
  CHECK(s.tokens[0].core == "Don't");
  CHECK(s.tokens[0].lookup == "don't");
  CHECK(s.tokens[1].suffix == ",\"");
  CHECK(s.tokens[3].core == "Tom-42");  // internal punctuation stays in the core
  CHECK(s.tokens[3].suffix == ".");
}

TEST_CASE("tokenize of the empty line") {
  TokenizedSentence s = tokenize("");
  CHECK(s.tokens.empty());
  CHECK(s.reconstruct().empty());
}

TEST_CASE("tokenize reconstruction is exact on random junk") {
  std::mt19937 rng(4242);
  const std::string alphabet = "abC XY.9 '\",;!?-\t()[]";
  std::uniform_int_distribution<std::size_t> len(0, 40);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  for (int trial = 0; trial < 500; ++trial) {
    std::string line;
    std::size_t n = len(rng);
    for (std::size_t i = 0; i < n; ++i) line += alphabet[pick(rng)];
    CHECK(tokenize(line).reconstruct() == line);
  }
}

TEST_CASE("eligibility marks table words only") {
  SubstitutionTable table = fixture_table();
  TokenizedSentence s = tokenize("The cat sat on a xylophone.", table);
  REQUIRE(s.tokens.size() == 6);
  CHECK(s.tokens[1].eligible == table.contains("cat"));
  CHECK_FALSE(s.tokens[5].eligible);  // not in the fixture vocabulary
}

TEST_CASE("select_positions count rule and determinism") {
  SubstitutionTable table = fixture_table();
  std::vector<TokenizedSentence> corpus;
  for (const auto& line : fixture_lines()) corpus.push_back(tokenize(line, table));

  std::size_t eligible = 0;
  for (const auto& s : corpus) {
    for (const auto& t : s.tokens) eligible += t.eligible ? 1 : 0;
  }
  REQUIRE(eligible > 50);

  CHECK(select_positions(corpus, 0.0, 42).empty());
  auto p30 = select_positions(corpus, 0.3, 42);
  CHECK(p30.size() == static_cast<std::size_t>(std::llround(0.3 * eligible)));
  auto p100 = select_positions(corpus, 1.0, 42);
  CHECK(p100.size() == eligible);

  // Same seed: identical. Different seed: different (overwhelmingly).
  auto p30_again = select_positions(corpus, 0.3, 42);
  CHECK(p30 == p30_again);
  auto p30_other = select_positions(corpus, 0.3, 43);
  CHECK(p30 != p30_other);

  // Positions are distinct and eligible.
  std::set<Position> unique(p30.begin(), p30.end());
  CHECK(unique.size() == p30.size());
  for (const auto& pos : p30) CHECK(corpus[pos.sentence].tokens[pos.token].eligible);
}

TEST_CASE("selection nests across WER levels") {
  SubstitutionTable table = fixture_table();
  std::vector<TokenizedSentence> corpus;
  for (const auto& line : fixture_lines()) corpus.push_back(tokenize(line, table));

  auto p10 = select_positions(corpus, 0.1, 42);
  auto p30 = select_positions(corpus, 0.3, 42);
  auto p50 = select_positions(corpus, 0.5, 42);
  std::set<Position> s30(p30.begin(), p30.end());
  std::set<Position> s50(p50.begin(), p50.end());
  for (const auto& pos : p10) CHECK(s30.count(pos) == 1);
  for (const auto& pos : p30) CHECK(s50.count(pos) == 1);
}

TEST_CASE("corrupt_corpus at zero WER is the identity") {
  SubstitutionTable table = fixture_table();
  auto lines = fixture_lines();
  CorruptionResult result = corrupt_corpus(lines, table, 0.0, 42);
  CHECK(result.lines == lines);
  CHECK(result.records.empty());
  CHECK(result.substituted == 0);
}

TEST_CASE("corrupt_corpus full rate replaces every eligible token") {
  SubstitutionTable table = fixture_table();
  auto lines = fixture_lines();
  CorruptionResult result = corrupt_corpus(lines, table, 1.0, 42);
  CHECK(result.substituted == result.eligible_total);
  CHECK(result.records.size() == result.eligible_total);
  CHECK(result.realized_wer_eligible == doctest::Approx(1.0));
}

TEST_CASE("corruption is deterministic and exactly counted") {
  SubstitutionTable table = fixture_table();
  auto lines = fixture_lines();
  for (double wer : {0.0, 0.1, 0.3, 0.5}) {
    CorruptionResult a = corrupt_corpus(lines, table, wer, 42);
    CorruptionResult b = corrupt_corpus(lines, table, wer, 42);
    CHECK(a.lines == b.lines);
    CHECK(a.records.size() == b.records.size());
    CHECK(a.substituted ==
          static_cast<std::size_t>(std::llround(wer * static_cast<double>(a.eligible_total))));
  }
}

TEST_CASE("every replacement is drawn from the source word's candidate set") {
  SubstitutionTable table = fixture_table();
  auto lines = fixture_lines();
  CorruptionResult result = corrupt_corpus(lines, table, 0.5, 7);
  REQUIRE_FALSE(result.records.empty());
  for (const auto& r : result.records) {
    CHECK(r.original != r.replacement);
    const CandidateSet* cs = table.find(r.original);
    REQUIRE(cs);
    bool found = false;
    for (const auto& c : cs->candidates) {
      if (c.token == r.replacement) {
        found = true;
        CHECK(r.probability == doctest::Approx(c.probability));
      }
    }
    CHECK(found);
  }
}

TEST_CASE("shared positions keep their draws across WER levels") {
  SubstitutionTable table = fixture_table();
  auto lines = fixture_lines();
  CorruptionResult r10 = corrupt_corpus(lines, table, 0.1, 42);
  CorruptionResult r30 = corrupt_corpus(lines, table, 0.3, 42);
  std::map<std::pair<std::size_t, std::size_t>, std::string> repl30;
  for (const auto& rec : r30.records) {
    repl30[{rec.sentence_index, rec.token_index}] = rec.replacement;
  }
  for (const auto& rec : r10.records) {
    auto it = repl30.find({rec.sentence_index, rec.token_index});
    REQUIRE(it != repl30.end());
    CHECK(it->second == rec.replacement);
  }
}

TEST_CASE("unselected tokens stay byte-identical; capitalization carries over") {
  SubstitutionTable table = fixture_table();
  std::vector<std::string> lines{"The cat sat.", "A dog ran."};
  CorruptionResult result = corrupt_corpus(lines, table, 1.0, 5);
  std::set<std::pair<std::size_t, std::size_t>> replaced;
  for (const auto& rec : result.records) {
    replaced.insert({rec.sentence_index, rec.token_index});
  }
  for (std::size_t si = 0; si < lines.size(); ++si) {
    TokenizedSentence orig = tokenize(lines[si], table);
    TokenizedSentence corr = tokenize(result.lines[si], table);
    REQUIRE(orig.tokens.size() == corr.tokens.size());
    for (std::size_t ti = 0; ti < orig.tokens.size(); ++ti) {
      if (!replaced.count({si, ti})) {
        CHECK(orig.tokens[ti].core == corr.tokens[ti].core);
      } else {
        CHECK(orig.tokens[ti].prefix == corr.tokens[ti].prefix);
        CHECK(orig.tokens[ti].suffix == corr.tokens[ti].suffix);
        bool orig_cap = std::isupper(static_cast<unsigned char>(orig.tokens[ti].core[0])) != 0;
        bool corr_cap = std::isupper(static_cast<unsigned char>(corr.tokens[ti].core[0])) != 0;
        CHECK(orig_cap == corr_cap);
      }
    }
  }
}

TEST_CASE("per-sentence mode applies the rate within each sentence") {
  SubstitutionTable table = fixture_table();
  auto lines = fixture_lines();
  CorruptionOptions opts;
  opts.per_sentence = true;

  std::vector<TokenizedSentence> corpus;
  for (const auto& line : lines) corpus.push_back(tokenize(line, table));
  auto selected = select_positions(corpus, 0.5, 42, opts);

  std::map<std::size_t, std::size_t> per_sentence;
  for (const auto& pos : selected) ++per_sentence[pos.sentence];
  for (std::size_t si = 0; si < corpus.size(); ++si) {
    std::size_t eligible = 0;
    for (const auto& t : corpus[si].tokens) eligible += t.eligible ? 1 : 0;
    std::size_t expected = static_cast<std::size_t>(std::llround(0.5 * eligible));
    std::size_t got = per_sentence.count(si) ? per_sentence[si] : 0;
    CHECK(got == expected);
  }

  // Nesting holds per sentence too.
  auto p20 = select_positions(corpus, 0.2, 42, opts);
  auto p60 = select_positions(corpus, 0.6, 42, opts);
  std::set<Position> s60(p60.begin(), p60.end());
  for (const auto& pos : p20) CHECK(s60.count(pos) == 1);
}
