#include <doctest.h>

#include <algorithm>
#include <random>

#include "asrsim/phonology.hpp"
#include "test_support.hpp"

using namespace asrsim;
using testsupport::TempDir;
using testsupport::data_path;
using testsupport::exhaustive_edit_distance;
using testsupport::write_file;

namespace {

FeatureTable two_feature_fixture(TempDir& tmp) {
  auto path = tmp.file("feat.csv");
  write_file(path, "phoneme,f1,f2\nK,-,+\nT,-,-\nZ,+,0\nQ,+,-\n");
  return load_feature_table(path);
}

}  // namespace

TEST_CASE("phoneme substitution cost") {
  TempDir tmp;
  FeatureTable table = two_feature_fixture(tmp);
  PhonemeCostModel model(table);

  CHECK(model.sub_cost("K", "K") == 0.0);
  CHECK(model.sub_cost("K", "T") == 1.0);  // rows (-,+) vs (-,-)
  CHECK(model.sub_cost("K", "T") == model.sub_cost("T", "K"));
  CHECK_THROWS(model.sub_cost("K", "XX"));

  // (+,0) vs (+,-): depends on the zero policy.
  PhonemeCostModel strict(table, IndelPolicy::kSpecifiedFeatureCount,
                          ZeroPolicy::kZeroCountsAsDifference);
  PhonemeCostModel loose(table, IndelPolicy::kSpecifiedFeatureCount,
                         ZeroPolicy::kZeroMatchesAnything);
  CHECK(strict.sub_cost("Z", "Q") == 1.0);
  CHECK(loose.sub_cost("Z", "Q") == 0.0);
}

TEST_CASE("indel cost counts specified features by default") {
  TempDir tmp;
  FeatureTable table = two_feature_fixture(tmp);
  PhonemeCostModel model(table);
  CHECK(model.indel_cost("K") == 2.0);  // both features specified
  CHECK(model.indel_cost("Z") == 1.0);  // one unspecified
  PhonemeCostModel constant(table, IndelPolicy::kConstant,
                            ZeroPolicy::kZeroCountsAsDifference, 3.5);
  CHECK(constant.indel_cost("K") == 3.5);
}

TEST_CASE("edit distance basics on the shipped feature table") {
  FeatureTable table = load_feature_table(data_path("hayes_features.csv"));
  PhonemeCostModel model(table);

  PhonemeSeq kat{"K", "AE", "T"};
  CHECK(phono_edit_distance(model, kat, kat) == 0.0);

  // Deleting the initial phoneme is the cheapest path.
  PhonemeSeq at{"AE", "T"};
  CHECK(phono_edit_distance(model, kat, at) ==
        doctest::Approx(exhaustive_edit_distance(model, kat, at)));
  CHECK(phono_edit_distance(model, kat, at) == doctest::Approx(model.indel_cost("K")));

  // Single substitution path for equal-length words.
  PhonemeSeq bat{"B", "AE", "T"};
  CHECK(phono_edit_distance(model, kat, bat) == doctest::Approx(model.sub_cost("K", "B")));
  CHECK(phono_edit_distance(model, kat, bat) ==
        doctest::Approx(exhaustive_edit_distance(model, kat, bat)));

  CHECK_THROWS(phono_edit_distance(model, PhonemeSeq{}, kat));
  CHECK_THROWS(phono_edit_distance(model, PhonemeSeq{"NOPE"}, kat));
}

TEST_CASE("DP equals exhaustive enumeration on random short sequences") {
  FeatureTable table = load_feature_table(data_path("hayes_features.csv"));
  PhonemeCostModel model(table);
  std::vector<std::string> phonemes{"K", "T", "B", "D", "AE", "IY", "S", "Z", "M", "N", "R"};
  std::mt19937 rng(123);
  std::uniform_int_distribution<std::size_t> len(1, 4);
  std::uniform_int_distribution<std::size_t> pick(0, phonemes.size() - 1);
  for (int trial = 0; trial < 300; ++trial) {
    PhonemeSeq a(len(rng)), b(len(rng));
    for (auto& p : a) p = phonemes[pick(rng)];
    for (auto& p : b) p = phonemes[pick(rng)];
    double dp = phono_edit_distance(model, a, b);
    double oracle = exhaustive_edit_distance(model, a, b);
    CHECK(dp == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("appending a shared suffix never raises the distance") {
  // Any edit script for (a,b) extends to (a+x, b+x) by matching x with
  // itself at zero cost, so d(a+x, b+x) <= d(a, b).
  FeatureTable table = load_feature_table(data_path("hayes_features.csv"));
  PhonemeCostModel model(table);
  std::vector<std::string> phonemes{"K", "T", "B", "AE", "IY", "S", "M", "N"};
  std::mt19937 rng(77);
  std::uniform_int_distribution<std::size_t> len(1, 3);
  std::uniform_int_distribution<std::size_t> pick(0, phonemes.size() - 1);
  for (int trial = 0; trial < 200; ++trial) {
    PhonemeSeq a(len(rng)), b(len(rng)), x(len(rng));
    for (auto& p : a) p = phonemes[pick(rng)];
    for (auto& p : b) p = phonemes[pick(rng)];
    for (auto& p : x) p = phonemes[pick(rng)];
    PhonemeSeq ax = a, bx = b;
    ax.insert(ax.end(), x.begin(), x.end());
    bx.insert(bx.end(), x.begin(), x.end());
    CHECK(phono_edit_distance(model, ax, bx) <=
          phono_edit_distance(model, a, b) + 1e-12);
  }
}

TEST_CASE("edit distance upper bound: delete all, insert all") {
  FeatureTable table = load_feature_table(data_path("hayes_features.csv"));
  PhonemeCostModel model(table);
  std::vector<std::string> phonemes{"K", "T", "B", "AE", "IY", "S", "M", "OW", "L"};
  std::mt19937 rng(321);
  std::uniform_int_distribution<std::size_t> len(1, 5);
  std::uniform_int_distribution<std::size_t> pick(0, phonemes.size() - 1);
  for (int trial = 0; trial < 200; ++trial) {
    PhonemeSeq a(len(rng)), b(len(rng));
    for (auto& p : a) p = phonemes[pick(rng)];
    for (auto& p : b) p = phonemes[pick(rng)];
    double bound = 0.0;
    for (const auto& p : a) bound += model.indel_cost(p);
    for (const auto& p : b) bound += model.indel_cost(p);
    CHECK(phono_edit_distance(model, a, b) <= bound + 1e-12);
  }
}

TEST_CASE("shipped feature chart prices natural classes consistently") {
  FeatureTable table = load_feature_table(data_path("hayes_features.csv"));
  PhonemeCostModel model(table);

  // Voicing pairs differ in exactly the voice feature.
  for (auto [vl, vd] : std::vector<std::pair<const char*, const char*>>{
           {"P", "B"}, {"T", "D"}, {"K", "G"}, {"F", "V"},
           {"S", "Z"}, {"SH", "ZH"}, {"CH", "JH"}, {"TH", "DH"}}) {
    CHECK(model.sub_cost(vl, vd) == 1.0);
  }
  // Tense/lax vowel pairs differ in exactly the tense feature.
  for (auto [a, b] : std::vector<std::pair<const char*, const char*>>{
           {"IY", "IH"}, {"UW", "UH"}, {"EY", "EH"}}) {
    CHECK(model.sub_cost(a, b) == 1.0);
  }
  // Homorganic nasal vs voiced stop: sonorant, nasal, delayed release.
  for (auto [n, s] : std::vector<std::pair<const char*, const char*>>{
           {"M", "B"}, {"N", "D"}, {"NG", "G"}}) {
    CHECK(model.sub_cost(n, s) == 3.0);
  }
  // Every phoneme the shipped dictionary uses is priced.
  PronouncingLexicon dict = load_cmudict(data_path("cmudict_subset.dict"));
  for (const auto& ph : dict.phoneme_inventory()) {
    CHECK(model.indel_cost(ph) > 0.0);
  }
}

TEST_CASE("word distance over pronunciation pairs") {
  PronouncingLexicon dict = load_cmudict(data_path("cmudict_subset.dict"));
  FeatureTable table = load_feature_table(data_path("hayes_features.csv"));
  PhonemeCostModel model(table);

  CHECK(word_phono_distance(model, dict, "cat", "cat") == 0.0);
  // Homophones with distinct spellings.
  CHECK(word_phono_distance(model, dict, "sea", "see") == 0.0);

  // "read" has two pronunciations; distance to "red" is the minimum pair,
  // which the R EH D variant makes exactly zero.
  const auto* read = dict.find("read");
  const auto* red = dict.find("red");
  REQUIRE(read);
  REQUIRE(red);
  REQUIRE(read->size() == 2);
  double expected = std::numeric_limits<double>::infinity();
  for (const auto& a : *read) {
    for (const auto& b : *red) {
      expected = std::min(expected, exhaustive_edit_distance(model, a, b));
    }
  }
  CHECK(expected == 0.0);
  CHECK(word_phono_distance(model, dict, "read", "red") == doctest::Approx(expected));

  CHECK_THROWS(word_phono_distance(model, dict, "cat", "notaword"));
}

TEST_CASE("word distance is symmetric on random eligible pairs") {
  PronouncingLexicon dict = load_cmudict(data_path("cmudict_subset.dict"));
  FeatureTable table = load_feature_table(data_path("hayes_features.csv"));
  PhonemeCostModel model(table);
  std::vector<std::string> words;
  for (const auto& [word, prons] : dict.entries()) words.push_back(word);
  std::sort(words.begin(), words.end());
  std::mt19937 rng(99);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::string& a = words[pick(rng)];
    const std::string& b = words[pick(rng)];
    CHECK(word_phono_distance(model, dict, a, b) ==
          doctest::Approx(word_phono_distance(model, dict, b, a)).epsilon(1e-12));
  }
}
