#include "asrsim/phonology.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace asrsim {

const std::string& PhonemeCostModel::row(const std::string& p) const {
  const std::string* r = table_->find(p);
  if (!r) throw std::runtime_error("unknown phoneme symbol: " + p);
  return *r;
}

double PhonemeCostModel::sub_cost(const std::string& p, const std::string& q) const {
  const std::string& rp = row(p);
  const std::string& rq = row(q);
  int diff = 0;
  for (std::size_t i = 0; i < rp.size(); ++i) {
    char a = rp[i], b = rq[i];
    if (a == b) continue;
    if (zero_policy_ == ZeroPolicy::kZeroMatchesAnything && (a == '0' || b == '0')) continue;
    ++diff;
  }
  return static_cast<double>(diff);
}

double PhonemeCostModel::indel_cost(const std::string& p) const {
  if (indel_policy_ == IndelPolicy::kConstant) {
    row(p);  // still validate the symbol
    return constant_indel_;
  }
  const std::string& r = row(p);
  int specified = 0;
  for (char c : r) {
    if (c != '0') ++specified;
  }
  return static_cast<double>(specified);
}

double phono_edit_distance_matrix(const PhonemeCostModel& model, const PhonemeSeq& a,
                                  const PhonemeSeq& b,
                                  std::vector<std::vector<double>>* matrix) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("phono_edit_distance: sequences must be non-empty");
  }
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<double>> dp(n + 1, std::vector<double>(m + 1, 0.0));
  for (std::size_t i = 1; i <= n; ++i) dp[i][0] = dp[i - 1][0] + model.indel_cost(a[i - 1]);
  for (std::size_t j = 1; j <= m; ++j) dp[0][j] = dp[0][j - 1] + model.indel_cost(b[j - 1]);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      double sub = dp[i - 1][j - 1] + model.sub_cost(a[i - 1], b[j - 1]);
      double del = dp[i - 1][j] + model.indel_cost(a[i - 1]);
      double ins = dp[i][j - 1] + model.indel_cost(b[j - 1]);
      dp[i][j] = std::min({sub, del, ins});
    }
  }
  double result = dp[n][m];
  if (matrix) *matrix = std::move(dp);
  return result;
}

double phono_edit_distance(const PhonemeCostModel& model, const PhonemeSeq& a,
                           const PhonemeSeq& b) {
  return phono_edit_distance_matrix(model, a, b, nullptr);
}

double word_phono_distance(const PhonemeCostModel& model, const PronouncingLexicon& lex,
                           const std::string& w1, const std::string& w2) {
  const auto* p1 = lex.find(w1);
  const auto* p2 = lex.find(w2);
  if (!p1) throw std::runtime_error("word not in pronouncing lexicon: " + w1);
  if (!p2) throw std::runtime_error("word not in pronouncing lexicon: " + w2);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : *p1) {
    for (const auto& b : *p2) {
      best = std::min(best, phono_edit_distance(model, a, b));
    }
  }
  return best;
}

}  // namespace asrsim
