#include "asrsim/corruption.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "asrsim/util.hpp"

namespace asrsim {

namespace {

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) || c >= 0x80;
}

bool is_space_byte(unsigned char c) { return std::isspace(c); }

Token make_token(const std::string& chunk) {
  Token t;
  std::size_t b = 0, e = chunk.size();
  while (b < e && !is_word_byte(static_cast<unsigned char>(chunk[b]))) ++b;
  while (e > b && !is_word_byte(static_cast<unsigned char>(chunk[e - 1]))) --e;
  t.prefix = chunk.substr(0, b);
  t.core = chunk.substr(b, e - b);
  t.suffix = chunk.substr(e);
  t.lookup = to_lower(t.core);
  return t;
}

}  // namespace

std::string TokenizedSentence::reconstruct() const {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out += separators[i];
    out += tokens[i].prefix;
    out += tokens[i].core;
    out += tokens[i].suffix;
  }
  out += separators.back();
  return out;
}

TokenizedSentence tokenize(const std::string& line) {
  TokenizedSentence s;
  s.raw = line;
  std::size_t i = 0;
  while (true) {
    std::size_t sep_start = i;
    while (i < line.size() && is_space_byte(static_cast<unsigned char>(line[i]))) ++i;
    std::string sep = line.substr(sep_start, i - sep_start);
    if (i >= line.size()) {
      s.separators.push_back(sep);
      break;
    }
    std::size_t tok_start = i;
    while (i < line.size() && !is_space_byte(static_cast<unsigned char>(line[i]))) ++i;
    s.separators.push_back(sep);
    s.tokens.push_back(make_token(line.substr(tok_start, i - tok_start)));
  }
  return s;
}

void mark_eligible(TokenizedSentence& sentence, const SubstitutionTable& table) {
  for (auto& t : sentence.tokens) {
    t.eligible = !t.lookup.empty() && table.contains(t.lookup);
  }
}

TokenizedSentence tokenize(const std::string& line, const SubstitutionTable& table) {
  TokenizedSentence s = tokenize(line);
  mark_eligible(s, table);
  return s;
}

std::vector<std::string> lookup_tokens(const std::string& line) {
  TokenizedSentence s = tokenize(line);
  std::vector<std::string> out;
  out.reserve(s.tokens.size());
  for (const auto& t : s.tokens) {
    if (!t.lookup.empty()) out.push_back(t.lookup);
  }
  return out;
}

namespace {

// A position together with the unit draw that decides its replacement.
struct PlannedSlot {
  Position pos;
  double u;
};

// The selection contract: one seeded shuffle of all eligible positions,
// then one unit draw per shuffled slot. Selection at any WER is a prefix
// of the shuffled order, so lower WER levels nest inside higher ones and
// a shared position always receives the same draw.
std::vector<PlannedSlot> plan_slots(const std::vector<TokenizedSentence>& corpus,
                                    std::uint64_t seed) {
  std::vector<Position> eligible;
  for (std::size_t si = 0; si < corpus.size(); ++si) {
    for (std::size_t ti = 0; ti < corpus[si].tokens.size(); ++ti) {
      if (corpus[si].tokens[ti].eligible) eligible.push_back({si, ti});
    }
  }
  SplitRng rng(seed);
  rng.shuffle(eligible);
  std::vector<PlannedSlot> slots(eligible.size());
  for (std::size_t k = 0; k < eligible.size(); ++k) {
    slots[k] = {eligible[k], rng.unit()};
  }
  return slots;
}

std::uint64_t sentence_seed(std::uint64_t seed, std::size_t sentence_index) {
  std::uint64_t idx = sentence_index;
  return fnv1a64(&idx, sizeof(idx), seed ^ 14695981039346656037ULL);
}

std::vector<PlannedSlot> plan_slots_per_sentence(const std::vector<TokenizedSentence>& corpus,
                                                 std::uint64_t seed, double wer) {
  std::vector<PlannedSlot> selected;
  for (std::size_t si = 0; si < corpus.size(); ++si) {
    std::vector<Position> eligible;
    for (std::size_t ti = 0; ti < corpus[si].tokens.size(); ++ti) {
      if (corpus[si].tokens[ti].eligible) eligible.push_back({si, ti});
    }
    if (eligible.empty()) continue;
    SplitRng rng(sentence_seed(seed, si));
    rng.shuffle(eligible);
    std::vector<double> draws(eligible.size());
    for (auto& d : draws) d = rng.unit();
    auto take = static_cast<std::size_t>(
        round_half_away(wer * static_cast<double>(eligible.size())));
    take = std::min(take, eligible.size());
    for (std::size_t k = 0; k < take; ++k) selected.push_back({eligible[k], draws[k]});
  }
  return selected;
}

std::vector<PlannedSlot> selected_slots(const std::vector<TokenizedSentence>& corpus,
                                        double wer, std::uint64_t seed,
                                        const CorruptionOptions& opts) {
  if (wer < 0.0 || wer > 1.0) throw std::invalid_argument("WER must lie in [0, 1]");
  std::vector<PlannedSlot> sel;
  if (opts.per_sentence) {
    sel = plan_slots_per_sentence(corpus, seed, wer);
  } else {
    auto slots = plan_slots(corpus, seed);
    auto take = static_cast<std::size_t>(
        round_half_away(wer * static_cast<double>(slots.size())));
    take = std::min(take, slots.size());
    sel.assign(slots.begin(), slots.begin() + take);
  }
  std::sort(sel.begin(), sel.end(),
            [](const PlannedSlot& a, const PlannedSlot& b) { return a.pos < b.pos; });
  return sel;
}

// Initial capital of the original core carries over to the replacement.
std::string match_capitalization(const std::string& original, const std::string& repl) {
  if (original.empty() || repl.empty()) return repl;
  unsigned char first = static_cast<unsigned char>(original[0]);
  if (std::isupper(first)) {
    std::string out = repl;
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
  }
  return repl;
}

}  // namespace

std::vector<Position> select_positions(const std::vector<TokenizedSentence>& corpus,
                                       double wer, std::uint64_t seed,
                                       const CorruptionOptions& opts) {
  auto slots = selected_slots(corpus, wer, seed, opts);
  std::vector<Position> out;
  out.reserve(slots.size());
  for (const auto& s : slots) out.push_back(s.pos);
  return out;
}

CorruptionResult corrupt_corpus(const std::vector<std::string>& lines,
                                const SubstitutionTable& table, double wer,
                                std::uint64_t seed, const CorruptionOptions& opts) {
  std::vector<TokenizedSentence> corpus;
  corpus.reserve(lines.size());
  CorruptionResult result;
  for (const auto& line : lines) {
    corpus.push_back(tokenize(line, table));
    result.tokens_total += corpus.back().tokens.size();
    for (const auto& t : corpus.back().tokens) {
      if (t.eligible) ++result.eligible_total;
    }
  }

  auto slots = selected_slots(corpus, wer, seed, opts);
  for (const auto& slot : slots) {
    Token& tok = corpus[slot.pos.sentence].tokens[slot.pos.token];
    const CandidateSet* cs = table.find(tok.lookup);
    if (!cs) continue;  // eligible implies present; guards a stale flag
    const std::string& repl = sample_substitute(*cs, slot.u);
    double prob = 0.0;
    for (const auto& c : cs->candidates) {
      if (c.token == repl) {
        prob = c.probability;
        break;
      }
    }
    result.records.push_back(
        {slot.pos.sentence, slot.pos.token, tok.lookup, repl, prob});
    tok.core = match_capitalization(tok.core, repl);
    tok.lookup = to_lower(tok.core);
    ++result.substituted;
  }

  result.lines.reserve(corpus.size());
  for (const auto& s : corpus) result.lines.push_back(s.reconstruct());
  result.realized_wer_eligible =
      result.eligible_total
          ? static_cast<double>(result.substituted) / static_cast<double>(result.eligible_total)
          : 0.0;
  result.realized_wer_all =
      result.tokens_total
          ? static_cast<double>(result.substituted) / static_cast<double>(result.tokens_total)
          : 0.0;
  return result;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void write_lines(const std::vector<std::string>& lines, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (const auto& line : lines) out << line << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace asrsim
