#pragma once

#include <string>
#include <vector>

#include "asrsim/resources.hpp"

namespace asrsim {

struct Neighbor {
  std::string token;
  double semantic_distance;  // cosine distance, in [0, 2]
};

// Nearest eligible words to `source`, sorted ascending by
// (distance, token) and never containing the source itself.
struct NeighborList {
  std::string source;
  std::vector<Neighbor> neighbors;
};

// 1 - u.v / (|u||v|), clamped to [0,2] against floating-point drift.
// Throws on dimension mismatch or zero-norm input.
double cosine_distance(const std::vector<double>& u, const std::vector<double>& v);

// Exact full-scan top-n among `eligible` (which must be a subset of the
// lexicon and contain w). Ties broken lexicographically so the result is
// independent of iteration order.
NeighborList top_n_neighbors(const VectorLexicon& lex,
                             const std::vector<std::string>& eligible,
                             const std::string& w, std::size_t n);

// Resolves the eligible set against the lexicon once so repeated scans by
// the table builder skip the per-pair token lookups. Immutable after
// construction; safe to share across worker threads.
class NeighborScanner {
 public:
  NeighborScanner(const VectorLexicon& lex, const std::vector<std::string>& eligible);

  NeighborList top_n(const std::string& w, std::size_t n) const;

 private:
  std::vector<std::string> tokens_;
  std::vector<const std::vector<double>*> vectors_;
  std::vector<double> norms_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace asrsim
