#include "asrsim/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace asrsim {

double cosine_distance(const std::vector<double>& u, const std::vector<double>& v) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("cosine_distance: dimension mismatch");
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) {
    throw std::invalid_argument("cosine_distance: zero-norm input");
  }
  double d = 1.0 - dot / (std::sqrt(nu) * std::sqrt(nv));
  return std::clamp(d, 0.0, 2.0);
}

namespace {

struct Candidate {
  double distance;
  const std::string* token;
};

// "Worse" ordering for the bounded max-heap: larger distance first,
// then lexicographically larger token.
struct WorseFirst {
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.distance != b.distance) return a.distance < b.distance;
    return *a.token < *b.token;
  }
};

}  // namespace

NeighborScanner::NeighborScanner(const VectorLexicon& lex,
                                 const std::vector<std::string>& eligible) {
  tokens_.reserve(eligible.size());
  vectors_.reserve(eligible.size());
  norms_.reserve(eligible.size());
  for (const auto& token : eligible) {
    const std::vector<double>* v = lex.find(token);
    if (!v) throw std::runtime_error("eligible token not in lexicon: " + token);
    index_.emplace(token, tokens_.size());
    tokens_.push_back(token);
    vectors_.push_back(v);
    norms_.push_back(lex.norm(token));
  }
}

NeighborList NeighborScanner::top_n(const std::string& w, std::size_t n) const {
  if (n == 0) throw std::invalid_argument("top_n_neighbors: n must be positive");
  auto it = index_.find(w);
  if (it == index_.end()) {
    throw std::runtime_error("top_n_neighbors: source word not in eligible set: " + w);
  }
  std::size_t src = it->second;
  const std::vector<double>& wv = *vectors_[src];
  double wn = norms_[src];

  std::priority_queue<Candidate, std::vector<Candidate>, WorseFirst> heap;
  for (std::size_t k = 0; k < tokens_.size(); ++k) {
    if (k == src) continue;
    const std::vector<double>& tv = *vectors_[k];
    double dot = 0.0;
    for (std::size_t i = 0; i < wv.size(); ++i) dot += wv[i] * tv[i];
    double d = std::clamp(1.0 - dot / (wn * norms_[k]), 0.0, 2.0);
    Candidate c{d, &tokens_[k]};
    if (heap.size() < n) {
      heap.push(c);
    } else if (WorseFirst{}(c, heap.top())) {
      heap.pop();
      heap.push(c);
    }
  }

  NeighborList out;
  out.source = w;
  out.neighbors.resize(heap.size());
  for (std::size_t i = heap.size(); i-- > 0;) {
    out.neighbors[i] = Neighbor{*heap.top().token, heap.top().distance};
    heap.pop();
  }
  return out;
}

NeighborList top_n_neighbors(const VectorLexicon& lex,
                             const std::vector<std::string>& eligible,
                             const std::string& w, std::size_t n) {
  if (!lex.contains(w)) {
    throw std::runtime_error("top_n_neighbors: source word not in lexicon: " + w);
  }
  return NeighborScanner(lex, eligible).top_n(w, n);
}

}  // namespace asrsim
