#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ergopt/error.hpp"
#include "ergopt/scalar.hpp"
#include "ergopt/sft.hpp"

namespace ergopt {

/// Invariant-measure marginal on the edges of a (possibly recoded) SFT.
template <typename S>
struct EdgeFrequencyVector {
  std::vector<S> freq;

  std::size_t size() const { return freq.size(); }
  bool operator==(const EdgeFrequencyVector&) const = default;
};

template <typename S>
S total_mass(const EdgeFrequencyVector<S>& v) {
  S sum(0);
  for (const S& x : v.freq) sum += x;
  return sum;
}

/// Largest |inflow - outflow| over vertices.
template <typename S>
S flow_imbalance(const Sft& graph, const EdgeFrequencyVector<S>& v) {
  std::vector<S> net(graph.alphabet_size(), S(0));
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    net[graph.edge(e).from] -= v.freq[e];
    net[graph.edge(e).to] += v.freq[e];
  }
  S worst(0);
  for (const S& x : net) worst = std::max(worst, abs_value(x));
  return worst;
}

template <typename S>
bool is_feasible(const Sft& graph, const EdgeFrequencyVector<S>& v) {
  if (v.size() != graph.edge_count()) return false;
  for (const S& x : v.freq)
    if (x < S(0) && !is_zero<S>(x)) return false;
  return approx_equal<S>(total_mass(v), S(1)) && is_zero<S>(flow_imbalance(graph, v));
}

/// Uniform frequency on the edges traversed by a periodic vertex walk.
template <typename S>
EdgeFrequencyVector<S> uniform_cycle_vector(const Sft& graph, const Cycle& cycle) {
  EdgeFrequencyVector<S> v{std::vector<S>(graph.edge_count(), S(0))};
  const Word& w = cycle.symbols();
  const S share = S(1) / S(static_cast<long>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) {
    auto e = graph.edge_index(w[i], w[(i + 1) % w.size()]);
    if (!e) throw Error(ErrorKind::InvalidWord, "cycle uses a forbidden transition");
    v.freq[*e] += share;
  }
  return v;
}

/// Invariant measure of the periodic orbit of `period` (original symbols),
/// as an edge vector of the block presentation.
template <typename S>
EdgeFrequencyVector<S> periodic_orbit_measure(const BlockPresentation& bp, const Word& period) {
  if (period.empty()) throw Error(ErrorKind::WordTooShort, "empty period");
  Word unrolled;
  while (unrolled.size() < period.size() + bp.block_length)
    unrolled.insert(unrolled.end(), period.begin(), period.end());
  unrolled.resize(period.size() + bp.block_length);
  const auto walk = bp.lift(unrolled);
  EdgeFrequencyVector<S> v{std::vector<S>(bp.graph.edge_count(), S(0))};
  const S share = S(1) / S(static_cast<long>(period.size()));
  for (std::size_t i = 0; i + 1 < walk.size(); ++i) {
    auto e = bp.graph.edge_index(walk[i], walk[i + 1]);
    if (!e) throw Error(ErrorKind::InvalidWord, "period is not a periodic word of the SFT");
    v.freq[*e] += share;
  }
  return v;
}

template <typename S>
EdgeFrequencyVector<S> mix(const EdgeFrequencyVector<S>& a, const EdgeFrequencyVector<S>& b, const S& t) {
  EdgeFrequencyVector<S> out{std::vector<S>(a.size())};
  for (std::size_t e = 0; e < a.size(); ++e) out.freq[e] = t * a.freq[e] + (S(1) - t) * b.freq[e];
  return out;
}

/// Stationary Markov chain on the vertices of a block presentation. Only
/// edges with positive transition probability belong to the support.
template <typename S>
struct MarkovChain {
  BlockPresentation presentation;
  std::vector<S> stationary;
  std::vector<S> transition;

  const Sft& graph() const { return presentation.graph; }

  EdgeFrequencyVector<S> edge_frequencies() const {
    EdgeFrequencyVector<S> v{std::vector<S>(graph().edge_count(), S(0))};
    for (std::size_t e = 0; e < v.size(); ++e) v.freq[e] = stationary[graph().edge(e).from] * transition[e];
    return v;
  }
};

/// Transition probabilities freq(e)/outflow(source) on the support; the
/// stationary distribution is the outflow.
template <typename S>
MarkovChain<S> edge_vector_to_markov(const BlockPresentation& presentation, const EdgeFrequencyVector<S>& v) {
  const Sft& g = presentation.graph;
  if (v.size() != g.edge_count()) throw Error(ErrorKind::InvalidArgument, "edge vector size mismatch");
  MarkovChain<S> chain{presentation, std::vector<S>(g.alphabet_size(), S(0)), std::vector<S>(g.edge_count(), S(0))};
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (v.freq[e] < S(0) && !is_zero<S>(v.freq[e]))
      throw Error(ErrorKind::InvalidArgument, "negative edge frequency");
    chain.stationary[g.edge(e).from] += v.freq[e];
  }
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const S& out = chain.stationary[g.edge(e).from];
    if (out > S(0) && v.freq[e] > S(0)) chain.transition[e] = v.freq[e] / out;
  }
  return chain;
}

/// Product measure on a full shift (every symbol pair must be allowed).
template <typename S>
MarkovChain<S> bernoulli_chain(const Sft& sft, const std::vector<S>& probabilities) {
  if (probabilities.size() != sft.alphabet_size())
    throw Error(ErrorKind::InvalidArgument, "one probability per symbol required");
  EdgeFrequencyVector<S> v{std::vector<S>(sft.edge_count(), S(0))};
  for (Symbol a = 0; a < sft.alphabet_size(); ++a)
    for (Symbol b = 0; b < sft.alphabet_size(); ++b) {
      auto e = sft.edge_index(a, b);
      if (!e) throw Error(ErrorKind::InvalidArgument, "Bernoulli measure needs a full shift");
      v.freq[*e] = probabilities[a] * probabilities[b];
    }
  return edge_vector_to_markov(recode_k_blocks(sft, 1), v);
}

/// Deterministic sampler: uniform doubles built from raw mt19937_64 output
/// so streams do not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <typename S>
  std::size_t pick(std::span<const std::size_t> candidates, const std::vector<S>& weights) {
    double total = 0;
    for (std::size_t c : candidates) total += to_double(weights[c]);
    double u = uniform() * total;
    std::size_t last = candidates.size();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      double w = to_double(weights[candidates[i]]);
      if (w <= 0) continue;
      last = i;
      if (u < w) return candidates[i];
      u -= w;
    }
    if (last == candidates.size()) throw Error(ErrorKind::InvalidArgument, "no positive-weight candidate");
    return candidates[last];
  }

 private:
  std::mt19937_64 engine_;
};

/// Vertex walk with `edges` steps: starts from the stationary law (or at
/// `start` when given) and follows the chain.
template <typename S>
std::vector<Symbol> sample_walk(const MarkovChain<S>& chain, std::size_t edges, Rng& rng,
                                std::optional<Symbol> start = std::nullopt) {
  const Sft& g = chain.graph();
  std::vector<Symbol> walk;
  walk.reserve(edges + 1);
  if (start) {
    walk.push_back(*start);
  } else {
    std::vector<std::size_t> vertices(g.alphabet_size());
    for (std::size_t v = 0; v < vertices.size(); ++v) vertices[v] = v;
    walk.push_back(static_cast<Symbol>(rng.pick<S>(vertices, chain.stationary)));
  }
  for (std::size_t i = 0; i < edges; ++i) {
    std::size_t e = rng.pick<S>(g.out_edges(walk.back()), chain.transition);
    walk.push_back(g.edge(e).to);
  }
  return walk;
}

}  // namespace ergopt
