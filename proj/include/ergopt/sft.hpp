#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ergopt/error.hpp"

namespace ergopt {

using Symbol = std::uint32_t;
using Word = std::vector<Symbol>;

struct Edge {
  Symbol from;
  Symbol to;
  auto operator<=>(const Edge&) const = default;
};

class Sft;
Sft validate_sft(std::size_t alphabet_size, const std::vector<std::pair<Symbol, Symbol>>& allowed);

/// A vertex shift: symbols are vertices, allowed pairs are edges. Edges are
/// stored in lexicographic (from, to) order and that order indexes every
/// per-edge vector in the library.
class Sft {
 public:
  std::size_t alphabet_size() const { return alphabet_size_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_[e]; }

  bool allowed(Symbol a, Symbol b) const {
    return a < alphabet_size_ && b < alphabet_size_ && index_[a * alphabet_size_ + b] >= 0;
  }

  std::optional<std::size_t> edge_index(Symbol a, Symbol b) const {
    if (!allowed(a, b)) return std::nullopt;
    return static_cast<std::size_t>(index_[a * alphabet_size_ + b]);
  }

  std::span<const std::size_t> out_edges(Symbol v) const { return out_[v]; }
  std::span<const std::size_t> in_edges(Symbol v) const { return in_[v]; }

  /// Least p such that every entry of the p-th Boolean adjacency power is
  /// positive; empty when the adjacency is not primitive.
  std::optional<std::size_t> mixing_time() const { return mixing_time_; }
  bool is_mixing() const { return mixing_time_.has_value(); }

  bool operator==(const Sft& other) const {
    return alphabet_size_ == other.alphabet_size_ && edges_ == other.edges_;
  }

 private:
  friend Sft validate_sft(std::size_t, const std::vector<std::pair<Symbol, Symbol>>&);

  std::size_t alphabet_size_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::ptrdiff_t> index_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
  std::optional<std::size_t> mixing_time_;
};

namespace detail {

/// Row-bitset Boolean matrix.
class BoolMatrix {
 public:
  explicit BoolMatrix(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}

  void set(std::size_t i, std::size_t j) { bits_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64); }
  bool get(std::size_t i, std::size_t j) const {
    return (bits_[i * words_ + j / 64] >> (j % 64)) & 1U;
  }

  BoolMatrix times(const BoolMatrix& rhs) const {
    BoolMatrix out(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (!get(i, j)) continue;
        for (std::size_t w = 0; w < words_; ++w) out.bits_[i * words_ + w] |= rhs.bits_[j * words_ + w];
      }
    }
    return out;
  }

  bool all_positive() const {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (!get(i, j)) return false;
    return true;
  }

 private:
  std::size_t n_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

inline bool strongly_connected(const Sft& sft) {
  const std::size_t n = sft.alphabet_size();
  auto reach_all = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<Symbol> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      Symbol v = stack.back();
      stack.pop_back();
      auto adj = forward ? sft.out_edges(v) : sft.in_edges(v);
      for (std::size_t e : adj) {
        Symbol w = forward ? sft.edge(e).to : sft.edge(e).from;
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == n;
  };
  return reach_all(true) && reach_all(false);
}

/// Period of an irreducible graph: gcd of level differences over all edges.
inline std::size_t period(const Sft& sft) {
  const std::size_t n = sft.alphabet_size();
  std::vector<std::ptrdiff_t> level(n, -1);
  std::queue<Symbol> queue;
  level[0] = 0;
  queue.push(0);
  while (!queue.empty()) {
    Symbol v = queue.front();
    queue.pop();
    for (std::size_t e : sft.out_edges(v)) {
      Symbol w = sft.edge(e).to;
      if (level[w] < 0) {
        level[w] = level[v] + 1;
        queue.push(w);
      }
    }
  }
  std::size_t g = 0;
  for (const Edge& e : sft.edges()) {
    auto diff = level[e.from] + 1 - level[e.to];
    g = std::gcd(g, static_cast<std::size_t>(diff < 0 ? -diff : diff));
  }
  return g;
}

inline std::optional<std::size_t> compute_mixing_time(const Sft& sft) {
  if (!strongly_connected(sft) || period(sft) != 1) return std::nullopt;
  const std::size_t n = sft.alphabet_size();
  BoolMatrix adjacency(n);
  for (const Edge& e : sft.edges()) adjacency.set(e.from, e.to);
  BoolMatrix power = adjacency;
  const std::size_t wielandt = (n - 1) * (n - 1) + 1;
  for (std::size_t p = 1; p <= wielandt; ++p) {
    if (power.all_positive()) return p;
    power = power.times(adjacency);
  }
  return std::nullopt;  // unreachable for primitive matrices
}

}  // namespace detail

/// Builds an SFT from an explicit allowed-pair list. Duplicated pairs are
/// merged. Throws EmptyAlphabet or StrandedSymbol.
inline Sft validate_sft(std::size_t alphabet_size, const std::vector<std::pair<Symbol, Symbol>>& allowed) {
  if (alphabet_size == 0) throw Error(ErrorKind::EmptyAlphabet, "alphabet must contain at least one symbol");
  Sft sft;
  sft.alphabet_size_ = alphabet_size;
  sft.index_.assign(alphabet_size * alphabet_size, -1);
  for (auto [a, b] : allowed) {
    if (a >= alphabet_size || b >= alphabet_size)
      throw Error(ErrorKind::InvalidArgument,
                  "transition " + std::to_string(a) + "->" + std::to_string(b) + " outside the alphabet");
    sft.index_[a * alphabet_size + b] = 0;
  }
  for (Symbol a = 0; a < alphabet_size; ++a)
    for (Symbol b = 0; b < alphabet_size; ++b)
      if (sft.index_[a * alphabet_size + b] >= 0) {
        sft.index_[a * alphabet_size + b] = static_cast<std::ptrdiff_t>(sft.edges_.size());
        sft.edges_.push_back({a, b});
      }
  sft.out_.assign(alphabet_size, {});
  sft.in_.assign(alphabet_size, {});
  for (std::size_t e = 0; e < sft.edges_.size(); ++e) {
    sft.out_[sft.edges_[e].from].push_back(e);
    sft.in_[sft.edges_[e].to].push_back(e);
  }
  for (Symbol s = 0; s < alphabet_size; ++s)
    if (sft.out_[s].empty() || sft.in_[s].empty())
      throw Error(ErrorKind::StrandedSymbol, "symbol " + std::to_string(s) + " has no outgoing or no incoming transition");
  sft.mixing_time_ = detail::compute_mixing_time(sft);
  return sft;
}

inline Sft full_shift(std::size_t alphabet_size) {
  std::vector<std::pair<Symbol, Symbol>> pairs;
  for (Symbol a = 0; a < alphabet_size; ++a)
    for (Symbol b = 0; b < alphabet_size; ++b) pairs.emplace_back(a, b);
  return validate_sft(alphabet_size, pairs);
}

/// Two symbols, 1->1 forbidden.
inline Sft golden_mean_shift() { return validate_sft(2, {{0, 0}, {0, 1}, {1, 0}}); }

inline bool is_valid_word(const Sft& sft, std::span<const Symbol> word) {
  for (Symbol s : word)
    if (s >= sft.alphabet_size()) return false;
  for (std::size_t i = 0; i + 1 < word.size(); ++i)
    if (!sft.allowed(word[i], word[i + 1])) return false;
  return true;
}

/// Valid word whose last->first transition is also allowed.
inline bool is_periodic_word(const Sft& sft, std::span<const Symbol> word) {
  return !word.empty() && is_valid_word(sft, word) && sft.allowed(word.back(), word.front());
}

// ---------------------------------------------------------------------------
// Cycles
// ---------------------------------------------------------------------------

/// A periodic orbit, stored in its lexicographically least rotation.
class Cycle {
 public:
  explicit Cycle(Word symbols) : symbols_(canonical_rotation(std::move(symbols))) {}

  const Word& symbols() const { return symbols_; }
  std::size_t length() const { return symbols_.size(); }

  auto operator<=>(const Cycle& other) const {
    if (auto c = symbols_.size() <=> other.symbols_.size(); c != 0) return c;
    return symbols_ <=> other.symbols_;
  }
  bool operator==(const Cycle&) const = default;

  static Word canonical_rotation(Word w) {
    if (w.empty()) throw Error(ErrorKind::InvalidArgument, "a cycle needs at least one symbol");
    Word best = w;
    for (std::size_t r = 1; r < w.size(); ++r) {
      std::rotate(w.begin(), w.begin() + 1, w.end());
      if (w < best) best = w;
    }
    return best;
  }

 private:
  Word symbols_;
};

/// All simple cycles of length <= max_len in canonical rotation, ordered by
/// (length, symbols). Throws BudgetExceeded past `cap` cycles.
inline std::vector<Cycle> enumerate_simple_cycles(const Sft& sft, std::size_t max_len,
                                                  std::size_t cap = 1'000'000) {
  if (max_len == 0) throw Error(ErrorKind::InvalidArgument, "max_len must be at least 1");
  std::vector<Cycle> cycles;
  const std::size_t n = sft.alphabet_size();
  std::vector<char> on_path(n, 0);
  Word path;

  // DFS restricted to vertices > start yields each cycle once, rooted at its
  // least vertex, which for a simple cycle is also its least rotation.
  auto dfs = [&](auto&& self, Symbol start, Symbol v) -> void {
    for (std::size_t e : sft.out_edges(v)) {
      Symbol w = sft.edge(e).to;
      if (w == start) {
        if (cycles.size() >= cap)
          throw Error(ErrorKind::BudgetExceeded, "more than " + std::to_string(cap) + " simple cycles");
        cycles.emplace_back(path);
      } else if (w > start && !on_path[w] && path.size() < max_len) {
        on_path[w] = 1;
        path.push_back(w);
        self(self, start, w);
        path.pop_back();
        on_path[w] = 0;
      }
    }
  };

  for (Symbol s = 0; s < n; ++s) {
    path.assign(1, s);
    on_path[s] = 1;
    dfs(dfs, s, s);
    on_path[s] = 0;
  }
  std::sort(cycles.begin(), cycles.end());
  return cycles;
}

// ---------------------------------------------------------------------------
// Higher-block recoding
// ---------------------------------------------------------------------------

/// The k-block presentation of an SFT: vertices are allowed k-blocks in
/// lexicographic order, edges are allowed (k+1)-blocks.
struct BlockPresentation {
  std::size_t block_length = 1;
  Sft graph;
  std::vector<Word> blocks;
  std::map<Word, Symbol> block_index;

  /// Block vertex -> its first symbol in the original alphabet.
  Symbol project(Symbol vertex) const { return blocks[vertex][0]; }

  /// The (block_length + 1)-block carried by an edge of the recoded graph.
  Word edge_block(std::size_t e) const {
    Word w = blocks[graph.edge(e).from];
    w.push_back(blocks[graph.edge(e).to].back());
    return w;
  }

  Word project_walk(std::span<const Symbol> vertices) const {
    Word out;
    out.reserve(vertices.size());
    for (Symbol v : vertices) out.push_back(project(v));
    return out;
  }

  /// Lifts an original word of length >= block_length to the vertex walk of
  /// its k-blocks (length |word| - k + 1).
  std::vector<Symbol> lift(std::span<const Symbol> word) const {
    if (word.size() < block_length) throw Error(ErrorKind::WordTooShort, "word shorter than the block length");
    std::vector<Symbol> out;
    for (std::size_t i = 0; i + block_length <= word.size(); ++i) {
      Word block(word.begin() + static_cast<std::ptrdiff_t>(i),
                 word.begin() + static_cast<std::ptrdiff_t>(i + block_length));
      auto it = block_index.find(block);
      if (it == block_index.end()) throw Error(ErrorKind::InvalidWord, "word contains a forbidden block");
      out.push_back(it->second);
    }
    return out;
  }

  /// Projects a cycle of block vertices to the periodic symbol word it carries.
  Cycle project_cycle(const Cycle& vertex_cycle) const { return Cycle(project_walk(vertex_cycle.symbols())); }
};

/// Enumerates allowed words of the given length in lexicographic order.
inline std::vector<Word> allowed_words(const Sft& sft, std::size_t length) {
  std::vector<Word> out;
  if (length == 0) return out;
  Word w;
  auto extend = [&](auto&& self) -> void {
    if (w.size() == length) {
      out.push_back(w);
      return;
    }
    for (Symbol s = 0; s < sft.alphabet_size(); ++s) {
      if (!w.empty() && !sft.allowed(w.back(), s)) continue;
      w.push_back(s);
      self(self);
      w.pop_back();
    }
  };
  extend(extend);
  return out;
}

inline BlockPresentation recode_k_blocks(const Sft& sft, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "block length must be at least 1");
  BlockPresentation bp;
  bp.block_length = k;
  bp.blocks = allowed_words(sft, k);
  for (std::size_t i = 0; i < bp.blocks.size(); ++i) bp.block_index.emplace(bp.blocks[i], static_cast<Symbol>(i));
  std::vector<std::pair<Symbol, Symbol>> pairs;
  for (std::size_t i = 0; i < bp.blocks.size(); ++i) {
    Word next(bp.blocks[i].begin() + 1, bp.blocks[i].end());
    for (Symbol s = 0; s < sft.alphabet_size(); ++s) {
      if (!sft.allowed(bp.blocks[i].back(), s)) continue;
      next.push_back(s);
      pairs.emplace_back(static_cast<Symbol>(i), bp.block_index.at(next));
      next.pop_back();
    }
  }
  bp.graph = validate_sft(bp.blocks.size(), pairs);
  return bp;
}

}  // namespace ergopt
