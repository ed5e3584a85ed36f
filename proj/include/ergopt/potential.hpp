#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ergopt/error.hpp"
#include "ergopt/markov.hpp"
#include "ergopt/scalar.hpp"
#include "ergopt/sft.hpp"

namespace ergopt {

// ---------------------------------------------------------------------------
// Locally constant potentials
// ---------------------------------------------------------------------------

/// f(x) = weight of the block x_0 ... x_{k-1}; the sequence f_n = S_n f is
/// additive, so it is its own approximant with zero error.
template <typename S>
class LocallyConstantPotential {
 public:
  LocallyConstantPotential() = default;

  static LocallyConstantPotential from_block_weights(const Sft& sft, std::size_t range,
                                                     const std::map<Word, S>& table) {
    if (range == 0) throw Error(ErrorKind::InvalidArgument, "potential range must be at least 1");
    LocallyConstantPotential f;
    f.range_ = range;
    f.alphabet_size_ = sft.alphabet_size();
    f.blocks_ = allowed_words(sft, range);
    for (const auto& [block, w] : table) {
      if (!std::binary_search(f.blocks_.begin(), f.blocks_.end(), block))
        throw Error(ErrorKind::IncompleteTable, "weight given for a block that is not allowed");
    }
    f.weights_.reserve(f.blocks_.size());
    for (const Word& block : f.blocks_) {
      auto it = table.find(block);
      if (it == table.end()) throw Error(ErrorKind::IncompleteTable, "no weight for an allowed block");
      f.weights_.push_back(it->second);
    }
    return f;
  }

  static LocallyConstantPotential from_symbol_weights(const Sft& sft, const std::vector<S>& weights) {
    if (weights.size() != sft.alphabet_size())
      throw Error(ErrorKind::IncompleteTable, "one weight per symbol required");
    std::map<Word, S> table;
    for (Symbol s = 0; s < weights.size(); ++s) table.emplace(Word{s}, weights[s]);
    return from_block_weights(sft, 1, table);
  }

  static LocallyConstantPotential constant(const Sft& sft, const S& c) {
    return from_symbol_weights(sft, std::vector<S>(sft.alphabet_size(), c));
  }

  /// Indicator of a single symbol.
  static LocallyConstantPotential indicator(const Sft& sft, Symbol s) {
    std::vector<S> w(sft.alphabet_size(), S(0));
    w.at(s) = S(1);
    return from_symbol_weights(sft, w);
  }

  std::size_t range() const { return range_; }
  std::size_t alphabet_size() const { return alphabet_size_; }
  const std::vector<Word>& blocks() const { return blocks_; }
  const std::vector<S>& weights() const { return weights_; }

  /// Weight of the block formed by the first `range()` symbols.
  const S& weight(std::span<const Symbol> word) const {
    if (word.size() < range_) throw Error(ErrorKind::WordTooShort, "block shorter than potential range");
    Word key(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(range_));
    auto it = std::lower_bound(blocks_.begin(), blocks_.end(), key);
    if (it == blocks_.end() || *it != key) throw Error(ErrorKind::InvalidWord, "block is not allowed");
    return weights_[static_cast<std::size_t>(it - blocks_.begin())];
  }

  /// Same function viewed as a range-`k` potential (k >= range()).
  LocallyConstantPotential with_range(const Sft& sft, std::size_t k) const {
    if (k < range_) throw Error(ErrorKind::InvalidArgument, "cannot shrink a potential's range");
    std::map<Word, S> table;
    for (const Word& block : allowed_words(sft, k)) table.emplace(block, weight(block));
    return from_block_weights(sft, k, table);
  }

  template <typename T>
  LocallyConstantPotential<T> cast() const {
    LocallyConstantPotential<T> out;
    out.range_ = range_;
    out.alphabet_size_ = alphabet_size_;
    out.blocks_ = blocks_;
    for (const S& w : weights_) {
      if constexpr (std::is_same_v<S, T>) out.weights_.push_back(w);
      else out.weights_.push_back(static_cast<T>(to_double(w)));
    }
    return out;
  }

  LocallyConstantPotential scaled(const S& c) const {
    LocallyConstantPotential out = *this;
    for (S& w : out.weights_) w *= c;
    return out;
  }

  S min_weight() const { return *std::min_element(weights_.begin(), weights_.end()); }
  S max_weight() const { return *std::max_element(weights_.begin(), weights_.end()); }
  S max_abs_weight() const {
    S best(0);
    for (const S& w : weights_) best = std::max(best, abs_value(w));
    return best;
  }

  /// Weight carried by each edge of a block presentation of level r >= range-1.
  std::vector<S> edge_weights(const BlockPresentation& bp) const {
    if (bp.block_length + 1 < range_)
      throw Error(ErrorKind::InvalidArgument, "block presentation too coarse for the potential range");
    std::vector<S> out;
    out.reserve(bp.graph.edge_count());
    for (std::size_t e = 0; e < bp.graph.edge_count(); ++e) out.push_back(weight(bp.edge_block(e)));
    return out;
  }

 private:
  template <typename>
  friend class LocallyConstantPotential;

  std::size_t range_ = 1;
  std::size_t alphabet_size_ = 0;
  std::vector<Word> blocks_;
  std::vector<S> weights_;
};

/// Pointwise a*f + b*g, at the larger of the two ranges.
template <typename S>
LocallyConstantPotential<S> combine(const Sft& sft, const S& a, const LocallyConstantPotential<S>& f, const S& b,
                                    const LocallyConstantPotential<S>& g) {
  const std::size_t k = std::max(f.range(), g.range());
  std::map<Word, S> table;
  for (const Word& block : allowed_words(sft, k)) table.emplace(block, a * f.weight(block) + b * g.weight(block));
  return LocallyConstantPotential<S>::from_block_weights(sft, k, table);
}

/// S_n f on the periodic point generated by `word` (n = |word|).
template <typename S>
S birkhoff_sum(const LocallyConstantPotential<S>& f, std::span<const Symbol> word) {
  const std::size_t n = word.size();
  if (n < f.range()) throw Error(ErrorKind::WordTooShort, "word shorter than potential range");
  S sum(0);
  Word block(f.range());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < f.range(); ++j) block[j] = word[(i + j) % n];
    sum += f.weight(block);
  }
  return sum;
}

/// Running sums S_1 f, ..., S_m f along a finite word, m = |word| - range + 1.
template <typename S>
std::vector<S> prefix_birkhoff_sums(const LocallyConstantPotential<S>& f, std::span<const Symbol> word) {
  if (word.size() < f.range()) throw Error(ErrorKind::WordTooShort, "word shorter than potential range");
  std::vector<S> out;
  out.reserve(word.size() - f.range() + 1);
  S sum(0);
  for (std::size_t i = 0; i + f.range() <= word.size(); ++i) {
    sum += f.weight(word.subspan(i, f.range()));
    out.push_back(sum);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Matrix cocycles
// ---------------------------------------------------------------------------

/// f_n(x) = log || A(x_{n-1}) ... A(x_0) || (spectral norm).
class CocyclePotential {
 public:
  explicit CocyclePotential(std::vector<Eigen::MatrixXd> matrices) : matrices_(std::move(matrices)) {
    if (matrices_.empty()) throw Error(ErrorKind::InvalidArgument, "cocycle needs one matrix per symbol");
    const auto d = matrices_.front().rows();
    for (const auto& a : matrices_) {
      if (a.rows() != d || a.cols() != d || d == 0)
        throw Error(ErrorKind::InvalidArgument, "cocycle matrices must be square and of equal dimension");
      if (!(std::abs(a.determinant()) > 1e-300))
        throw Error(ErrorKind::InvalidArgument, "cocycle matrices must be invertible");
    }
  }

  std::size_t dimension() const { return static_cast<std::size_t>(matrices_.front().rows()); }
  std::size_t alphabet_size() const { return matrices_.size(); }
  const Eigen::MatrixXd& matrix(Symbol s) const { return matrices_.at(s); }
  const std::vector<Eigen::MatrixXd>& matrices() const { return matrices_; }

  bool is_diagonal() const {
    for (const auto& a : matrices_)
      for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
          if (i != j && a(i, j) != 0.0) return false;
    return true;
  }

  static double spectral_norm(const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
  }
  static double smallest_singular_value(const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
  }

  /// f_n on the first n = |word| symbols; products are renormalised so long
  /// words do not overflow.
  double evaluate(std::span<const Symbol> word) const {
    if (word.empty()) return 0.0;
    Eigen::MatrixXd product = Eigen::MatrixXd::Identity(dimension(), dimension());
    double log_scale = 0.0;
    for (Symbol s : word) {
      product = matrix(s) * product;
      const double scale = product.cwiseAbs().maxCoeff();
      product /= scale;
      log_scale += std::log(scale);
    }
    return log_scale + std::log(spectral_norm(product));
  }

  /// (1/d) log|det A_s| per symbol.
  std::vector<double> log_det_per_dimension() const {
    std::vector<double> out;
    for (const auto& a : matrices_) out.push_back(std::log(std::abs(a.determinant())) / static_cast<double>(dimension()));
    return out;
  }

 private:
  std::vector<Eigen::MatrixXd> matrices_;
};

// ---------------------------------------------------------------------------
// Generic sequence potentials
// ---------------------------------------------------------------------------

struct DeclaredApproximant {
  double xi;
  LocallyConstantPotential<double> potential;
};

/// User-supplied f_n. The evaluator must be pure and safe to call
/// concurrently. Declared approximants are spot-checked, never trusted.
struct SequencePotential {
  std::function<double(std::span<const Symbol>)> evaluator;
  std::vector<DeclaredApproximant> declared_xi_family;
};

// ---------------------------------------------------------------------------
// Approximants
// ---------------------------------------------------------------------------

template <typename S>
struct Approximant {
  LocallyConstantPotential<S> potential;
  double certified_error = 0.0;
};

template <typename S>
Approximant<S> approximant(const LocallyConstantPotential<S>& f, double xi) {
  if (!(xi > 0)) throw Error(ErrorKind::InvalidArgument, "xi must be positive");
  return {f, 0.0};
}

/// Additive approximant (1/d) log|det A_s|. The per-step error bound covers
/// both sides: log s_max(A_s) - g_s above and g_s - log s_min(A_s) below.
inline Approximant<double> approximant(const Sft& sft, const CocyclePotential& f, double xi) {
  if (!(xi > 0)) throw Error(ErrorKind::InvalidArgument, "xi must be positive");
  if (f.alphabet_size() != sft.alphabet_size())
    throw Error(ErrorKind::InvalidArgument, "cocycle alphabet does not match the SFT");
  auto g = f.log_det_per_dimension();
  double err = 0.0;
  for (std::size_t s = 0; s < g.size(); ++s) {
    const double upper = std::log(CocyclePotential::spectral_norm(f.matrix(static_cast<Symbol>(s)))) - g[s];
    const double lower = g[s] - std::log(CocyclePotential::smallest_singular_value(f.matrix(static_cast<Symbol>(s))));
    err = std::max({err, upper, lower});
  }
  return {LocallyConstantPotential<double>::from_symbol_weights(sft, g), err};
}

inline Approximant<double> approximant(const SequencePotential& f, double xi) {
  if (!(xi > 0)) throw Error(ErrorKind::InvalidArgument, "xi must be positive");
  const DeclaredApproximant* best = nullptr;
  for (const auto& d : f.declared_xi_family)
    if (d.xi <= xi && (best == nullptr || d.xi < best->xi)) best = &d;
  if (best == nullptr)
    throw Error(ErrorKind::NoApproximantAvailable, "no declared approximant with xi <= " + std::to_string(xi));
  return {best->potential, best->xi};
}

struct AdditivitySpotCheck {
  double xi;
  double worst_observed;  // max over samples of (1/n)|f_n - S_n f_xi|
  bool within_bound;
};

/// Samples words of length n uniformly along the SFT and compares f_n with
/// the declared approximant's Birkhoff sums.
inline std::vector<AdditivitySpotCheck> spot_check_additivity(const Sft& sft, const SequencePotential& f,
                                                              std::size_t n, std::size_t samples,
                                                              std::uint64_t seed) {
  std::vector<AdditivitySpotCheck> out;
  Rng rng(seed);
  std::vector<double> uniform_edges(sft.edge_count(), 1.0);
  for (const auto& d : f.declared_xi_family) {
    double worst = 0.0;
    const std::size_t extra = d.potential.range() - 1;
    for (std::size_t i = 0; i < samples; ++i) {
      Word w{static_cast<Symbol>(rng.uniform() * static_cast<double>(sft.alphabet_size()))};
      while (w.size() < n + extra) w.push_back(sft.edge(rng.pick<double>(sft.out_edges(w.back()), uniform_edges)).to);
      const double fn = f.evaluator(std::span<const Symbol>(w).first(n));
      const double sn = prefix_birkhoff_sums(d.potential, w)[n - 1];
      worst = std::max(worst, std::abs(fn - sn) / static_cast<double>(n));
    }
    out.push_back({d.xi, worst, worst < d.xi});
  }
  return out;
}

/// (1/n) psi_n >= sigma for all n and x.
struct DenominatorBound {
  double sigma;

  explicit DenominatorBound(double s) : sigma(s) {
    if (!(s > 0)) throw Error(ErrorKind::DenominatorViolated, "sigma must be positive");
  }

  /// For a locally constant potential the best bound is its minimum weight.
  template <typename S>
  static DenominatorBound of(const LocallyConstantPotential<S>& psi) {
    return DenominatorBound(to_double(psi.min_weight()));
  }

  template <typename S>
  void check(const LocallyConstantPotential<S>& psi, const char* name) const {
    if (to_double(psi.min_weight()) < sigma * (1 - 1e-12))
      throw Error(ErrorKind::DenominatorViolated,
                  std::string(name) + " has minimum block weight below sigma = " + std::to_string(sigma));
  }
};

// ---------------------------------------------------------------------------
// Measure averages F_*(mu)
// ---------------------------------------------------------------------------

template <typename S>
struct Interval {
  S lo;
  S hi;
  bool converged = true;

  S width() const { return hi - lo; }
  bool contains(const S& x, const S& tol = S(0)) const { return lo - tol <= x && x <= hi + tol; }
  bool overlaps(const Interval& o, const S& tol = S(0)) const { return lo <= o.hi + tol && o.lo <= hi + tol; }
};

namespace detail {

/// Calls visit(symbol word, probability) for every positive-probability
/// walk of the chain carrying `symbols` original symbols.
template <typename S, typename Visit>
void for_each_cylinder(const MarkovChain<S>& chain, std::size_t symbols, Visit&& visit) {
  const BlockPresentation& bp = chain.presentation;
  const Sft& g = bp.graph;
  const std::size_t r = bp.block_length;
  const std::size_t steps = symbols > r ? symbols - r : 0;
  std::vector<Symbol> walk;
  auto rec = [&](auto&& self, const S& prob) -> void {
    if (walk.size() == steps + 1) {
      Word w = bp.blocks[walk.front()];
      for (std::size_t i = 1; i < walk.size(); ++i) w.push_back(bp.blocks[walk[i]].back());
      w.resize(symbols);
      visit(w, prob);
      return;
    }
    for (std::size_t e : g.out_edges(walk.back())) {
      if (!(chain.transition[e] > S(0))) continue;
      walk.push_back(g.edge(e).to);
      self(self, S(prob * chain.transition[e]));
      walk.pop_back();
    }
  };
  for (Symbol v = 0; v < g.alphabet_size(); ++v) {
    if (!(chain.stationary[v] > S(0))) continue;
    walk.assign(1, v);
    rec(rec, chain.stationary[v]);
  }
}

}  // namespace detail

/// Exact expectation of the block weights under the chain.
template <typename S>
Interval<S> measure_average(const LocallyConstantPotential<S>& f, const MarkovChain<S>& chain) {
  S sum(0);
  if (chain.presentation.block_length + 1 >= f.range()) {
    const auto w = f.edge_weights(chain.presentation);
    const auto freq = chain.edge_frequencies();
    for (std::size_t e = 0; e < w.size(); ++e) sum += w[e] * freq.freq[e];
  } else {
    detail::for_each_cylinder(chain, f.range(), [&](const Word& w, const S& p) { sum += p * f.weight(w); });
  }
  return {sum, sum, true};
}

struct CocycleAverage {
  Interval<double> interval;
  std::vector<double> doubling_upper;  // (1/2^j) int f_{2^j} dmu, j = 0, 1, ...
  double certified_lower;              // int (1/d) log|det| dmu
  double monte_carlo_estimate;
  double monte_carlo_stderr;
};

struct CocycleAverageOptions {
  double tolerance = 1e-6;
  std::size_t max_cylinders = 1u << 16;
  std::size_t mc_batches = 8;
  std::size_t mc_length = 1u << 14;
  double mc_z = 3.0;
  std::uint64_t seed = 1;
};

/// F_*(mu) for a cocycle: certified upper bounds from the doubling sequence
/// (non-increasing by subadditivity), a certified lower bound from the
/// determinant, and a Monte-Carlo lower estimate mean - z * stderr.
template <typename S>
CocycleAverage measure_average(const CocyclePotential& f, const MarkovChain<S>& chain,
                               const CocycleAverageOptions& opt = {}) {
  if (!(opt.tolerance > 0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
  CocycleAverage out{};
  const auto g = f.log_det_per_dimension();
  out.certified_lower = 0.0;
  detail::for_each_cylinder(chain, 1, [&](const Word& w, const S& p) { out.certified_lower += to_double(p) * g[w[0]]; });

  double best_upper = std::numeric_limits<double>::infinity();
  for (std::size_t n = 1;; n *= 2) {
    std::size_t count = 0;
    bool over_budget = false;
    double integral = 0.0;
    detail::for_each_cylinder(chain, n, [&](const Word& w, const S& p) {
      if (++count > opt.max_cylinders) over_budget = true;
      if (!over_budget) integral += to_double(p) * f.evaluate(w);
    });
    if (over_budget) break;
    out.doubling_upper.push_back(integral / static_cast<double>(n));
    best_upper = std::min(best_upper, out.doubling_upper.back());
    if (best_upper - out.certified_lower <= opt.tolerance) break;
  }

  Rng rng(opt.seed);
  std::vector<double> batch;
  for (std::size_t b = 0; b < opt.mc_batches; ++b) {
    auto walk = sample_walk(chain, opt.mc_length - 1, rng);
    batch.push_back(f.evaluate(chain.presentation.project_walk(walk)) / static_cast<double>(opt.mc_length));
  }
  double mean = 0.0;
  for (double x : batch) mean += x;
  mean /= static_cast<double>(batch.size());
  double var = 0.0;
  for (double x : batch) var += (x - mean) * (x - mean);
  var /= static_cast<double>(batch.size() > 1 ? batch.size() - 1 : 1);
  out.monte_carlo_estimate = mean;
  out.monte_carlo_stderr = std::sqrt(var / static_cast<double>(batch.size()));

  const double lower = std::min(best_upper, std::max(out.certified_lower, mean - opt.mc_z * out.monte_carlo_stderr));
  out.interval = {lower, best_upper, best_upper - lower <= opt.tolerance};
  return out;
}

}  // namespace ergopt
