#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "ergopt/error.hpp"
#include "ergopt/markov.hpp"
#include "ergopt/optimizers.hpp"
#include "ergopt/potential.hpp"
#include "ergopt/scalar.hpp"
#include "ergopt/sft.hpp"

namespace ergopt {

// ---------------------------------------------------------------------------
// Finite-horizon maxima (1/n) max_x f_n(x)
// ---------------------------------------------------------------------------

template <typename S>
struct HorizonMax {
  S value;         // (1/n) max f_n
  Word maximizer;  // original symbols, n + range - 1 of them
};

/// Max-plus dynamic programming over n-edge walks of the block presentation.
template <typename S>
HorizonMax<S> finite_horizon_max(const Sft& sft, const LocallyConstantPotential<S>& f, std::size_t n) {
  if (n == 0 || n < f.range()) throw Error(ErrorKind::InvalidArgument, "horizon must be at least the potential range");
  EdgeModel model(sft, f.range());
  const Sft& g = model.graph();
  const auto w = model.weights(f);
  const std::size_t v = g.alphabet_size();
  std::vector<S> best(v, S(0));
  std::vector<std::vector<std::size_t>> pred(n, std::vector<std::size_t>(v, 0));
  for (std::size_t step = 0; step < n; ++step) {
    std::vector<S> next(v);
    for (Symbol u = 0; u < v; ++u) {
      bool first = true;
      for (std::size_t e : g.in_edges(u)) {
        S cand = best[g.edge(e).from] + w[e];
        if (first || cand > next[u]) {
          next[u] = cand;
          pred[step][u] = e;
          first = false;
        }
      }
    }
    best = std::move(next);
  }
  Symbol end = static_cast<Symbol>(std::max_element(best.begin(), best.end()) - best.begin());
  std::vector<Symbol> walk(n + 1);
  walk[n] = end;
  for (std::size_t step = n; step >= 1; --step) walk[step - 1] = g.edge(pred[step - 1][walk[step]]).from;
  const BlockPresentation& bp = model.presentation();
  Word word = bp.blocks[walk[0]];
  for (std::size_t i = 1; i < walk.size(); ++i) word.push_back(bp.blocks[walk[i]].back());
  word.resize(n + f.range() - 1);
  return {best[end] / S(static_cast<long>(n)), word};
}

struct CocycleHorizon {
  double value;                    // (1/n) max f_n
  double certified_upper;          // min_{j <= n} (1/j) max f_j
  std::vector<double> max_by_length;  // max f_j, j = 1..n
  std::vector<double> upper_sequence; // running min of (1/j) max f_j
  Word maximizer;
  std::size_t nodes = 0;
};

struct CocycleHorizonOptions {
  std::size_t horizon_cap = 24;
  std::size_t node_budget = 50'000'000;
};

/// Exact max_x f_j for j = 1..n by branch and bound over words. A prefix P
/// of length l is pruned when log||P|| + max f_{j-l} cannot beat the
/// incumbent (submultiplicativity of the norm).
inline CocycleHorizon finite_horizon_max(const Sft& sft, const CocyclePotential& f, std::size_t n,
                                         const CocycleHorizonOptions& opt = {}) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "horizon must be positive");
  if (n > opt.horizon_cap)
    throw Error(ErrorKind::HorizonTooLarge, "cocycle horizon " + std::to_string(n) + " exceeds cap " +
                                                std::to_string(opt.horizon_cap));
  if (f.alphabet_size() != sft.alphabet_size())
    throw Error(ErrorKind::InvalidArgument, "cocycle alphabet does not match the SFT");
  const auto d = static_cast<Eigen::Index>(f.dimension());
  CocycleHorizon out{};
  std::vector<double> best_len(n + 1, 0.0);  // best_len[j] = max f_j
  Word incumbent_word;

  for (std::size_t j = 1; j <= n; ++j) {
    double incumbent = -std::numeric_limits<double>::infinity();
    Word word;
    std::vector<Eigen::MatrixXd> products{Eigen::MatrixXd::Identity(d, d)};
    std::vector<double> log_scale{0.0};
    auto dfs = [&](auto&& self) -> void {
      if (++out.nodes > opt.node_budget) throw Error(ErrorKind::HorizonTooLarge, "branch-and-bound node budget exhausted");
      const std::size_t l = word.size();
      const double log_norm = log_scale.back() + std::log(CocyclePotential::spectral_norm(products.back()));
      if (l == j) {
        if (log_norm > incumbent) {
          incumbent = log_norm;
          incumbent_word = word;
        }
        return;
      }
      if (l > 0 && log_norm + best_len[j - l] <= incumbent) return;
      for (Symbol s = 0; s < sft.alphabet_size(); ++s) {
        if (l > 0 && !sft.allowed(word.back(), s)) continue;
        Eigen::MatrixXd p = f.matrix(s) * products.back();
        const double scale = p.cwiseAbs().maxCoeff();
        products.push_back(p / scale);
        log_scale.push_back(log_scale.back() + std::log(scale));
        word.push_back(s);
        self(self);
        word.pop_back();
        products.pop_back();
        log_scale.pop_back();
      }
    };
    dfs(dfs);
    best_len[j] = incumbent;
    out.max_by_length.push_back(incumbent);
    const double avg = incumbent / static_cast<double>(j);
    out.upper_sequence.push_back(out.upper_sequence.empty() ? avg : std::min(out.upper_sequence.back(), avg));
    if (j == n) out.maximizer = incumbent_word;
  }
  out.value = best_len[n] / static_cast<double>(n);
  out.certified_upper = out.upper_sequence.back();
  return out;
}

// ---------------------------------------------------------------------------
// beta / eta for cocycles
// ---------------------------------------------------------------------------

struct CocycleExtremal {
  Interval<double> interval;
  bool diagonal_exact = false;
  double approximant_value = 0.0;  // beta or eta of (1/d) log|det|
  double approximant_error = 0.0;
  double periodic_bound = 0.0;     // best periodic-orbit exponent
  std::optional<double> horizon_upper;
};

struct CocycleExtremalOptions {
  std::size_t horizon = 12;
  std::size_t periodic_word_budget = 1u << 14;
};

namespace detail {

inline double spectral_radius(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Exponents (1/p) log rho(A_w) of periodic orbits, over all periodic words
/// up to the largest length whose count fits the budget.
inline std::vector<double> periodic_exponents(const Sft& sft, const CocyclePotential& f, std::size_t budget) {
  std::vector<double> out;
  for (std::size_t p = 1;; ++p) {
    auto words = allowed_words(sft, p);
    if (words.size() > budget) break;
    for (const Word& w : words) {
      if (!sft.allowed(w.back(), w.front())) continue;
      Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(f.dimension(), f.dimension());
      for (Symbol s : w) prod = f.matrix(s) * prod;
      out.push_back(std::log(spectral_radius(prod)) / static_cast<double>(p));
    }
    if (p >= 16) break;
  }
  return out;
}

}  // namespace detail

/// Interval for beta(F) (or eta(F) with Sense::Minimize) of a cocycle.
/// Diagonal cocycles are exact: f_n = max_i S_n log|a_i|, so beta is the
/// largest of the scalar max-mean-cycle values.
inline CocycleExtremal cocycle_extremal_average(const Sft& sft, const CocyclePotential& f, Sense sense,
                                                const CocycleExtremalOptions& opt = {}) {
  CocycleExtremal out;
  auto approx = approximant(sft, f, 1.0);
  auto ext = sense == Sense::Maximize ? max_ergodic_average(sft, approx.potential)
                                      : min_ergodic_average(sft, approx.potential);
  out.approximant_value = ext.value;
  out.approximant_error = approx.certified_error;

  if (f.is_diagonal() && sense == Sense::Maximize) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.dimension(); ++i) {
      std::vector<double> w;
      for (Symbol s = 0; s < sft.alphabet_size(); ++s)
        w.push_back(std::log(std::abs(f.matrix(s)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)))));
      best = std::max(best, max_ergodic_average(sft, LocallyConstantPotential<double>::from_symbol_weights(sft, w)).value);
    }
    out.diagonal_exact = true;
    out.periodic_bound = best;
    out.interval = {best, best, true};
    return out;
  }

  auto periodic = detail::periodic_exponents(sft, f, opt.periodic_word_budget);
  if (sense == Sense::Maximize) {
    out.periodic_bound = *std::max_element(periodic.begin(), periodic.end());
    auto horizon = finite_horizon_max(sft, f, opt.horizon);
    out.horizon_upper = horizon.certified_upper;
    out.interval.lo = std::max(out.periodic_bound, ext.value - out.approximant_error);
    out.interval.hi = std::min(*out.horizon_upper, ext.value + out.approximant_error);
  } else {
    // Top exponent >= average exponent for every measure, so eta(F) >= eta(g).
    out.periodic_bound = *std::min_element(periodic.begin(), periodic.end());
    out.interval.lo = ext.value;
    out.interval.hi = std::min(out.periodic_bound, ext.value + out.approximant_error);
  }
  out.interval.hi = std::max(out.interval.hi, out.interval.lo);
  out.interval.converged = out.interval.width() <= 1e-9;
  return out;
}

// ---------------------------------------------------------------------------
// Empirical traces
// ---------------------------------------------------------------------------

template <typename S>
struct Checkpoint {
  std::size_t n;
  EdgeFrequencyVector<S> empirical;  // delta_{x,n} on the presentation edges
  std::vector<S> averages;           // (1/n) S_n of each registered potential
};

template <typename S>
struct EmpiricalTrace {
  BlockPresentation presentation;
  std::vector<Symbol> walk;  // presentation vertices, n + 1 of them
  Word word;                 // original symbols carried by the walk
  std::vector<Checkpoint<S>> checkpoints;

  std::size_t length() const { return walk.size() - 1; }

  /// S_m f along the first m edges, for m = 1..length().
  std::vector<S> running_sums(const LocallyConstantPotential<S>& f) const {
    const auto w = f.edge_weights(presentation);
    std::vector<S> out;
    out.reserve(length());
    S sum(0);
    for (std::size_t i = 0; i + 1 < walk.size(); ++i) {
      sum += w[*presentation.graph.edge_index(walk[i], walk[i + 1])];
      out.push_back(sum);
    }
    return out;
  }
};

namespace detail {

template <typename S>
Word walk_to_word(const BlockPresentation& bp, const std::vector<Symbol>& walk) {
  Word word = bp.blocks[walk.front()];
  for (std::size_t i = 1; i < walk.size(); ++i) word.push_back(bp.blocks[walk[i]].back());
  return word;
}

}  // namespace detail

/// Simulates the stationary chain for n steps; checkpoints at powers of two
/// and at n.
template <typename S>
EmpiricalTrace<S> sample_generic_word(const MarkovChain<S>& chain, std::size_t n, std::uint64_t seed,
                                      const std::vector<LocallyConstantPotential<S>>& registered = {}) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "trace length must be positive");
  Rng rng(seed);
  EmpiricalTrace<S> trace;
  trace.presentation = chain.presentation;
  trace.walk = sample_walk(chain, n, rng);
  trace.word = detail::walk_to_word<S>(trace.presentation, trace.walk);

  const Sft& g = chain.graph();
  std::vector<std::vector<S>> weights;
  for (const auto& f : registered) weights.push_back(f.edge_weights(trace.presentation));
  std::vector<long> counts(g.edge_count(), 0);
  std::vector<S> sums(registered.size(), S(0));
  std::size_t next = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t e = *g.edge_index(trace.walk[i - 1], trace.walk[i]);
    ++counts[e];
    for (std::size_t r = 0; r < weights.size(); ++r) sums[r] += weights[r][e];
    if (i == next || i == n) {
      Checkpoint<S> cp{i, {std::vector<S>(g.edge_count())}, {}};
      for (std::size_t e2 = 0; e2 < counts.size(); ++e2) cp.empirical.freq[e2] = S(counts[e2]) / S(static_cast<long>(i));
      for (const S& s : sums) cp.averages.push_back(s / S(static_cast<long>(i)));
      trace.checkpoints.push_back(std::move(cp));
      if (i == next) next *= 2;
    }
  }
  return trace;
}

template <typename S>
struct LevelSetReport {
  std::vector<std::size_t> n;
  std::vector<double> ratio;
  std::vector<double> deviation;
  bool within_tolerance = false;
  bool non_increasing_tail = false;
  bool pass = false;
};

/// Checks |phi_n / psi_n - alpha| <= tol at the last checkpoint and that the
/// second half of the deviation sequence stays below the first half's peak
/// (plus tol).
template <typename S>
LevelSetReport<S> verify_level_set_membership(const EmpiricalTrace<S>& trace, const LocallyConstantPotential<S>& phi,
                                              const LocallyConstantPotential<S>& psi, double alpha, double tol) {
  if (trace.checkpoints.size() < 3) throw Error(ErrorKind::InvalidArgument, "trace needs at least 3 checkpoints");
  const auto sp = trace.running_sums(phi);
  const auto ss = trace.running_sums(psi);
  LevelSetReport<S> rep;
  for (const auto& cp : trace.checkpoints) {
    const double r = to_double(sp[cp.n - 1]) / to_double(ss[cp.n - 1]);
    rep.n.push_back(cp.n);
    rep.ratio.push_back(r);
    rep.deviation.push_back(std::abs(r - alpha));
  }
  const std::size_t half = rep.deviation.size() / 2;
  const double early = *std::max_element(rep.deviation.begin(), rep.deviation.begin() + static_cast<std::ptrdiff_t>(half));
  const double late = *std::max_element(rep.deviation.begin() + static_cast<std::ptrdiff_t>(half), rep.deviation.end());
  rep.within_tolerance = rep.deviation.back() <= tol;
  rep.non_increasing_tail = late <= early + tol;
  rep.pass = rep.within_tolerance && rep.non_increasing_tail;
  return rep;
}

// ---------------------------------------------------------------------------
// Irregular points by alternating specification blocks
// ---------------------------------------------------------------------------

struct BlockSchedule {
  std::size_t k;
  std::size_t block_length;   // N_k
  std::size_t bridge_length;  // m_k
  std::size_t end;            // t_k
  int target;                 // rho(k), 1 or 2
};

template <typename S>
struct IrregularWitness {
  BlockPresentation presentation;
  std::vector<Symbol> walk;
  Word word;
  std::vector<BlockSchedule> schedule;
  MarkovChain<S> target1;
  MarkovChain<S> target2;
  S target_ratio1;
  S target_ratio2;
  std::vector<S> oscillation_record;  // phi_{t_k} / psi_{t_k}
  std::string schedule_note;

  std::size_t depth() const { return schedule.size(); }

  /// f_{t_k} / g_{t_k} for each k.
  std::vector<S> ratio_record(const LocallyConstantPotential<S>& f, const LocallyConstantPotential<S>& g) const {
    const auto wf = f.edge_weights(presentation);
    const auto wg = g.edge_weights(presentation);
    std::vector<S> out;
    S sf(0), sg(0);
    std::size_t pos = 0;
    for (const auto& b : schedule) {
      for (; pos < b.end; ++pos) {
        const std::size_t e = *presentation.graph.edge_index(walk[pos], walk[pos + 1]);
        sf += wf[e];
        sg += wg[e];
      }
      out.push_back(sf / sg);
    }
    return out;
  }
};

struct IrregularOptions {
  std::size_t first_block = 8;
  std::uint64_t seed = 1;
  double distinguish_tolerance = 1e-9;
};

namespace detail {

/// Shortest connecting walk from `from` to `to` (vertices exclusive of `from`).
inline std::vector<Symbol> bridge(const Sft& g, Symbol from, Symbol to) {
  if (from == to) return {};
  std::vector<std::ptrdiff_t> parent(g.alphabet_size(), -1);
  std::queue<Symbol> q;
  q.push(from);
  parent[from] = from;
  while (!q.empty()) {
    Symbol v = q.front();
    q.pop();
    for (std::size_t e : g.out_edges(v)) {
      Symbol w = g.edge(e).to;
      if (parent[w] >= 0) continue;
      parent[w] = v;
      if (w == to) {
        std::vector<Symbol> path{to};
        while (path.back() != from) path.push_back(static_cast<Symbol>(parent[path.back()]));
        path.pop_back();
        std::reverse(path.begin(), path.end());
        return path;
      }
      q.push(w);
    }
  }
  throw Error(ErrorKind::NotMixing, "no connecting word between block endpoints");
}

}  // namespace detail

/// Builds one finite word alternating long generic blocks of mu_1 and mu_2
/// (rho(k) = 1, 2, 1, ...), joined by shortest connecting words, with
/// N_{k+1} = growth * t_k and t_k = t_{k-1} + m_k + N_k.
template <typename S>
IrregularWitness<S> construct_irregular_witness(const MarkovChain<S>& mu1, const MarkovChain<S>& mu2,
                                                const LocallyConstantPotential<S>& phi,
                                                const LocallyConstantPotential<S>& psi, std::size_t depth,
                                                std::size_t growth, const IrregularOptions& opt = {}) {
  if (depth < 2) throw Error(ErrorKind::InvalidArgument, "depth must be at least 2");
  if (growth < 1 || opt.first_block < 1) throw Error(ErrorKind::InvalidArgument, "growth and first block must be positive");
  if (!(mu1.graph() == mu2.graph())) throw Error(ErrorKind::InvalidArgument, "targets live on different presentations");
  const Sft& g = mu1.graph();
  if (!g.is_mixing()) throw Error(ErrorKind::NotMixing, "irregular points need a topologically mixing SFT");

  IrregularWitness<S> w{mu1.presentation, {}, {}, {}, mu1, mu2, S(0), S(0), {}, {}};
  w.target_ratio1 = measure_average(phi, mu1).lo / measure_average(psi, mu1).lo;
  w.target_ratio2 = measure_average(phi, mu2).lo / measure_average(psi, mu2).lo;
  if (std::abs(to_double(w.target_ratio1) - to_double(w.target_ratio2)) <= opt.distinguish_tolerance)
    throw Error(ErrorKind::TargetsIndistinguishable, "both targets have Phi/Psi ratio " +
                                                         std::to_string(to_double(w.target_ratio1)));
  w.schedule_note = "block lengths N_{k+1} = " + std::to_string(growth) +
                    " * t_k instead of a super-exponential schedule; connecting words are exact (shadowing error 0)";

  Rng rng(opt.seed);
  const auto wphi = phi.edge_weights(w.presentation);
  const auto wpsi = psi.edge_weights(w.presentation);
  S sphi(0), spsi(0);
  std::size_t t = 0;
  for (std::size_t k = 1; k <= depth; ++k) {
    const int target = static_cast<int>((k + 1) % 2) + 1;
    const MarkovChain<S>& mu = target == 1 ? mu1 : mu2;
    const std::size_t block = k == 1 ? opt.first_block : growth * t;
    std::vector<Symbol> segment;
    std::size_t bridge_len = 0;
    if (k == 1) {
      segment = sample_walk(mu, block, rng);
    } else {
      std::vector<std::size_t> vertices(g.alphabet_size());
      for (std::size_t v = 0; v < vertices.size(); ++v) vertices[v] = v;
      const auto start = static_cast<Symbol>(rng.pick<S>(vertices, mu.stationary));
      auto link = detail::bridge(g, w.walk.back(), start);
      bridge_len = link.size();
      segment = link;
      auto body = sample_walk(mu, block, rng, start);
      segment.insert(segment.end(), body.begin() + 1, body.end());
    }
    const std::size_t before = w.walk.size();
    w.walk.insert(w.walk.end(), segment.begin(), segment.end());
    for (std::size_t i = std::max<std::size_t>(before, 1); i < w.walk.size(); ++i) {
      const std::size_t e = *g.edge_index(w.walk[i - 1], w.walk[i]);
      sphi += wphi[e];
      spsi += wpsi[e];
    }
    t += bridge_len + block;
    w.schedule.push_back({k, block, bridge_len, t, target});
    w.oscillation_record.push_back(sphi / spsi);
  }
  w.word = detail::walk_to_word<S>(w.presentation, w.walk);
  return w;
}

template <typename S>
struct SupremumEstimate {
  S value;
  bool low_depth = false;
};

/// max over witnesses of f_{t_k}/g_{t_k} along odd k (the mu_1 checkpoints).
template <typename S>
SupremumEstimate<S> irregular_supremum_estimate(const LocallyConstantPotential<S>& f,
                                                const LocallyConstantPotential<S>& g,
                                                const std::vector<IrregularWitness<S>>& witnesses) {
  if (witnesses.empty()) throw Error(ErrorKind::InvalidArgument, "at least one witness required");
  std::optional<S> best;
  bool low = false;
  for (const auto& w : witnesses) {
    low = low || w.depth() < 4;
    auto rec = w.ratio_record(f, g);
    for (std::size_t i = 0; i < rec.size(); i += 2)
      if (!best || rec[i] > *best) best = rec[i];
  }
  return {*best, low};
}

template <typename S>
struct IrregularOptimum {
  S value;                        // max F_*/G_*
  std::optional<Cycle> ergodic_witness;
  S ratio_inf;                    // inf Phi_*/Psi_*
  S ratio_sup;                    // sup Phi_*/Psi_*
  IrregularWitness<S> witness;
  std::vector<S> objective_record;  // f_{t_k} / g_{t_k}
  SupremumEstimate<S> estimate;
};

/// Witness construction behind sup over Phi/Psi-irregular points of
/// limsup f_n/g_n: mu_1 is a single-cycle maximiser of F/G, mu_2 a cycle
/// whose Phi/Psi ratio differs from mu_1's.
template <typename S>
IrregularOptimum<S> irregular_optimum(const Sft& sft, const LocallyConstantPotential<S>& f,
                                      const LocallyConstantPotential<S>& g, const LocallyConstantPotential<S>& phi,
                                      const LocallyConstantPotential<S>& psi, std::size_t depth, std::size_t growth,
                                      const DenominatorBound& sigma, const IrregularOptions& opt = {}) {
  sigma.check(g, "G");
  sigma.check(psi, "Psi");
  auto model = EdgeModel::for_potentials<S>(sft, {&f, &g, &phi, &psi});
  const auto wf = model.weights(f);
  const auto wg = model.weights(g);
  const auto wp = model.weights(phi);
  const auto wq = model.weights(psi);
  std::vector<S> neg(wp.size());
  for (std::size_t e = 0; e < wp.size(); ++e) neg[e] = -wp[e];

  auto solve = [&](const std::vector<S>& num, const std::vector<S>& den) {
    auto lp = detail::fractional_lp(model.graph(), num, den, {});
    if (lp.status != LpStatus::Optimal) throw Error(ErrorKind::NumericallyUnstable, "ratio LP not optimal");
    auto r = detail::unscale(lp);
    r.ergodic_vertex_witness = detail::single_cycle_on_face(model.graph(), num, den, {}, r.value, r.witness);
    if (!r.ergodic_vertex_witness) throw Error(ErrorKind::NumericallyUnstable, "optimal face has no single-cycle vertex");
    return r;
  };
  auto sup_phi = solve(wp, wq);
  auto inf_phi = solve(neg, wq);
  const S ratio_sup = sup_phi.value;
  const S ratio_inf = S(-inf_phi.value);
  if (!(ratio_sup - ratio_inf > ScalarTraits<S>::tolerance()))
    throw Error(ErrorKind::HypothesisFails, "Phi/Psi ratio is the same for every invariant measure (" +
                                                std::to_string(to_double(ratio_sup)) + ")");

  auto best = solve(wf, wg);
  const Cycle& c1 = *best.ergodic_vertex_witness;
  auto v1 = uniform_cycle_vector<S>(model.graph(), c1);
  const S r1 = dot(wp, v1) / dot(wq, v1);
  const Cycle& c2 = approx_equal<S>(r1, ratio_sup) ? *inf_phi.ergodic_vertex_witness : *sup_phi.ergodic_vertex_witness;

  const auto& bp = model.presentation();
  auto mu1 = edge_vector_to_markov(bp, v1);
  auto mu2 = edge_vector_to_markov(bp, uniform_cycle_vector<S>(model.graph(), c2));
  auto w = construct_irregular_witness(mu1, mu2, phi, psi, depth, growth, opt);
  auto estimate = irregular_supremum_estimate(f, g, std::vector<IrregularWitness<S>>{w});
  auto record = w.ratio_record(f, g);
  return {best.value, model.project(c1), ratio_inf, ratio_sup, std::move(w), std::move(record), estimate};
}

}  // namespace ergopt
