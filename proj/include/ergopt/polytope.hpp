#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ergopt/error.hpp"
#include "ergopt/markov.hpp"
#include "ergopt/scalar.hpp"
#include "ergopt/sft.hpp"
#include "ergopt/simplex.hpp"

namespace ergopt {

enum class Sense { Maximize, Minimize };

/// Extra equality row: sum_e weights[e] * x_e = rhs.
template <typename S>
struct EqualityRow {
  std::vector<S> weights;
  S rhs;
};

template <typename S>
struct LpCertificate {
  std::vector<S> duals;  // flow rows (one per vertex), then normalisation, then extras
  S duality_gap = S(0);
  S primal_residual = S(0);
};

template <typename S>
struct LPOutcome {
  LpStatus status = LpStatus::Infeasible;
  S value = S(0);
  EdgeFrequencyVector<S> solution;
  LpCertificate<S> certificate;
  std::vector<std::size_t> basis;
  bool clamped = false;  // rhs of the last extra row was moved onto the feasible interval
  S clamped_rhs = S(0);
};

struct LpOptions {
  std::optional<std::vector<std::size_t>> warm_basis;
  /// Off-range distance within which the last extra row's rhs is clamped.
  double clamp_tolerance = 1e-9;
  /// Replace the normalisation row sum x = 1 by this row (fractional programs).
  bool homogeneous = false;
};

namespace detail {

template <typename S>
LinearProgram<S> flow_program(const Sft& graph, const std::vector<S>& objective,
                              const std::vector<EqualityRow<S>>& extra, bool normalise) {
  const std::size_t n = graph.edge_count();
  if (objective.size() != n) throw Error(ErrorKind::InvalidArgument, "objective must cover every edge");
  LinearProgram<S> lp;
  lp.objective = objective;
  for (Symbol v = 0; v < graph.alphabet_size(); ++v) {
    std::vector<S> row(n, S(0));
    for (std::size_t e : graph.out_edges(v)) row[e] += S(1);
    for (std::size_t e : graph.in_edges(v)) row[e] -= S(1);
    lp.rows.push_back(std::move(row));
    lp.rhs.push_back(S(0));
  }
  if (normalise) {
    lp.rows.emplace_back(n, S(1));
    lp.rhs.push_back(S(1));
  }
  for (const auto& r : extra) {
    if (r.weights.size() != n) throw Error(ErrorKind::InvalidArgument, "extra row must cover every edge");
    lp.rows.push_back(r.weights);
    lp.rhs.push_back(r.rhs);
  }
  return lp;
}

template <typename S>
LPOutcome<S> solve_flow(const Sft& graph, const std::vector<S>& objective, Sense sense,
                        const std::vector<EqualityRow<S>>& extra, const LpOptions& options) {
  std::vector<S> c = objective;
  if (sense == Sense::Minimize)
    for (S& x : c) x = -x;
  auto lp = flow_program(graph, c, extra, !options.homogeneous);
  SimplexOptions so;
  so.warm_basis = options.warm_basis;
  auto sol = solve_simplex(lp, so);

  LPOutcome<S> out;
  out.status = sol.status;
  if (sol.status != LpStatus::Optimal) return out;
  out.basis = sol.basis;
  out.solution.freq = sol.x;
  out.value = sense == Sense::Minimize ? S(-sol.value) : sol.value;

  // Certificate: primal residual, dual objective, dual feasibility.
  S residual(0);
  S dual_objective(0);
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    S ax(0);
    for (std::size_t j = 0; j < sol.x.size(); ++j)
      if (lp.rows[i][j] != S(0)) ax += lp.rows[i][j] * sol.x[j];
    residual = std::max(residual, abs_value(S(ax - lp.rhs[i])));
    dual_objective += sol.duals[i] * lp.rhs[i];
  }
  S dual_violation(0);
  for (std::size_t j = 0; j < c.size(); ++j) {
    S yA(0);
    for (std::size_t i = 0; i < lp.rows.size(); ++i)
      if (lp.rows[i][j] != S(0)) yA += sol.duals[i] * lp.rows[i][j];
    if (c[j] - yA > dual_violation) dual_violation = c[j] - yA;
  }
  out.certificate.duals = sol.duals;
  if (sense == Sense::Minimize)
    for (S& y : out.certificate.duals) y = -y;
  out.certificate.duality_gap = abs_value(S(dual_objective - sol.value));
  out.certificate.primal_residual = residual;

  const S tol = ScalarTraits<S>::tolerance();
  if (out.certificate.duality_gap > tol || residual > tol || dual_violation > tol) {
    throw Error(ErrorKind::NumericallyUnstable,
                "LP certificate check failed (gap " + std::to_string(to_double(out.certificate.duality_gap)) +
                    ", residual " + std::to_string(to_double(residual)) + ", dual violation " +
                    std::to_string(to_double(dual_violation)) + ")");
  }
  return out;
}

}  // namespace detail

/// Optimizes over flow-conserving, normalised, nonnegative edge vectors
/// with extra equality rows. Pivoting follows Bland's rule, so the returned
/// basis is a deterministic function of the input (and of the warm basis).
/// When infeasible only because the last extra row's rhs lies within
/// `clamp_tolerance` outside its attainable interval, the rhs is clamped,
/// the problem re-solved, and the outcome flagged.
template <typename S>
LPOutcome<S> lp_optimize(const Sft& graph, const std::vector<S>& objective, Sense sense,
                         const std::vector<EqualityRow<S>>& extra = {}, const LpOptions& options = {}) {
  auto out = detail::solve_flow(graph, objective, sense, extra, options);
  if (out.status != LpStatus::Infeasible || extra.empty()) return out;

  std::vector<EqualityRow<S>> others(extra.begin(), extra.end() - 1);
  const EqualityRow<S>& last = extra.back();
  LpOptions plain = options;
  plain.warm_basis.reset();
  auto hi = detail::solve_flow(graph, last.weights, Sense::Maximize, others, plain);
  if (hi.status != LpStatus::Optimal) return out;
  auto lo = detail::solve_flow(graph, last.weights, Sense::Minimize, others, plain);
  const S tol = from_rational<S>(Rational(options.clamp_tolerance));
  std::optional<S> clamp;
  if (last.rhs > hi.value && last.rhs - hi.value <= tol) clamp = hi.value;
  if (last.rhs < lo.value && lo.value - last.rhs <= tol) clamp = lo.value;
  if (!clamp) return out;
  auto rows = extra;
  rows.back().rhs = *clamp;
  auto again = detail::solve_flow(graph, objective, sense, rows, plain);
  again.clamped = true;
  again.clamped_rhs = *clamp;
  return again;
}

/// The simple cycle carrying a solution whose support is exactly one cycle
/// with uniform frequency; empty for mixtures.
template <typename S>
std::optional<Cycle> vertex_to_cycle(const Sft& graph, const EdgeFrequencyVector<S>& solution) {
  const std::size_t n = graph.alphabet_size();
  std::vector<std::optional<std::size_t>> out_edge(n);
  std::vector<int> in_count(n, 0);
  std::size_t support = 0;
  std::optional<S> level;
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    const S& x = solution.freq[e];
    if (is_zero<S>(x) || x < S(0)) continue;
    ++support;
    const Edge& ed = graph.edge(e);
    if (out_edge[ed.from]) return std::nullopt;
    out_edge[ed.from] = e;
    if (++in_count[ed.to] > 1) return std::nullopt;
    if (!level) level = x;
    else if (!approx_equal<S>(*level, x)) return std::nullopt;
  }
  if (support == 0) return std::nullopt;
  Symbol start = 0;
  while (!out_edge[start]) ++start;
  Word walk{start};
  Symbol v = graph.edge(*out_edge[start]).to;
  while (v != start) {
    if (!out_edge[v] || walk.size() > support) return std::nullopt;
    walk.push_back(v);
    v = graph.edge(*out_edge[v]).to;
  }
  if (walk.size() != support) return std::nullopt;
  return Cycle(walk);
}

// ---------------------------------------------------------------------------
// Maximum mean cycle (Karp)
// ---------------------------------------------------------------------------

template <typename S>
struct MeanCycle {
  S value;
  Cycle witness;  // vertex cycle in the graph
};

template <typename S>
S cycle_mean(const Sft& graph, const std::vector<S>& weights, const Cycle& cycle) {
  const Word& w = cycle.symbols();
  S sum(0);
  for (std::size_t i = 0; i < w.size(); ++i) sum += weights[*graph.edge_index(w[i], w[(i + 1) % w.size()])];
  return sum / S(static_cast<long>(w.size()));
}

/// Karp's characterisation with every vertex as a source (D_0 = 0):
/// lambda = max_v min_k (D_n(v) - D_k(v)) / (n - k), D_k(v) the heaviest
/// k-edge walk ending at v. The witness is the best cycle on the n-edge
/// walk into the maximising vertex.
template <typename S>
MeanCycle<S> max_mean_cycle(const Sft& graph, const std::vector<S>& weights) {
  const std::size_t n = graph.alphabet_size();
  if (weights.size() != graph.edge_count()) throw Error(ErrorKind::InvalidArgument, "one weight per edge required");
  std::vector<std::vector<S>> dist(n + 1, std::vector<S>(n, S(0)));
  std::vector<std::vector<std::size_t>> pred(n + 1, std::vector<std::size_t>(n, 0));
  for (std::size_t k = 1; k <= n; ++k) {
    for (Symbol v = 0; v < n; ++v) {
      bool first = true;
      for (std::size_t e : graph.in_edges(v)) {
        S cand = dist[k - 1][graph.edge(e).from] + weights[e];
        if (first || cand > dist[k][v]) {
          dist[k][v] = cand;
          pred[k][v] = e;
          first = false;
        }
      }
    }
  }
  std::optional<S> best;
  Symbol best_v = 0;
  for (Symbol v = 0; v < n; ++v) {
    std::optional<S> worst;
    for (std::size_t k = 0; k < n; ++k) {
      S ratio = (dist[n][v] - dist[k][v]) / S(static_cast<long>(n - k));
      if (!worst || ratio < *worst) worst = ratio;
    }
    if (!best || *worst > *best) {
      best = worst;
      best_v = v;
    }
  }

  // Walk back n edges from best_v and split the walk into simple cycles.
  std::vector<Symbol> walk(n + 1);
  walk[n] = best_v;
  for (std::size_t k = n; k >= 1; --k) walk[k - 1] = graph.edge(pred[k][walk[k]]).from;
  std::vector<std::ptrdiff_t> pos(n, -1);
  std::vector<Symbol> stack;
  std::optional<Cycle> witness;
  std::optional<S> witness_mean;
  for (Symbol v : walk) {
    if (pos[v] >= 0) {
      const auto p = static_cast<std::size_t>(pos[v]);
      Cycle c(Word(stack.begin() + static_cast<std::ptrdiff_t>(p), stack.end()));
      S mean = cycle_mean(graph, weights, c);
      if (!witness_mean || mean > *witness_mean) {
        witness = c;
        witness_mean = mean;
      }
      for (std::size_t i = p; i < stack.size(); ++i) pos[stack[i]] = -1;
      stack.resize(p);
    }
    pos[v] = static_cast<std::ptrdiff_t>(stack.size());
    stack.push_back(v);
  }
  if (!witness || !approx_equal<S>(*witness_mean, *best))
    throw Error(ErrorKind::NumericallyUnstable, "Karp walk carries no cycle of the optimal mean");
  return {*best, *witness};
}

template <typename S>
MeanCycle<S> min_mean_cycle(const Sft& graph, const std::vector<S>& weights) {
  std::vector<S> neg(weights.size());
  for (std::size_t e = 0; e < weights.size(); ++e) neg[e] = -weights[e];
  auto r = max_mean_cycle(graph, neg);
  return {S(-r.value), r.witness};
}

}  // namespace ergopt
