#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ergopt/error.hpp"
#include "ergopt/scalar.hpp"

namespace ergopt {

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

/// maximize objective . x  subject to  rows x = rhs,  x >= 0.
template <typename S>
struct LinearProgram {
  std::vector<std::vector<S>> rows;
  std::vector<S> rhs;
  std::vector<S> objective;
};

template <typename S>
struct SimplexSolution {
  LpStatus status = LpStatus::Infeasible;
  S value = S(0);
  std::vector<S> x;
  std::vector<S> duals;             // one per row, sign relative to the row as given
  std::vector<std::size_t> basis;   // column per row; index >= n marks a redundant row
  std::size_t pivots = 0;
};

struct SimplexOptions {
  std::optional<std::vector<std::size_t>> warm_basis;
  std::size_t max_pivots = 200'000;
};

namespace detail {

/// Dense two-phase tableau with Bland's rule. Artificial columns are kept
/// after phase 1 because they hold B^{-1}, which yields the duals.
template <typename S>
class Tableau {
 public:
  Tableau(const LinearProgram<S>& lp)
      : m_(lp.rows.size()), n_(lp.objective.size()), width_(n_ + m_), t_(m_, std::vector<S>(width_, S(0))),
        rhs_(m_), flipped_(m_, false), basis_(m_), d_(width_, S(0)) {
    for (std::size_t i = 0; i < m_; ++i) {
      if (lp.rows[i].size() != n_) throw Error(ErrorKind::InvalidArgument, "LP row width mismatch");
      flipped_[i] = lp.rhs[i] < S(0);
      for (std::size_t j = 0; j < n_; ++j) t_[i][j] = flipped_[i] ? S(-lp.rows[i][j]) : lp.rows[i][j];
      rhs_[i] = flipped_[i] ? S(-lp.rhs[i]) : lp.rhs[i];
      t_[i][n_ + i] = S(1);
      basis_[i] = n_ + i;
    }
  }

  /// Gauss-Jordan into the given basis; false if singular or infeasible.
  bool install_basis(const std::vector<std::size_t>& target) {
    if (target.size() != m_) return false;
    std::vector<char> placed(m_, 0);
    for (std::size_t j : target) {
      if (j >= width_) return false;
      if (j >= n_) {
        const std::size_t row = j - n_;
        if (basis_[row] != j || placed[row]) return false;
        placed[row] = 1;
        continue;
      }
      std::optional<std::size_t> best;
      for (std::size_t i = 0; i < m_; ++i) {
        if (placed[i] || basis_[i] < n_) continue;
        if (is_pivot_candidate(t_[i][j]) && (!best || abs_value(t_[i][j]) > abs_value(t_[*best][j]))) best = i;
      }
      if (!best) return false;
      pivot(*best, j);
      placed[*best] = 1;
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (rhs_[i] < S(0) && !is_zero<S>(rhs_[i])) return false;
      if (basis_[i] >= n_ && !is_zero<S>(rhs_[i])) return false;
    }
    return true;
  }

  /// Phase 1: maximize -(sum of artificials). Returns false if infeasible.
  bool phase_one(std::size_t& pivots, std::size_t max_pivots) {
    for (std::size_t j = 0; j < width_; ++j) d_[j] = j < n_ ? S(0) : S(-1);
    price_out(std::vector<S>(width_, S(0)), /*phase_one=*/true);
    if (run(width_, pivots, max_pivots) == LpStatus::Unbounded)
      throw Error(ErrorKind::NumericallyUnstable, "phase one reported unbounded");
    S infeasibility(0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] >= n_) infeasibility += rhs_[i];
    if (!is_zero<S>(infeasibility)) return false;
    // Drive zero-level artificials out where a structural pivot exists.
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      for (std::size_t j = 0; j < n_; ++j)
        if (is_pivot_candidate(t_[i][j])) {
          pivot(i, j);
          ++pivots;
          break;
        }
    }
    return true;
  }

  LpStatus phase_two(const std::vector<S>& objective, std::size_t& pivots, std::size_t max_pivots) {
    std::vector<S> cost(width_, S(0));
    for (std::size_t j = 0; j < n_; ++j) cost[j] = objective[j];
    d_ = cost;
    price_out(cost, false);
    return run(n_, pivots, max_pivots);
  }

  SimplexSolution<S> extract(const std::vector<S>& objective, LpStatus status, std::size_t pivots) const {
    SimplexSolution<S> sol;
    sol.status = status;
    sol.pivots = pivots;
    sol.basis = basis_;
    sol.x.assign(n_, S(0));
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) sol.x[basis_[i]] = rhs_[i];
    if constexpr (!is_exact_v<S>) {
      for (S& v : sol.x)
        if (v < S(0)) v = S(0);
    }
    sol.value = S(0);
    for (std::size_t j = 0; j < n_; ++j) sol.value += objective[j] * sol.x[j];
    sol.duals.assign(m_, S(0));
    for (std::size_t i = 0; i < m_; ++i) {
      S y(0);
      for (std::size_t k = 0; k < m_; ++k)
        if (basis_[k] < n_) y += objective[basis_[k]] * t_[k][n_ + i];
      sol.duals[i] = flipped_[i] ? S(-y) : y;
    }
    return sol;
  }

 private:
  static bool is_pivot_candidate(const S& a) {
    if constexpr (is_exact_v<S>) return a != 0;
    else return abs_value(a) > ScalarTraits<S>::pivot_tolerance();
  }

  void price_out(const std::vector<S>& cost, bool phase_one) {
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t b = basis_[i];
      const S cb = phase_one ? (b < n_ ? S(0) : S(-1)) : cost[b];
      if (cb == S(0)) continue;
      for (std::size_t j = 0; j < width_; ++j)
        if (t_[i][j] != S(0)) d_[j] -= cb * t_[i][j];
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    const S inv = S(1) / t_[r][c];
    for (std::size_t j = 0; j < width_; ++j)
      if (t_[r][j] != S(0)) t_[r][j] *= inv;
    rhs_[r] *= inv;
    t_[r][c] = S(1);
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || t_[i][c] == S(0)) continue;
      const S factor = t_[i][c];
      for (std::size_t j = 0; j < width_; ++j)
        if (t_[r][j] != S(0)) t_[i][j] -= factor * t_[r][j];
      rhs_[i] -= factor * rhs_[r];
      t_[i][c] = S(0);
    }
    if (d_[c] != S(0)) {
      const S factor = d_[c];
      for (std::size_t j = 0; j < width_; ++j)
        if (t_[r][j] != S(0)) d_[j] -= factor * t_[r][j];
      d_[c] = S(0);
    }
    basis_[r] = c;
  }

  /// Bland's rule: least entering index with positive reduced cost, least
  /// basic index among ratio-test ties.
  LpStatus run(std::size_t eligible, std::size_t& pivots, std::size_t max_pivots) {
    const S tol = ScalarTraits<S>::tolerance();
    for (;;) {
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < eligible; ++j)
        if (d_[j] > tol) {
          enter = j;
          break;
        }
      if (!enter) return LpStatus::Optimal;
      std::optional<std::size_t> leave;
      S best_ratio(0);
      for (std::size_t i = 0; i < m_; ++i) {
        if (!is_pivot_candidate(t_[i][*enter]) || t_[i][*enter] < S(0)) continue;
        S level = rhs_[i];
        if constexpr (!is_exact_v<S>) {
          if (level < S(0)) level = S(0);
        }
        const S ratio = level / t_[i][*enter];
        if (!leave || ratio < best_ratio || (ratio == best_ratio && basis_[i] < basis_[*leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (!leave) return LpStatus::Unbounded;
      if (++pivots > max_pivots)
        throw Error(ErrorKind::NumericallyUnstable, "simplex pivot limit of " + std::to_string(max_pivots) + " reached");
      pivot(*leave, *enter);
    }
  }

  std::size_t m_;
  std::size_t n_;
  std::size_t width_;
  std::vector<std::vector<S>> t_;
  std::vector<S> rhs_;
  std::vector<bool> flipped_;
  std::vector<std::size_t> basis_;
  std::vector<S> d_;
};

}  // namespace detail

template <typename S>
SimplexSolution<S> solve_simplex(const LinearProgram<S>& lp, const SimplexOptions& options = {}) {
  if (lp.rhs.size() != lp.rows.size()) throw Error(ErrorKind::InvalidArgument, "LP rhs size mismatch");
  std::size_t pivots = 0;
  if (options.warm_basis) {
    detail::Tableau<S> warm(lp);
    if (warm.install_basis(*options.warm_basis)) {
      auto status = warm.phase_two(lp.objective, pivots, options.max_pivots);
      return warm.extract(lp.objective, status, pivots);
    }
  }
  detail::Tableau<S> tableau(lp);
  if (!tableau.phase_one(pivots, options.max_pivots)) {
    SimplexSolution<S> sol;
    sol.status = LpStatus::Infeasible;
    sol.pivots = pivots;
    return sol;
  }
  auto status = tableau.phase_two(lp.objective, pivots, options.max_pivots);
  return tableau.extract(lp.objective, status, pivots);
}

}  // namespace ergopt
