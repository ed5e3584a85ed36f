#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "ergopt/error.hpp"
#include "ergopt/markov.hpp"
#include "ergopt/polytope.hpp"
#include "ergopt/potential.hpp"
#include "ergopt/scalar.hpp"
#include "ergopt/sft.hpp"

namespace ergopt {

/// Common block presentation on which a family of locally constant
/// potentials becomes edge weights: level max(1, K - 1) for maximal range K.
class EdgeModel {
 public:
  EdgeModel(const Sft& sft, std::size_t max_range)
      : sft_(sft), presentation_(recode_k_blocks(sft, std::max<std::size_t>(1, max_range > 0 ? max_range - 1 : 1))) {}

  template <typename S>
  static EdgeModel for_potentials(const Sft& sft, std::initializer_list<const LocallyConstantPotential<S>*> fs) {
    std::size_t k = 1;
    for (const auto* f : fs) k = std::max(k, f->range());
    return EdgeModel(sft, k);
  }

  const Sft& sft() const { return sft_; }
  const BlockPresentation& presentation() const { return presentation_; }
  const Sft& graph() const { return presentation_.graph; }

  template <typename S>
  std::vector<S> weights(const LocallyConstantPotential<S>& f) const {
    return f.edge_weights(presentation_);
  }

  /// Vertex cycle of the presentation -> periodic word in original symbols.
  Cycle project(const Cycle& vertex_cycle) const { return presentation_.project_cycle(vertex_cycle); }

 private:
  Sft sft_;
  BlockPresentation presentation_;
};

template <typename S>
S dot(const std::vector<S>& w, const EdgeFrequencyVector<S>& x) {
  S sum(0);
  for (std::size_t e = 0; e < w.size(); ++e)
    if (x.freq[e] != S(0)) sum += w[e] * x.freq[e];
  return sum;
}

// ---------------------------------------------------------------------------
// beta and eta
// ---------------------------------------------------------------------------

template <typename S>
struct ErgodicAverage {
  S value;
  S graph_value;  // Karp
  S lp_value;     // simplex
  Cycle witness;  // original symbols
  Cycle vertex_witness;
  EdgeFrequencyVector<S> witness_measure;
};

namespace detail {

template <typename S>
ErgodicAverage<S> extremal_average(const EdgeModel& model, const std::vector<S>& w, Sense sense) {
  auto karp = sense == Sense::Maximize ? max_mean_cycle(model.graph(), w) : min_mean_cycle(model.graph(), w);
  auto lp = lp_optimize(model.graph(), w, sense);
  if (lp.status != LpStatus::Optimal) throw Error(ErrorKind::NumericallyUnstable, "ergodic-average LP not optimal");
  if (!approx_equal<S>(karp.value, lp.value))
    throw Error(ErrorKind::NumericallyUnstable, "max-mean-cycle and LP disagree: " + std::to_string(to_double(karp.value)) +
                                                    " vs " + std::to_string(to_double(lp.value)));
  return {karp.value, karp.value, lp.value, model.project(karp.witness), karp.witness,
          uniform_cycle_vector<S>(model.graph(), karp.witness)};
}

}  // namespace detail

/// beta(F) = max over invariant measures, computed by Karp and by the LP;
/// the two must agree (exactly for rationals, 1e-9 for doubles).
template <typename S>
ErgodicAverage<S> max_ergodic_average(const Sft& sft, const LocallyConstantPotential<S>& f) {
  EdgeModel model(sft, f.range());
  return detail::extremal_average(model, model.weights(f), Sense::Maximize);
}

template <typename S>
ErgodicAverage<S> min_ergodic_average(const Sft& sft, const LocallyConstantPotential<S>& phi) {
  EdgeModel model(sft, phi.range());
  return detail::extremal_average(model, model.weights(phi), Sense::Minimize);
}

// ---------------------------------------------------------------------------
// Conditional maximum ergodic average
// ---------------------------------------------------------------------------

template <typename S>
struct ConditionalResult {
  S value;
  S alpha;  // after clamping
  bool clamped = false;
  EdgeFrequencyVector<S> witness;
  std::vector<std::size_t> basis;
};

namespace detail {

template <typename S>
ConditionalResult<S> conditional_on_model(const EdgeModel& model, const std::vector<S>& f, const std::vector<S>& phi,
                                          const S& alpha, const LpOptions& options = {}) {
  auto lp = lp_optimize(model.graph(), f, Sense::Maximize, {{phi, alpha}}, options);
  if (lp.status != LpStatus::Optimal)
    throw Error(ErrorKind::Infeasible, "no invariant measure has Phi-average " + std::to_string(to_double(alpha)));
  return {lp.value, lp.clamped ? lp.clamped_rhs : alpha, lp.clamped, lp.solution, lp.basis};
}

}  // namespace detail

/// Lambda_{F|Phi}(alpha) with a maximizing edge measure.
template <typename S>
ConditionalResult<S> conditional_max(const Sft& sft, const LocallyConstantPotential<S>& f,
                                     const LocallyConstantPotential<S>& phi, const S& alpha) {
  auto model = EdgeModel::for_potentials<S>(sft, {&f, &phi});
  return detail::conditional_on_model(model, model.weights(f), model.weights(phi), alpha);
}

// ---------------------------------------------------------------------------
// Approximated potentials: every value moves by at most the approximant error
// ---------------------------------------------------------------------------

/// beta or eta of an asymptotically additive potential through an
/// approximant f_xi with |F_*(mu) - (f_xi)_*(mu)| <= err for every mu.
template <typename S>
Interval<S> extremal_average_interval(const Sft& sft, const Approximant<S>& f, Sense sense) {
  auto r = sense == Sense::Maximize ? max_ergodic_average(sft, f.potential) : min_ergodic_average(sft, f.potential);
  const S err = from_rational<S>(Rational(f.certified_error));
  return {r.value - err, r.value + err, is_zero<S>(err)};
}

/// Lambda_{F|Phi}(alpha) for approximated F and locally constant Phi.
template <typename S>
Interval<S> conditional_max_interval(const Sft& sft, const Approximant<S>& f, const LocallyConstantPotential<S>& phi,
                                     const S& alpha) {
  auto r = conditional_max(sft, f.potential, phi, alpha);
  const S err = from_rational<S>(Rational(f.certified_error));
  return {r.value - err, r.value + err, is_zero<S>(err)};
}

// ---------------------------------------------------------------------------
// Spectrum
// ---------------------------------------------------------------------------

template <typename S>
struct SpectrumPoint {
  S alpha;
  S lambda;
};

template <typename S>
struct SpectrumResult {
  S eta;            // range of Phi_*
  S beta_phi;
  S beta_f;
  std::vector<SpectrumPoint<S>> grid;
  S alpha1;         // flat top [alpha1, alpha2]
  S alpha2;
  S alpha_star;     // Phi-average of the returned F-maximizing witness
  EdgeFrequencyVector<S> alpha_star_witness;
  S max_adjacent_jump;
};

/// Sweeps a uniform grid over [eta(Phi), beta(Phi)] reusing each optimal
/// basis as the next warm start, and checks unimodality around the flat top.
template <typename S>
SpectrumResult<S> spectrum(const Sft& sft, const LocallyConstantPotential<S>& f,
                           const LocallyConstantPotential<S>& phi, std::size_t grid_size) {
  if (grid_size < 3) throw Error(ErrorKind::InvalidArgument, "grid size must be at least 3");
  auto model = EdgeModel::for_potentials<S>(sft, {&f, &phi});
  const auto wf = model.weights(f);
  const auto wphi = model.weights(phi);

  SpectrumResult<S> out;
  auto eta = detail::extremal_average(model, wphi, Sense::Minimize);
  auto beta_phi = detail::extremal_average(model, wphi, Sense::Maximize);
  auto beta_f = detail::extremal_average(model, wf, Sense::Maximize);
  out.eta = eta.value;
  out.beta_phi = beta_phi.value;
  out.beta_f = beta_f.value;

  auto lo = lp_optimize(model.graph(), wphi, Sense::Minimize, {{wf, out.beta_f}});
  auto hi = lp_optimize(model.graph(), wphi, Sense::Maximize, {{wf, out.beta_f}});
  if (lo.status != LpStatus::Optimal || hi.status != LpStatus::Optimal)
    throw Error(ErrorKind::NumericallyUnstable, "flat-top LPs failed");
  out.alpha1 = lo.value;
  out.alpha2 = hi.value;
  out.alpha_star = out.alpha1;
  out.alpha_star_witness = lo.solution;

  const S step = (out.beta_phi - out.eta) / S(static_cast<long>(grid_size - 1));
  LpOptions options;
  for (std::size_t i = 0; i < grid_size; ++i) {
    const S alpha = i + 1 == grid_size ? out.beta_phi : S(out.eta + step * S(static_cast<long>(i)));
    auto r = detail::conditional_on_model(model, wf, wphi, alpha, options);
    options.warm_basis = r.basis;
    out.grid.push_back({alpha, r.value});
  }

  const S tol = ScalarTraits<S>::tolerance();
  out.max_adjacent_jump = S(0);
  for (std::size_t i = 0; i + 1 < grid_size; ++i)
    out.max_adjacent_jump = std::max(out.max_adjacent_jump, abs_value(S(out.grid[i + 1].lambda - out.grid[i].lambda)));
  auto report = [&](std::size_t i, const char* what) {
    std::string msg = std::string(what) + " at grid triple (";
    for (std::size_t j = (i == 0 ? 0 : i - 1); j <= std::min(i + 1, grid_size - 1); ++j)
      msg += std::to_string(to_double(out.grid[j].alpha)) + ":" + std::to_string(to_double(out.grid[j].lambda)) + " ";
    throw Error(ErrorKind::UnimodalityViolation, msg + ")");
  };
  for (std::size_t i = 0; i + 1 < grid_size; ++i) {
    const auto& a = out.grid[i];
    const auto& b = out.grid[i + 1];
    if (b.alpha <= out.alpha1 && b.lambda < a.lambda - tol) report(i + 1, "decrease before alpha1");
    if (a.alpha >= out.alpha2 && b.lambda > a.lambda + tol) report(i, "increase after alpha2");
  }
  for (std::size_t i = 0; i < grid_size; ++i) {
    const auto& p = out.grid[i];
    if (p.lambda > out.beta_f + tol) report(i, "value above beta(F)");
    if (p.alpha >= out.alpha1 && p.alpha <= out.alpha2 && !approx_equal<S>(p.lambda, out.beta_f))
      report(i, "flat top below beta(F)");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ratio optimization (fractional LPs)
// ---------------------------------------------------------------------------

template <typename S>
struct RatioResult {
  S value;
  EdgeFrequencyVector<S> witness;  // normalised edge measure
  S total_mass;                    // sum of scaled variables = 1 / G_*(witness)
  std::optional<Cycle> ergodic_witness;         // original symbols
  std::optional<Cycle> ergodic_vertex_witness;  // presentation vertices
};

namespace detail {

/// Charnes-Cooper substitution y = x / (g . x): flow rows stay homogeneous,
/// g . y = 1 replaces the normalisation, ratio constraints become
/// homogeneous rows, and x = y / sum(y) is recovered afterwards.
template <typename S>
LPOutcome<S> fractional_lp(const Sft& graph, const std::vector<S>& f, const std::vector<S>& g,
                           std::vector<EqualityRow<S>> homogeneous_rows) {
  std::vector<EqualityRow<S>> rows;
  rows.push_back({g, S(1)});
  for (auto& r : homogeneous_rows) rows.push_back(std::move(r));
  LpOptions options;
  options.homogeneous = true;
  return lp_optimize(graph, f, Sense::Maximize, rows, options);
}

template <typename S>
RatioResult<S> unscale(const LPOutcome<S>& lp) {
  RatioResult<S> r;
  r.value = lp.value;
  r.total_mass = total_mass(lp.solution);
  r.witness.freq = lp.solution.freq;
  for (S& x : r.witness.freq) x /= r.total_mass;
  return r;
}

/// A vertex of the optimal face: the BFS of {flow, g.y = 1, rows, f.y = value}.
template <typename S>
std::optional<Cycle> single_cycle_on_face(const Sft& graph, const std::vector<S>& f, const std::vector<S>& g,
                                          std::vector<EqualityRow<S>> rows, const S& value,
                                          const EdgeFrequencyVector<S>& witness) {
  if (auto c = vertex_to_cycle(graph, witness)) return c;
  rows.push_back({f, value});
  auto face = fractional_lp(graph, std::vector<S>(f.size(), S(0)), g, rows);
  if (face.status != LpStatus::Optimal) return std::nullopt;
  return vertex_to_cycle(graph, unscale(face).witness);
}

}  // namespace detail

/// sup F_*/G_* over {Phi_*/Psi_* = alpha}.
template <typename S>
RatioResult<S> ratio_max_constrained(const Sft& sft, const LocallyConstantPotential<S>& f,
                                     const LocallyConstantPotential<S>& g, const LocallyConstantPotential<S>& phi,
                                     const LocallyConstantPotential<S>& psi, const S& alpha,
                                     const DenominatorBound& sigma) {
  sigma.check(g, "G");
  sigma.check(psi, "Psi");
  auto model = EdgeModel::for_potentials<S>(sft, {&f, &g, &phi, &psi});
  const auto wf = model.weights(f);
  const auto wg = model.weights(g);
  const auto wphi = model.weights(phi);
  const auto wpsi = model.weights(psi);
  std::vector<S> constraint(wphi.size());
  for (std::size_t e = 0; e < constraint.size(); ++e) constraint[e] = wphi[e] - alpha * wpsi[e];
  auto lp = detail::fractional_lp(model.graph(), wf, wg, {{constraint, S(0)}});
  if (lp.status != LpStatus::Optimal)
    throw Error(ErrorKind::Infeasible, "no invariant measure has Phi/Psi ratio " + std::to_string(to_double(alpha)));
  return detail::unscale(lp);
}

/// sup F_*/G_* over all invariant measures, with a check that the optimal
/// face contains a single-cycle (ergodic) vertex.
template <typename S>
RatioResult<S> ratio_max(const Sft& sft, const LocallyConstantPotential<S>& f, const LocallyConstantPotential<S>& g,
                         const DenominatorBound& sigma) {
  sigma.check(g, "G");
  auto model = EdgeModel::for_potentials<S>(sft, {&f, &g});
  const auto wf = model.weights(f);
  const auto wg = model.weights(g);
  auto lp = detail::fractional_lp(model.graph(), wf, wg, {});
  if (lp.status != LpStatus::Optimal) throw Error(ErrorKind::NumericallyUnstable, "ratio LP not optimal");
  auto r = detail::unscale(lp);
  r.ergodic_vertex_witness = detail::single_cycle_on_face(model.graph(), wf, wg, {}, r.value, r.witness);
  if (r.ergodic_vertex_witness) r.ergodic_witness = model.project(*r.ergodic_vertex_witness);
  return r;
}

// ---------------------------------------------------------------------------
// Extreme points
// ---------------------------------------------------------------------------

template <typename S>
struct EndpointReport {
  S alpha;
  S value;
  std::optional<Cycle> cycle;  // original symbols
  std::optional<Cycle> vertex_cycle;
};

template <typename S>
struct ExtremePointReport {
  EndpointReport<S> at_eta;
  EndpointReport<S> at_beta;
  bool ok() const { return at_eta.cycle.has_value() && at_beta.cycle.has_value(); }
};

/// Conditional maxima at alpha = eta(Phi) and beta(Phi), each mapped to a
/// single-cycle ergodic witness from the optimal face.
template <typename S>
ExtremePointReport<S> extreme_point_check(const Sft& sft, const LocallyConstantPotential<S>& f,
                                          const LocallyConstantPotential<S>& phi) {
  auto model = EdgeModel::for_potentials<S>(sft, {&f, &phi});
  const auto wf = model.weights(f);
  const auto wphi = model.weights(phi);
  auto endpoint = [&](Sense sense) {
    auto ext = detail::extremal_average(model, wphi, sense);
    auto r = detail::conditional_on_model(model, wf, wphi, ext.value);
    EndpointReport<S> rep{r.alpha, r.value, std::nullopt, vertex_to_cycle(model.graph(), r.witness)};
    if (!rep.vertex_cycle) {
      auto face = lp_optimize(model.graph(), std::vector<S>(wf.size(), S(0)), Sense::Maximize,
                              {{wphi, r.alpha}, {wf, r.value}});
      if (face.status == LpStatus::Optimal) rep.vertex_cycle = vertex_to_cycle(model.graph(), face.solution);
    }
    if (rep.vertex_cycle) rep.cycle = model.project(*rep.vertex_cycle);
    return rep;
  };
  return {endpoint(Sense::Minimize), endpoint(Sense::Maximize)};
}

}  // namespace ergopt
