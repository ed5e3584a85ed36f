#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ergopt/error.hpp"
#include "ergopt/markov.hpp"
#include "ergopt/optimizers.hpp"
#include "ergopt/orbit.hpp"
#include "ergopt/potential.hpp"
#include "ergopt/scalar.hpp"
#include "ergopt/sft.hpp"

namespace ergopt {

/// Roof tau of a suspension flow; every block weight is positive.
template <typename S>
class RoofFunction {
 public:
  explicit RoofFunction(LocallyConstantPotential<S> tau) : tau_(std::move(tau)) {
    if (!(tau_.min_weight() > S(0))) throw Error(ErrorKind::DenominatorViolated, "roof function must be positive");
  }
  const LocallyConstantPotential<S>& potential() const { return tau_; }
  S min_height() const { return tau_.min_weight(); }
  DenominatorBound bound() const { return DenominatorBound(to_double(min_height())); }

 private:
  LocallyConstantPotential<S> tau_;
};

/// Flow observable H given by its fibre integral h(x) = int_0^tau(x) H(x,t) dt.
template <typename S>
struct FlowObservable {
  LocallyConstantPotential<S> fiber_integrated;
};

/// int H d mu_tau = int h d mu / int tau d mu for an edge measure on a
/// presentation of level range - 1 (or higher).
template <typename S>
S flow_average(const Sft& sft, const FlowObservable<S>& h, const EdgeFrequencyVector<S>& mu, const RoofFunction<S>& tau) {
  auto model = EdgeModel::for_potentials<S>(sft, {&h.fiber_integrated, &tau.potential()});
  if (mu.size() != model.graph().edge_count())
    throw Error(ErrorKind::InvalidArgument, "measure does not live on the observables' presentation");
  if (!is_feasible(model.graph(), mu)) throw Error(ErrorKind::InvalidArgument, "measure is not invariant");
  return dot(model.weights(h.fiber_integrated), mu) / dot(model.weights(tau.potential()), mu);
}

template <typename S>
struct FlowOptimum {
  S value;
  EdgeFrequencyVector<S> base_measure;  // mu; the flow measure is mu_tau
  S base_roof_average;                  // int tau d mu, the normaliser of mu_tau
};

/// sup { int H d mu_tau : int Phi d mu_tau = alpha }.
template <typename S>
FlowOptimum<S> flow_level_set_optimum(const Sft& sft, const FlowObservable<S>& h, const FlowObservable<S>& phi,
                                      const S& alpha, const RoofFunction<S>& tau) {
  const auto& t = tau.potential();
  auto r = ratio_max_constrained(sft, h.fiber_integrated, t, phi.fiber_integrated, t, alpha, tau.bound());
  return {r.value, r.witness, S(1) / r.total_mass};
}

template <typename S>
struct FlowIrregularReport {
  S value;
  std::optional<Cycle> ergodic_witness;
  S phi_inf;
  S phi_sup;
  IrregularWitness<S> witness;
  std::vector<S> flow_h_record;    // h_{t_k} / tau_{t_k}
  std::vector<S> flow_phi_record;  // phi_{t_k} / tau_{t_k}
};

struct FlowIrregularOptions {
  std::size_t depth = 6;
  std::size_t growth = 4;
  IrregularOptions witness;
};

/// sup over flow-irregular points of the limsup of H averages, which equals
/// max flow average of H provided Phi's flow average is not constant. This
/// is the discrete problem with G = Psi = tau.
template <typename S>
FlowIrregularReport<S> flow_irregular_optimum(const Sft& sft, const FlowObservable<S>& h,
                                              const FlowObservable<S>& phi, const RoofFunction<S>& tau,
                                              const FlowIrregularOptions& opt = {}) {
  const auto& t = tau.potential();
  auto r = irregular_optimum(sft, h.fiber_integrated, t, phi.fiber_integrated, t, opt.depth, opt.growth, tau.bound(),
                             opt.witness);
  auto phi_record = r.witness.oscillation_record;
  return {r.value, r.ergodic_witness, r.ratio_inf, r.ratio_sup,
          std::move(r.witness), std::move(r.objective_record), std::move(phi_record)};
}

}  // namespace ergopt
