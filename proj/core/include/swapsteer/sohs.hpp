#pragma once

#include <array>
#include <vector>

#include "swapsteer/network.hpp"
#include "swapsteer/optimize.hpp"

namespace swapsteer {

// One pure product branch of an atom's Alice-side preparation.
struct AliceComponent {
  double weight;
  CVec psi1;  // qubit state from source 1
  CVec psi2;  // qubit state from source 2
};

// One value of the shared hidden variable: Alice receives a mixture of
// product states, Bob answers from a fixed response distribution that cannot
// depend on Alice's outcome.
struct SohsAtom {
  double weight;
  std::vector<AliceComponent> alice;
  std::array<double, 4> bob_response;
};

// Separable-sources model with outcome-independent hidden states.  Its
// witness value can never exceed 1/2.
class SOHSModel {
 public:
  explicit SOHSModel(std::vector<SohsAtom> atoms);
  const std::vector<SohsAtom>& atoms() const { return atoms_; }

 private:
  std::vector<SohsAtom> atoms_;
};

// p(a,b) = sum_lambda w_lambda <M_a>_lambda q_lambda(b).
ProbTable sohs_prob_table(const SOHSModel& m, const Povm& alice);

// The model attaining witness 1/2 against the Bell readout: hidden variable
// (x,y) uniform, Alice gets |x>|y>, Bob announces the outcome whose Bell
// vector is supported on the pattern (x,y).
SOHSModel saturating_sohs_model(const BellOrdering& ordering = BellOrdering::canonical());

// Quantum realization of a model with few atoms: each source appends a flag
// register carrying the atom index, Bob's measurement reads the flags and
// samples the response.  Evaluating it through joint_probability must
// reproduce sohs_prob_table.
Scenario scenario_from_sohs(const SOHSModel& m);

struct SohsBoundResult {
  double bound = 0.0;          // best single-branch witness found
  int outcome = 0;             // Alice outcome attaining it
  std::array<double, 4> angles{};  // (theta1, phi1, theta2, phi2) Bloch angles
  CVec psi1, psi2;
  double spread = 0.0;         // max - min of per-restart optima
  bool converged = false;      // spread within cfg.spread_tol
};

// Classical bound on the witness for a given Alice measurement by direct
// optimization: max over product states and outcomes of <psi1 psi2|M_a|psi1 psi2>.
// Each restart refines every outcome from a random pair of Bloch points.
SohsBoundResult sohs_bound_optimize(const Povm& alice, const OptimizerConfig& cfg = {});

// Hidden-variable response for one (lambda1, lambda2) pair.
struct NLHVResponse {
  std::array<double, 4> alice;
  std::array<double, 4> bob;
};

// Local hidden-variable model for the no-input network: independent sources
// of randomness lambda1, lambda2 and per-pair response distributions.  This
// class reproduces every no-input distribution, which is why the witness
// needs the trust structure rather than Bell-style locality.
class NLHVModel {
 public:
  NLHVModel(std::vector<double> lambda1_weights, std::vector<double> lambda2_weights,
            std::vector<std::vector<NLHVResponse>> responses);
  const std::vector<double>& lambda1_weights() const { return w1_; }
  const std::vector<double>& lambda2_weights() const { return w2_; }
  const NLHVResponse& response(std::size_t l1, std::size_t l2) const { return responses_[l1][l2]; }

 private:
  std::vector<double> w1_, w2_;
  std::vector<std::vector<NLHVResponse>> responses_;
};

ProbTable nlhv_prob_table(const NLHVModel& m);

// Exact model for an arbitrary table: lambda1 enumerates the outcome pairs
// with positive probability, lambda2 is trivial, responses are deterministic.
NLHVModel build_nlhv_model(const ProbTable& p);

}  // namespace swapsteer
