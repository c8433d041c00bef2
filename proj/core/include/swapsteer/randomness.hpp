#pragma once

#include "swapsteer/network.hpp"
#include "swapsteer/optimize.hpp"

namespace swapsteer {

// Adversarial model: Eve purifies the sources' classical correlation, holds a
// register E of bounded dimension, and guesses Bob's outcome with a 4-outcome
// measurement.  Subsystem order of the state: (A1 A2), (B1 B2), E.
struct EveStrategy {
  CVec tripartite_state;
  Povm eve_povm;
};

struct RandomnessReport {
  double guessing_probability = 0.0;
  double min_entropy_bits = 0.0;  // -log2(guessing_probability)
  double constraint_violation = 0.0;
};
RandomnessReport make_report(double guessing_probability, double constraint_violation);

// Guessing probability in the certified frame: Bob's POVM must have the form
// (rank-1 projector on B') x 1_{B''}; the Bell overlap then pins every term
// to 1/4 and G = 1/4 independent of the junk/Eve state and of Eve's POVM.
// Non-certified shapes are rejected with a pointer to eve_strategy_value.
RandomnessReport certified_guessing_probability(const Povm& bob_povm, const CVec& aux_state, const Povm& eve_povm);

// Score an explicit strategy against a target table: G = sum_b <1 x N_b x E_b>
// and the largest deviation of the reproduced p(a,b) from the target.
// Violating strategies are reported, not rejected.
RandomnessReport eve_strategy_value(const ProbTable& target, const EveStrategy& s, const Povm& alice,
                                    const Povm& bob);

struct EveSearchResult {
  RandomnessReport best;      // best feasible, or least-violating candidate
  bool found_feasible = false;
  int feasible_count = 0;
  double best_violation = 0.0;  // violation of the reported candidate
  EveStrategy strategy;       // materialized candidate behind `best`
  Povm bob_povm;              // Bob measurement of that candidate
};

// Multi-start penalized maximization of the guessing probability over
// strategies with sources separable from each other and from Eve:
// (a) a pair of pure two-qubit sources read out in the Bell basis with an
//     uncorrelated Eve guessing the most likely outcome, and
// (b) classically correlated flag models (at most dim_e atoms) where Eve
//     holds a copy of the hidden flag.
// Entangled-source attacks are excluded by assumption: with them every table
// is fully guessable and no certification survives, so the search explores
// the class the security claim is stated for.  Feasibility means reproducing
// the target within cfg.constraint_tol.
EveSearchResult eve_search(const ProbTable& target, int dim_e, const OptimizerConfig& cfg = {});

}  // namespace swapsteer
