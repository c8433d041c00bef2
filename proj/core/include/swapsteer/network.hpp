#pragma once

#include <vector>

#include "swapsteer/qobj.hpp"

namespace swapsteer {

// One classical branch of the pair of sources: with probability `weight`,
// source 1 emits rho1 on A1 x B1 and source 2 emits rho2 on A2 x B2.  The
// Alice-side factors are qubits; the Bob-side factors may have any dimension
// (flags, junk registers, purifications).
struct SourceComponent {
  double weight;
  DensityOperator rho1;
  DensityOperator rho2;
};

// Classically correlated pair of sources: a mixture over SourceComponents.
class SourceEnsemble {
 public:
  explicit SourceEnsemble(std::vector<SourceComponent> components);
  const std::vector<SourceComponent>& components() const { return components_; }
  Index dim_b1() const { return dim_b1_; }
  Index dim_b2() const { return dim_b2_; }
  // Mixture state on A1 B1 A2 B2 reordered to A1 A2 B1 B2.
  CMat joint_state() const;

 private:
  std::vector<SourceComponent> components_;
  Index dim_b1_;
  Index dim_b2_;
};

// No-input swap scenario: Alice measures A1 A2 jointly (4 outcomes, dim 4),
// Bob measures B1 B2 jointly (4 outcomes, dim dim_b1*dim_b2).
class Scenario {
 public:
  Scenario(SourceEnsemble ensemble, Povm alice, Povm bob);
  const SourceEnsemble& ensemble() const { return ensemble_; }
  const Povm& alice() const { return alice_; }
  const Povm& bob() const { return bob_; }

 private:
  SourceEnsemble ensemble_;
  Povm alice_;
  Povm bob_;
};

// 4x4 joint distribution p(a,b).  Entries in [-1e-12, 0) from floating-point
// noise are clipped to zero; the most negative raw entry is kept for
// diagnostics.  Anything below -1e-12, or a total off 1 by more than 1e-12,
// is rejected.
class ProbTable {
 public:
  static ProbTable from_matrix(const Eigen::Matrix4d& raw);
  double p(int a, int b) const { return p_(a, b); }
  const Eigen::Matrix4d& matrix() const { return p_; }
  double min_raw_entry() const { return min_raw_; }

 private:
  ProbTable(const Eigen::Matrix4d& p, double min_raw) : p_(p), min_raw_(min_raw) {}
  Eigen::Matrix4d p_;
  double min_raw_;
};

// p(a,b) = sum_j w_j Tr[(M_a x N_b) rho_j] with rho_j reordered to the
// A1 A2 | B1 B2 split.
ProbTable joint_probability(const Scenario& s);

// Diagonal witness sum_a p(a,a): at most 1/2 for separable sources with
// outcome-independent hidden states, 1 for the ideal realization.
double witness_value(const ProbTable& p);

// <A^k B^l> = sum_{a,b} i^{a k + b l} p(a,b).
Complex correlator(const ProbTable& p, int k, int l);
CMat correlator_table(const ProbTable& p);  // 4x4, entry (k,l)

// Witness reassembled from Fourier correlators, (1/4) sum_k <A^k B^{4-k}>;
// must match witness_value for any outcome ordering shared by both parties.
// Imaginary residue beyond 1e-9 raises InconsistencyError.
double witness_value_correlator_form(const ProbTable& p);

// Reference scenarios.
Scenario ideal_scenario(const BellOrdering& ordering = BellOrdering::canonical());
// Classical-correlation scenario attaining witness 1/2: both sources emit
// perfectly correlated classical bits, Bob reads the two bits.
Scenario saturating_scenario(const BellOrdering& ordering = BellOrdering::canonical());
Scenario werner_scenario(double alpha1, double alpha2, const BellOrdering& ordering = BellOrdering::canonical());

}  // namespace swapsteer
