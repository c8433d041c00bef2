#pragma once

#include <array>
#include <vector>

#include "swapsteer/linalg.hpp"

namespace swapsteer {

// Validated POVM: equal-dimensional PSD elements summing to the identity.
class Povm {
 public:
  explicit Povm(std::vector<CMat> elements);
  int outcomes() const { return static_cast<int>(elements_.size()); }
  Index dim() const { return elements_.front().rows(); }
  const CMat& element(int b) const { return elements_.at(static_cast<std::size_t>(b)); }
  const std::vector<CMat>& elements() const { return elements_; }

 private:
  std::vector<CMat> elements_;
};

enum class BellLabel { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

const char* bell_label_name(BellLabel l);
CVec bell_state(BellLabel l);
// Power k such that the trusted two-qubit observable has eigenvalue i^k on
// this Bell vector: phi+ -> 1, psi+ -> 2, phi- -> 3, psi- -> 0.
int bell_eigenphase(BellLabel l);
// Index 2x+y of a computational pattern |xy> inside this Bell vector's
// support (phi +/- live on {|00>,|11>}, psi +/- on {|01>,|10>}), assigned
// bijectively: phi+ -> |00>, psi+ -> |01>, psi- -> |10>, phi- -> |11>.
// A classical strategy whose announcement carries this pattern agrees with a
// Bell readout of the pattern half the time, which is what saturates the
// separable-model bound of the witness.
int bell_pattern_index(BellLabel l);

// Assignment of the four outcome indices to Bell vectors.  Different
// conventions circulate (witness-first vs. Fourier-eigenvalue-first), so the
// assignment is explicit everywhere instead of being baked into one order.
class BellOrdering {
 public:
  explicit BellOrdering(std::array<BellLabel, 4> labels);
  // phi+, phi-, psi+, psi- : the order used for the diagonal witness.
  static BellOrdering canonical();
  // psi-, phi+, psi+, phi- : outcome a carries eigenvalue i^a, so the
  // Fourier observable of the Bell readout equals the trusted observable.
  static BellOrdering fourier();

  BellLabel label(int outcome) const { return labels_.at(static_cast<std::size_t>(outcome)); }
  int eigenphase(int outcome) const { return eigenphase_.at(static_cast<std::size_t>(outcome)); }
  const std::array<BellLabel, 4>& labels() const { return labels_; }

 private:
  std::array<BellLabel, 4> labels_;
  std::array<int, 4> eigenphase_;
};

// Rank-one projectors onto the Bell vectors, ordered per `ordering`.
Povm bell_basis(const BellOrdering& ordering);
// Projective readout of the computational product basis |00>,|01>,|10>,|11>.
Povm computational_basis_povm(Index dim = 4);

// Isotropic two-qubit state a*|phi+><phi+| + (1-a)*I/4, valid for
// a in [-1/3, 1]; separable exactly when a <= 1/3.
DensityOperator werner_state(double alpha);

// A unitary whose d-th power is the identity, tagged with the Fourier index
// it was built from.
struct Observable {
  CMat matrix;
  int order = 0;
  int index = 0;
};

// sum_a omega^{a k} P_a with omega = exp(2 pi i / d).
Observable observable_from_povm(const Povm& p, int k, int d);
// The trusted two-qubit observable: eigenvalue i^{eigenphase} on each Bell
// vector.  Independent of the ordering passed (the assignment only relabels
// which outcome index carries which eigenvalue).
Observable trusted_observable(const BellOrdering& ordering = BellOrdering::canonical());

// Invert the correlator table <A^k B^l> (k,l = 0..d-1, entry (0,0) must be 1)
// back to an outcome distribution.  Imaginary residue beyond 1e-9 in any
// probability raises InconsistencyError.
RMat probs_from_correlators(const CMat& correlators, int d);

}  // namespace swapsteer
