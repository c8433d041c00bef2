#pragma once

#include <array>
#include <optional>
#include <random>
#include <vector>

#include "swapsteer/network.hpp"

namespace swapsteer {

// Self-test failures: the supplied realization does not meet the premises of
// the extraction argument.  The CLI maps these to their own exit code.
class SelfTestError : public std::runtime_error {
 public:
  explicit SelfTestError(const std::string& what) : std::runtime_error(what) {}
};
// Operator identities of the maximal violation fail beyond 1e-8.
class NonMaximalViolationError : public SelfTestError {
 public:
  using SelfTestError::SelfTestError;
};
// A source state has Schmidt rank < 2 across the Alice|Bob cut.
class SeparableSourceError : public SelfTestError {
 public:
  using SelfTestError::SelfTestError;
};
// Bob's reduced state is rank-deficient, voiding the full-rank assumption.
class FullRankAssumptionError : public SelfTestError {
 public:
  using SelfTestError::SelfTestError;
};

// One branch of a separable description of the joint state: with probability
// `weight`, source 1 emits psi1 on A1 B1 and source 2 emits psi2 on A2 B2.
struct SeparableTerm {
  double weight;
  CVec psi1;  // dim 2*dim_b1
  CVec psi2;  // dim 2*dim_b2
};

// Claimed maximally-violating realization: joint state on A1 A2 B1 B2 with
// Alice dimension exactly 4, Bob factors of dimension 2*m_i, and Bob's
// order-4 observable.  The separable description is required for unitary
// extraction but not for residual checks.
struct Realization {
  DensityOperator rho;  // dim 4 * dim_b1 * dim_b2, subsystem order A1 A2 B1 B2
  CMat bob_observable;  // dim dim_b1 * dim_b2, order B1 B2
  Index dim_b1 = 2;
  Index dim_b2 = 2;
  std::optional<std::vector<SeparableTerm>> decomposition;
};

// Structural checks: dimensions, evenness of Bob factors, and (when present)
// that the decomposition reproduces rho within 1e-10.
void validate_realization(const Realization& r);

struct SelfTestCertificate {
  std::array<double, 4> sos_residuals{};  // k = 0..3
  double max_sos_residual = 0.0;
  double bob_unitarity_residual = 0.0;
  CMat u1, u2;  // extracted local unitaries on Bob's factors
  double state_fidelity = 0.0;
  double observable_residual = 0.0;
  CMat p1, p2;  // 2x2 Schmidt-weight operators of the worst component pair
  double commutant_residual = 0.0;
};

// Residuals of (A0^k x B0^{4-k}) rho = rho for k = 0..3; all vanish exactly
// at a maximal violation.
std::array<double, 4> sos_residuals(const Realization& r);

// max(||B0 B0^+ - 1||, ||B0^+ B0 - 1||); meaningful only when Bob's reduced
// state is full rank, which is checked first.
double bob_projectivity_check(const Realization& r);

// ||A0 (P1 x P2)^2 - (P1 x P2)^2 A0||_max for the extracted Schmidt-weight
// operators; zero forces P1 x P2 = 1 and hence balanced Schmidt spectra.
double commutant_residual(const CMat& p1, const CMat& p2);

// Largest |<f_{j,l}|f_{j',s}>| between Schmidt vectors of different
// decomposition components of the same source (0 when every source has a
// single component).  Orthogonal supports justify the block assembly of the
// extracted unitaries.
double support_orthogonality_check(const Realization& r);

// Full extraction: reject decomposition components of Schmidt rank < 2, gate
// on the operator identities, Schmidt-decompose every component, build the
// block unitaries U_i, and score the rotated state against phi+ x phi+ (junk
// traced out) and the rotated observable against A0 x 1.
SelfTestCertificate extract_local_unitaries(const Realization& r);

// Projective 4-outcome readout of an order-4 unitary observable; outcome b
// carries the eigenvalue i^{eigenphase(b)} of the supplied ordering.
Povm povm_from_observable(const CMat& observable, const BellOrdering& ordering = BellOrdering::canonical());

// Statistics of a realization measured with Bell readout on Alice and the
// eigenbasis of bob_observable on Bob.
ProbTable realization_prob_table(const Realization& r, const BellOrdering& ordering = BellOrdering::canonical());

// Reference realizations.
CMat ideal_bob_observable(Index m1, Index m2);  // A0 x 1 arranged on B1' B1'' B2' B2''
// Ideal state phi+ x phi+ with product junk of dimensions (m1, m2) and
// distinct junk spectra; includes the separable description.
Realization ideal_realization(Index m1 = 1, Index m2 = 1);
// Conjugate Bob's side (state, observable, decomposition) by v1 x v2.
Realization apply_bob_disguise(const Realization& r, const CMat& v1, const CMat& v2);
Realization disguised_ideal_realization(Index m1, Index m2, std::mt19937_64& rng);
// Non-maximal fixture: two isotropic sources with the trusted observable
// copied to Bob; fails the extraction gate for alpha < 1.
Realization werner_realization(double alpha1, double alpha2);

}  // namespace swapsteer
