#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <random>

#include "doctest.h"
#include "swapsteer/linalg.hpp"
#include "swapsteer/network.hpp"
#include "swapsteer/random.hpp"
#include "swapsteer/selftest.hpp"
#include "testutil.hpp"

using namespace swapsteer;

namespace {

double max_of(const std::array<double, 4>& a) { return *std::max_element(a.begin(), a.end()); }

// Joint state with source 1 carrying a junk qubit pinned to |0>: Bob's
// reduced state is rank-deficient even though the violation is maximal.
Realization pinned_junk_realization() {
  const CVec phi = bell_state(BellLabel::PhiPlus);
  CVec chi = CVec::Zero(2);
  chi(0) = 1.0;
  const CVec psi1 = kron(phi, chi);  // A1 (2) x B1 (2 x 2 junk)
  const CVec psi2 = phi;
  std::vector<SourceComponent> comps{{1.0, DensityOperator(psi1 * psi1.adjoint()),
                                      DensityOperator(psi2 * psi2.adjoint())}};
  SourceEnsemble ensemble(std::move(comps));
  return Realization{DensityOperator(ensemble.joint_state()), ideal_bob_observable(2, 1), 4, 2,
                     std::vector<SeparableTerm>{{1.0, psi1, psi2}}};
}

}  // namespace

TEST_CASE("operator identity residuals") {
  SUBCASE("ideal realization satisfies all four identities") {
    for (Index m : {Index{1}, Index{2}}) {
      const std::array<double, 4> res = sos_residuals(ideal_realization(m, m));
      for (double v : res) CHECK(v <= 1e-12);
    }
  }

  SUBCASE("identities survive a unitary disguise") {
    std::mt19937_64 rng(61);
    for (int t = 0; t < 5; ++t) {
      const std::array<double, 4> res = sos_residuals(disguised_ideal_realization(1, 2, rng));
      CHECK(max_of(res) <= 1e-10);
    }
  }

  SUBCASE("noisy sources break the identities") {
    CHECK(max_of(sos_residuals(werner_realization(0.8, 0.8))) > 0.01);
  }
}

TEST_CASE("projectivity of the untrusted observable") {
  SUBCASE("unitary observable leaves no residual") {
    CHECK(bob_projectivity_check(ideal_realization(1, 1)) <= 1e-12);
    CHECK(bob_projectivity_check(ideal_realization(2, 2)) <= 1e-12);
  }

  SUBCASE("a zeroed eigenvalue is detected") {
    Realization r = ideal_realization(1, 1);
    const CVec dropped = bell_state(BellLabel::PsiMinus);
    r.bob_observable -= std::pow(kI, bell_eigenphase(BellLabel::PsiMinus)) * (dropped * dropped.adjoint());
    const double residual = bob_projectivity_check(r);
    CHECK(residual == doctest::Approx(0.5).epsilon(1e-12));
    // The defect removes exactly one unit direction from B B^+.
    const RVec spec = hermitian_eig((r.bob_observable * r.bob_observable.adjoint()).eval()).values;
    CHECK(spec(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(spec(3) == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("rank-deficient reduced state is refused") {
    CHECK_THROWS_AS(bob_projectivity_check(pinned_junk_realization()), FullRankAssumptionError);
  }
}

TEST_CASE("extraction on the undisguised ideal realization") {
  const Realization r = ideal_realization(1, 1);
  const SelfTestCertificate cert = extract_local_unitaries(r);
  CHECK(cert.max_sos_residual <= 1e-12);
  CHECK(cert.bob_unitarity_residual <= 1e-12);
  CHECK(cert.state_fidelity >= 1.0 - 1e-10);
  CHECK(cert.state_fidelity <= 1.0 + 1e-12);
  CHECK(cert.observable_residual <= 1e-10);
  CHECK(max_abs(cert.p1 - CMat::Identity(2, 2)) <= 1e-10);
  CHECK(max_abs(cert.p2 - CMat::Identity(2, 2)) <= 1e-10);
  CHECK(cert.commutant_residual <= 1e-12);
  // Already in the target frame: the correcting unitaries are trivial.
  CHECK(phase_aligned_distance(cert.u1, CMat::Identity(2, 2)) <= 1e-9);
  CHECK(phase_aligned_distance(cert.u2, CMat::Identity(2, 2)) <= 1e-9);
}

TEST_CASE("extraction undoes a random disguise") {
  std::mt19937_64 rng(62);
  const std::array<std::pair<Index, Index>, 4> dims{{{1, 1}, {2, 1}, {1, 2}, {2, 2}}};
  for (const auto& [m1, m2] : dims) {
    for (int t = 0; t < 3; ++t) {
      const Realization r = disguised_ideal_realization(m1, m2, rng);
      const SelfTestCertificate cert = extract_local_unitaries(r);
      CHECK(cert.max_sos_residual <= 1e-10);
      CHECK(cert.state_fidelity >= 1.0 - 1e-8);
      CHECK(cert.observable_residual <= 1e-8);
      CHECK(cert.commutant_residual <= 1e-9);
      // Rigidity: a vanishing commutant forces balanced Schmidt weights.
      if (cert.commutant_residual <= 1e-12) {
        CHECK(max_abs(cert.p1 - CMat::Identity(2, 2)) <= 1e-6);
        CHECK(max_abs(cert.p2 - CMat::Identity(2, 2)) <= 1e-6);
      }
      // A passing realization scores the maximal witness value.
      const ProbTable p = realization_prob_table(r);
      CHECK(std::abs(witness_value(p) - 1.0) <= 1e-9);
    }
  }

  SUBCASE("idempotence: rotating back leaves nothing to correct") {
    for (const auto& [m1, m2] : {std::pair<Index, Index>{1, 1}, std::pair<Index, Index>{2, 1}}) {
      const Realization r = disguised_ideal_realization(m1, m2, rng);
      const SelfTestCertificate cert = extract_local_unitaries(r);
      const Realization undone = apply_bob_disguise(r, cert.u1, cert.u2);
      const SelfTestCertificate again = extract_local_unitaries(undone);
      CHECK(phase_aligned_distance(again.u1, CMat::Identity(2 * m1, 2 * m1)) <= 1e-9);
      CHECK(phase_aligned_distance(again.u2, CMat::Identity(2 * m2, 2 * m2)) <= 1e-9);
      CHECK(again.state_fidelity >= 1.0 - 1e-8);
    }
  }

  SUBCASE("for trivial junk the correction is the inverse disguise") {
    const Realization base = ideal_realization(1, 1);
    const CMat v1 = random_unitary(2, rng);
    const CMat v2 = random_unitary(2, rng);
    const Realization r = apply_bob_disguise(base, v1, v2);
    const SelfTestCertificate cert = extract_local_unitaries(r);
    const CVec phi = bell_state(BellLabel::PhiPlus);
    // (1 x U1 V1) |phi+> must come back to |phi+> up to phase; same on side 2.
    const Complex o1 = phi.adjoint() * kron(CMat::Identity(2, 2), (cert.u1 * v1).eval()) * phi;
    const Complex o2 = phi.adjoint() * kron(CMat::Identity(2, 2), (cert.u2 * v2).eval()) * phi;
    CHECK(std::abs(o1) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(o2) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("extraction refusals") {
  SUBCASE("noisy sources fail the identity gate") {
    CHECK_THROWS_AS(extract_local_unitaries(werner_realization(0.9, 0.9)), NonMaximalViolationError);
    CHECK_THROWS_AS(extract_local_unitaries(werner_realization(0.999, 1.0)), NonMaximalViolationError);
  }

  SUBCASE("a product source is rejected before any residual check") {
    CVec zz = CVec::Zero(4);
    zz(0) = 1.0;  // |00> across A1 | B1
    const CVec phi = bell_state(BellLabel::PhiPlus);
    std::vector<SeparableTerm> terms{{1.0, zz, phi}};
    const CMat rho_raw = [&] {
      std::vector<SourceComponent> comps{{1.0, DensityOperator(zz * zz.adjoint()),
                                          DensityOperator(phi * phi.adjoint())}};
      return SourceEnsemble(std::move(comps)).joint_state();
    }();
    const Realization r{DensityOperator(rho_raw), trusted_observable().matrix, 2, 2, terms};
    CHECK_THROWS_AS(extract_local_unitaries(r), SeparableSourceError);
  }

  SUBCASE("missing decomposition is rejected") {
    Realization r = ideal_realization(1, 1);
    r.decomposition.reset();
    CHECK_THROWS_AS(extract_local_unitaries(r), ValidationError);
  }

  SUBCASE("rank-deficient junk register is refused") {
    CHECK_THROWS_AS(extract_local_unitaries(pinned_junk_realization()), FullRankAssumptionError);
  }
}

TEST_CASE("commutant residual of the weight operators") {
  CHECK(commutant_residual(CMat::Identity(2, 2), CMat::Identity(2, 2)) == 0.0);

  SUBCASE("unbalanced weights fail to commute") {
    CMat p1 = CMat::Zero(2, 2);
    p1(0, 0) = std::sqrt(2.0) * 0.9;
    p1(1, 1) = std::sqrt(2.0) * std::sqrt(1.0 - 0.81);
    CHECK(commutant_residual(p1, CMat::Identity(2, 2)) > 0.1);
  }

  SUBCASE("validation") {
    CHECK_THROWS_AS(commutant_residual(CMat::Identity(3, 3), CMat::Identity(2, 2)), ValidationError);
    CMat neg = CMat::Identity(2, 2);
    neg(1, 1) = -1.0;
    CHECK_THROWS_AS(commutant_residual(neg, CMat::Identity(2, 2)), ValidationError);
  }
}

TEST_CASE("support orthogonality of decomposition components") {
  SUBCASE("single component is vacuous") {
    CHECK(support_orthogonality_check(ideal_realization(1, 1)) == 0.0);
  }

  SUBCASE("junk flags give orthogonal supports") {
    CHECK(support_orthogonality_check(ideal_realization(2, 2)) <= 1e-12);
  }

  SUBCASE("shared supports are flagged") {
    CHECK(support_orthogonality_check(werner_realization(0.8, 0.8)) >= 0.5);
  }
}

TEST_CASE("readout of an order-four observable") {
  SUBCASE("the trusted observable yields the bell readout") {
    const Povm p = povm_from_observable(trusted_observable().matrix);
    const Povm bell = bell_basis(BellOrdering::canonical());
    for (int b = 0; b < 4; ++b) CHECK(max_abs(p.element(b) - bell.element(b)) < 1e-12);
  }

  SUBCASE("non-unitary input is rejected") {
    CMat half = CMat::Identity(4, 4) * 0.5;
    CHECK_THROWS_AS(povm_from_observable(half), ValidationError);
  }

  SUBCASE("ideal statistics through the observable readout") {
    const ProbTable p = realization_prob_table(ideal_realization(2, 1));
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        CHECK(std::abs(p.p(a, b) - (a == b ? 0.25 : 0.0)) < 1e-12);
      }
  }
}

TEST_CASE("realization validation") {
  SUBCASE("dimension mismatches") {
    Realization r = ideal_realization(1, 1);
    r.dim_b1 = 4;
    CHECK_THROWS_AS(validate_realization(r), ValidationError);
  }

  SUBCASE("odd factor dimension") {
    Realization r = ideal_realization(1, 1);
    r.dim_b1 = 3;
    CHECK_THROWS_AS(validate_realization(r), ValidationError);
  }

  SUBCASE("decomposition must rebuild the state") {
    Realization r = ideal_realization(1, 1);
    const CVec phi = bell_state(BellLabel::PhiPlus);
    const CVec psi = bell_state(BellLabel::PsiMinus);
    r.decomposition = std::vector<SeparableTerm>{{1.0, psi, phi}};
    CHECK_THROWS_AS(validate_realization(r), InconsistencyError);
  }
}
