#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <array>
#include <functional>
#include <random>

#include "doctest.h"
#include "swapsteer/linalg.hpp"
#include "swapsteer/network.hpp"
#include "swapsteer/qobj.hpp"
#include "swapsteer/random.hpp"
#include "testutil.hpp"

using namespace swapsteer;

TEST_CASE("bell states are the standard vectors") {
  const double s = 1.0 / std::sqrt(2.0);
  const CVec phi_plus = bell_state(BellLabel::PhiPlus);
  CHECK(phi_plus(0).real() == doctest::Approx(s).epsilon(1e-15));
  CHECK(phi_plus(1) == Complex{0.0, 0.0});
  CHECK(phi_plus(2) == Complex{0.0, 0.0});
  CHECK(phi_plus(3).real() == doctest::Approx(s).epsilon(1e-15));
  const CVec psi_minus = bell_state(BellLabel::PsiMinus);
  CHECK(psi_minus(1).real() == doctest::Approx(s).epsilon(1e-15));
  CHECK(psi_minus(2).real() == doctest::Approx(-s).epsilon(1e-15));

  SUBCASE("orthonormal family") {
    const std::array<BellLabel, 4> all{BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus,
                                       BellLabel::PsiMinus};
    for (BellLabel a : all)
      for (BellLabel b : all) {
        const Complex ip = bell_state(a).adjoint() * bell_state(b);
        CHECK(std::abs(ip - (a == b ? Complex{1.0, 0.0} : Complex{0.0, 0.0})) < 1e-15);
      }
  }

  SUBCASE("names") {
    CHECK(std::string(bell_label_name(BellLabel::PhiPlus)) == "phi+");
    CHECK(std::string(bell_label_name(BellLabel::PsiMinus)) == "psi-");
  }
}

TEST_CASE("trusted observable matches the pinned matrix") {
  const CMat a0 = trusted_observable().matrix;
  CMat expected = CMat::Zero(4, 4);
  expected(0, 3) = kI;
  expected(3, 0) = kI;
  expected(1, 2) = -1.0;
  expected(2, 1) = -1.0;
  CHECK(max_abs(a0 - expected) < 1e-15);

  SUBCASE("algebra: symmetric, fourth root of identity") {
    CHECK(max_abs(a0 - a0.transpose()) < 1e-15);
    CMat sq = a0 * a0;
    CMat sq_expected = CMat::Zero(4, 4);
    sq_expected(0, 0) = -1.0;
    sq_expected(1, 1) = 1.0;
    sq_expected(2, 2) = 1.0;
    sq_expected(3, 3) = -1.0;
    CHECK(max_abs(sq - sq_expected) < 1e-15);
    CHECK(max_abs(a0 * a0 * a0 * a0 - CMat::Identity(4, 4)) < 1e-15);
    CHECK(max_abs(a0 * a0.adjoint() - CMat::Identity(4, 4)) < 1e-15);
  }

  SUBCASE("eigenphase per bell vector") {
    for (BellLabel l : {BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus}) {
      const CVec v = bell_state(l);
      const Complex expected_phase = std::pow(kI, bell_eigenphase(l));
      CHECK(((a0 * v) - expected_phase * v).cwiseAbs().maxCoeff() < 1e-15);
    }
  }
}

TEST_CASE("orderings assign every label once") {
  const BellOrdering canonical = BellOrdering::canonical();
  CHECK(canonical.label(0) == BellLabel::PhiPlus);
  CHECK(canonical.label(1) == BellLabel::PhiMinus);
  CHECK(canonical.label(2) == BellLabel::PsiPlus);
  CHECK(canonical.label(3) == BellLabel::PsiMinus);

  const BellOrdering fourier = BellOrdering::fourier();
  // Outcome a carries eigenvalue i^a.
  for (int a = 0; a < 4; ++a) CHECK(fourier.eigenphase(a) == a);

  CHECK_THROWS_AS(BellOrdering({BellLabel::PhiPlus, BellLabel::PhiPlus, BellLabel::PsiPlus, BellLabel::PsiMinus}),
                  ValidationError);
}

TEST_CASE("fourier observable of the bell readout") {
  // With the eigenvalue-sorted ordering, packaging the Bell projectors with
  // phases i^a reproduces the trusted observable exactly.
  const Povm bell = bell_basis(BellOrdering::fourier());
  const Observable obs = observable_from_povm(bell, 1, 4);
  CHECK(max_abs(obs.matrix - trusted_observable().matrix) < 1e-15);
  CHECK(obs.order == 4);

  SUBCASE("k powers multiply for projective readouts") {
    const CMat a1 = observable_from_povm(bell, 1, 4).matrix;
    for (int k = 0; k < 4; ++k) {
      CMat power = CMat::Identity(4, 4);
      for (int j = 0; j < k; ++j) power = power * a1;
      CHECK(max_abs(observable_from_povm(bell, k, 4).matrix - power) < 1e-13);
    }
  }
}

TEST_CASE("bell pattern pairing lies in the support") {
  for (BellLabel l : {BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus}) {
    const int pattern = bell_pattern_index(l);
    const CVec v = bell_state(l);
    CHECK(std::abs(v(pattern)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  }
  // Bijection.
  std::array<bool, 4> seen{};
  for (BellLabel l : {BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus}) {
    seen[static_cast<std::size_t>(bell_pattern_index(l))] = true;
  }
  for (bool b : seen) CHECK(b);
}

TEST_CASE("povm validation") {
  SUBCASE("bell and computational bases are valid") {
    CHECK_NOTHROW(bell_basis(BellOrdering::canonical()));
    CHECK_NOTHROW(computational_basis_povm(4));
    CHECK_NOTHROW(computational_basis_povm(6));
  }

  SUBCASE("sum must be identity") {
    std::vector<CMat> bad{CMat::Identity(2, 2) * 0.5, CMat::Identity(2, 2) * 0.4};
    CHECK_THROWS_AS((Povm(bad)), ValidationError);
  }

  SUBCASE("elements must be positive") {
    CMat neg = CMat::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    std::vector<CMat> bad{neg, CMat::Identity(2, 2) - neg};
    CHECK_THROWS_AS((Povm(bad)), ValidationError);
  }

  SUBCASE("elements must be hermitian") {
    CMat nh = CMat::Zero(2, 2);
    nh(0, 1) = 0.3;
    std::vector<CMat> bad{nh, CMat::Identity(2, 2) - nh};
    CHECK_THROWS_AS((Povm(bad)), ValidationError);
  }

  SUBCASE("random povms pass") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 5; ++t) CHECK_NOTHROW(Povm(random_povm_elements(4, 4, rng)));
  }
}

TEST_CASE("isotropic source state") {
  SUBCASE("spectrum") {
    for (double alpha : {-1.0 / 3.0, 0.0, 0.3, 0.7, 1.0}) {
      const RVec v = hermitian_eig(werner_state(alpha).matrix()).values;
      // Branches (1+3a)/4 (x1) and (1-a)/4 (x3); eigenvalues come back descending,
      // so for a < 0 the triplet branch leads.
      const double single = (1.0 + 3.0 * alpha) / 4.0;
      const double triple = (1.0 - alpha) / 4.0;
      std::array<double, 4> expect{single, triple, triple, triple};
      std::sort(expect.begin(), expect.end(), std::greater<>());
      for (int i = 0; i < 4; ++i) CHECK(v(i) == doctest::Approx(expect[i]).epsilon(1e-12));
    }
  }

  SUBCASE("parameter range") {
    CHECK_NOTHROW(werner_state(1.0));
    CHECK_NOTHROW(werner_state(-1.0 / 3.0));
    CHECK_THROWS_AS(werner_state(1.0 + 1e-9), ValidationError);
    CHECK_THROWS_AS(werner_state(-1.0 / 3.0 - 1e-9), ValidationError);
  }

  SUBCASE("alpha one is the maximally entangled projector") {
    const CVec phi = bell_state(BellLabel::PhiPlus);
    CHECK(max_abs(werner_state(1.0).matrix() - phi * phi.adjoint()) < 1e-15);
  }
}

TEST_CASE("correlator inversion recovers probabilities") {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 20; ++t) {
    const ProbTable p = ProbTable::from_matrix(testutil::random_table(rng));
    const CMat corr = correlator_table(p);
    const RMat back = probs_from_correlators(corr, 4);
    CHECK((back - p.matrix()).cwiseAbs().maxCoeff() < 1e-14);
  }

  SUBCASE("normalization of correlators is checked") {
    const ProbTable p = ProbTable::from_matrix(testutil::random_table(rng));
    CMat corr = correlator_table(p);
    corr(0, 0) = 0.5;  // E(0,0) must be 1 for a normalized table
    CHECK_THROWS_AS(probs_from_correlators(corr, 4), ValidationError);
  }
}
