#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "swapsteer/linalg.hpp"
#include "swapsteer/network.hpp"
#include "swapsteer/random.hpp"
#include "testutil.hpp"

using namespace swapsteer;

namespace {

DensityOperator pure(const CVec& v) { return DensityOperator(v * v.adjoint()); }

CVec basis_vec(Index dim, Index k) {
  CVec v = CVec::Zero(dim);
  v(k) = 1.0;
  return v;
}

Scenario random_scenario(Index d1, Index d2, std::mt19937_64& rng) {
  std::vector<SourceComponent> comps;
  std::uniform_real_distribution<double> u(0.2, 1.0);
  double w0 = u(rng);
  double w1 = u(rng);
  const double total = w0 + w1;
  comps.push_back({w0 / total, DensityOperator(random_density_matrix(2 * d1, rng)),
                   DensityOperator(random_density_matrix(2 * d2, rng))});
  comps.push_back({w1 / total, DensityOperator(random_density_matrix(2 * d1, rng)),
                   DensityOperator(random_density_matrix(2 * d2, rng))});
  return Scenario(SourceEnsemble(std::move(comps)), Povm(random_povm_elements(4, 4, rng)),
                  Povm(random_povm_elements(d1 * d2, 4, rng)));
}

}  // namespace

TEST_CASE("source ensemble joins factors in the measured order") {
  // rho1 = |01><01| on A1 B1, rho2 = |10><10| on A2 B2.  After regrouping to
  // A1 A2 B1 B2 the only populated basis state is |0 1 1 0>, index 6.
  const CVec a1b1 = kron(basis_vec(2, 0), basis_vec(2, 1));
  const CVec a2b2 = kron(basis_vec(2, 1), basis_vec(2, 0));
  SourceEnsemble ensemble({{1.0, pure(a1b1), pure(a2b2)}});
  const CMat joint = ensemble.joint_state();
  REQUIRE(joint.rows() == 16);
  CHECK(std::abs(joint(6, 6) - 1.0) < 1e-15);
  CHECK(std::abs(joint.trace() - 1.0) < 1e-14);
  CHECK(max_abs(joint - CVec::Unit(16, 6) * CVec::Unit(16, 6).adjoint()) < 1e-15);

  SUBCASE("weights must form a distribution") {
    CHECK_THROWS_AS(SourceEnsemble({{0.7, pure(a1b1), pure(a2b2)}}), ValidationError);
    CHECK_THROWS_AS(SourceEnsemble({{-0.2, pure(a1b1), pure(a2b2)}, {1.2, pure(a1b1), pure(a2b2)}}),
                    ValidationError);
  }

  SUBCASE("component dimensions must agree") {
    const CVec wide = kron(basis_vec(2, 0), basis_vec(3, 1));
    CHECK_THROWS_AS(SourceEnsemble({{0.5, pure(a1b1), pure(a2b2)}, {0.5, pure(wide), pure(a2b2)}}),
                    ValidationError);
  }
}

TEST_CASE("joint probabilities match an element-by-element contraction") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 6; ++trial) {
    const Index d1 = (trial % 2 == 0) ? 2 : 3;
    const Index d2 = (trial % 3 == 0) ? 2 : 1;
    const Scenario s = random_scenario(d1, d2, rng);
    const ProbTable p = joint_probability(s);
    double total = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        CHECK(p.p(a, b) == doctest::Approx(testutil::direct_probability(s, a, b)).epsilon(1e-12));
        total += p.p(a, b);
      }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("ideal realization gives the flat diagonal table") {
  for (const BellOrdering& ordering : {BellOrdering::canonical(), BellOrdering::fourier()}) {
    const Scenario s = ideal_scenario(ordering);
    const ProbTable p = joint_probability(s);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const double expected = (a == b) ? 0.25 : 0.0;
        CHECK(std::abs(p.p(a, b) - expected) < 1e-12);
        CHECK(std::abs(testutil::direct_probability(s, a, b) - expected) < 1e-12);
      }
    CHECK(std::abs(witness_value(p) - 1.0) < 1e-12);
    CHECK(std::abs(witness_value_correlator_form(p) - 1.0) < 1e-12);
  }
}

TEST_CASE("classical saturating realization reaches one half") {
  for (const BellOrdering& ordering : {BellOrdering::canonical(), BellOrdering::fourier()}) {
    const Scenario s = saturating_scenario(ordering);
    const ProbTable p = joint_probability(s);
    CHECK(std::abs(witness_value(p) - 0.5) < 1e-12);
    CHECK(std::abs(witness_value_correlator_form(p) - 0.5) < 1e-12);
    // Diagonal entries are 1/8 each: Bob pins the classical pattern, and the
    // matching Bell projector catches it with probability 1/2.
    for (int a = 0; a < 4; ++a) CHECK(p.p(a, a) == doctest::Approx(0.125).epsilon(1e-12));
  }
}

TEST_CASE("two-parameter isotropic family traces the analytic witness") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    const double a1 = u(rng);
    const double a2 = u(rng);
    const Scenario s = werner_scenario(a1, a2);
    const ProbTable p = joint_probability(s);
    const double expected = (3.0 * a1 * a2 + 1.0) / 4.0;
    CHECK(witness_value(p) == doctest::Approx(expected).epsilon(1e-12));
    // Independent contraction at a probed entry.
    CHECK(p.p(0, 0) == doctest::Approx(testutil::direct_probability(s, 0, 0)).epsilon(1e-12));
  }

  SUBCASE("corners") {
    CHECK(witness_value(joint_probability(werner_scenario(1.0, 1.0))) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(witness_value(joint_probability(werner_scenario(0.0, 0.0))) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(witness_value(joint_probability(werner_scenario(0.5, 0.5))) == doctest::Approx(0.4375).epsilon(1e-12));
  }
}

TEST_CASE("prob table validation") {
  Eigen::Matrix4d flat = Eigen::Matrix4d::Constant(1.0 / 16.0);

  SUBCASE("well formed") {
    const ProbTable p = ProbTable::from_matrix(flat);
    // min_raw_entry diagnoses negativity before clipping: 0 when nothing was negative.
    CHECK(p.min_raw_entry() == 0.0);
    CHECK(witness_value(p) == doctest::Approx(0.25).epsilon(1e-15));
  }

  SUBCASE("tiny negative noise is clipped, large rejected") {
    Eigen::Matrix4d noisy = flat;
    noisy(2, 3) = -5e-13;
    noisy(0, 0) += 1.0 / 16.0 + 5e-13;
    const ProbTable p = ProbTable::from_matrix(noisy);
    CHECK(p.p(2, 3) == 0.0);
    CHECK(p.min_raw_entry() == doctest::Approx(-5e-13).epsilon(1e-3));

    Eigen::Matrix4d bad = flat;
    bad(2, 3) = -1e-6;
    bad(0, 0) += 1.0 / 16.0 + 1e-6;
    CHECK_THROWS_AS(ProbTable::from_matrix(bad), ValidationError);
  }

  SUBCASE("normalization enforced") {
    CHECK_THROWS_AS(ProbTable::from_matrix(flat * 1.001), ValidationError);
  }
}

TEST_CASE("both witness forms agree on arbitrary tables") {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 25; ++t) {
    const ProbTable p = ProbTable::from_matrix(testutil::random_table(rng));
    CHECK(std::abs(witness_value(p) - witness_value_correlator_form(p)) < 1e-12);
  }
}

TEST_CASE("correlator table basics") {
  const ProbTable ideal = joint_probability(ideal_scenario());
  const CMat corr = correlator_table(ideal);
  CHECK(std::abs(corr(0, 0) - 1.0) < 1e-12);
  // Every correlator of the flat diagonal table with k + l = 0 mod 4 equals 1.
  for (int k = 0; k < 4; ++k) {
    CHECK(std::abs(correlator(ideal, k, (4 - k) % 4) - Complex{1.0, 0.0}) < 1e-12);
  }
}
