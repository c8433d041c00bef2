// Microbenchmarks for the library's hot paths.  Each case fixes its inputs
// outside the timing loop so only the operation under study is measured.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "swapsteer/assemblage.hpp"
#include "swapsteer/linalg.hpp"
#include "swapsteer/network.hpp"
#include "swapsteer/optimize.hpp"
#include "swapsteer/qobj.hpp"
#include "swapsteer/random.hpp"
#include "swapsteer/selftest.hpp"
#include "swapsteer/sohs.hpp"

namespace {

using namespace swapsteer;

// Probability table from the two-singlet scenario: one 16x16 joint state,
// sixteen effect contractions.
void bm_joint_probability_ideal(benchmark::State& state) {
  const Scenario s = ideal_scenario();
  for (auto _ : state) {
    benchmark::DoNotOptimize(joint_probability(s));
  }
}
BENCHMARK(bm_joint_probability_ideal);

// Same contraction with auxiliary dimensions on Bob's side (64x64 joint
// state), the shape the self-test feeds through realization_prob_table.
void bm_joint_probability_disguised(benchmark::State& state) {
  std::mt19937_64 rng(7);
  const Realization r = disguised_ideal_realization(2, 1, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(realization_prob_table(r));
  }
}
BENCHMARK(bm_joint_probability_disguised);

// Tensor-factor reordering of a 64x64 density matrix (three qubits + one
// four-level system), the workhorse behind every joint-state assembly.
void bm_permute_subsystems(benchmark::State& state) {
  std::mt19937_64 rng(11);
  const CMat rho = random_density_matrix(64, rng);
  const SubsystemShape shape({2, 2, 2, 8});
  const std::vector<int> perm{0, 2, 1, 3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(permute_subsystems(rho, shape, perm));
  }
}
BENCHMARK(bm_permute_subsystems);

// Partial trace of the same 64x64 matrix down to one qubit.
void bm_partial_trace(benchmark::State& state) {
  std::mt19937_64 rng(13);
  const CMat rho = random_density_matrix(64, rng);
  const SubsystemShape shape({2, 2, 2, 8});
  for (auto _ : state) {
    benchmark::DoNotOptimize(partial_trace(rho, shape, {1}));
  }
}
BENCHMARK(bm_partial_trace);

// One evaluation of a classical model's probability table; this sits in the
// inner loop of the bound search.
void bm_sohs_table(benchmark::State& state) {
  const SOHSModel m = saturating_sohs_model();
  const Povm alice = bell_basis(BellOrdering::canonical());
  for (auto _ : state) {
    benchmark::DoNotOptimize(sohs_prob_table(m, alice));
  }
}
BENCHMARK(bm_sohs_table);

// A single restart of the classical-bound search (simplex descent over
// product-state angles and deterministic responses).
void bm_sohs_bound_one_restart(benchmark::State& state) {
  const Povm alice = bell_basis(BellOrdering::canonical());
  OptimizerConfig cfg;
  cfg.restarts = 1;
  cfg.spread_tol = 1.0;  // single restart, spread is vacuous
  for (auto _ : state) {
    benchmark::DoNotOptimize(sohs_bound_optimize(alice, cfg));
  }
}
BENCHMARK(bm_sohs_bound_one_restart);

// Conditional-state assemblage for the ideal scenario.
void bm_compute_assemblage(benchmark::State& state) {
  const Scenario s = ideal_scenario();
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_assemblage(s));
  }
}
BENCHMARK(bm_compute_assemblage);

// Correlator-form witness: Fourier transform of the table and back.
void bm_witness_correlator_form(benchmark::State& state) {
  const ProbTable p = joint_probability(ideal_scenario());
  for (auto _ : state) {
    benchmark::DoNotOptimize(witness_value_correlator_form(p));
  }
}
BENCHMARK(bm_witness_correlator_form);

// Full extraction pipeline on a disguised maximally-violating model:
// operator-identity residuals, unitary recovery, fidelity, commutant check.
void bm_extract_local_unitaries(benchmark::State& state) {
  std::mt19937_64 rng(17);
  const Realization r = disguised_ideal_realization(2, 1, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_local_unitaries(r));
  }
}
BENCHMARK(bm_extract_local_unitaries);

}  // namespace

BENCHMARK_MAIN();
