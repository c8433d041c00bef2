#pragma once

#include <random>

#include "swapsteer/types.hpp"

namespace swapsteer {

class Povm;  // qobj.hpp

// Deterministic sampling helpers; all draw from a caller-owned mt19937_64 so
// every pipeline is reproducible from a single 64-bit seed.

CMat ginibre(Index rows, Index cols, std::mt19937_64& rng);
CMat random_unitary(Index n, std::mt19937_64& rng);  // Haar, via QR of a Ginibre matrix
CVec random_pure_state(Index n, std::mt19937_64& rng);
CMat random_density_matrix(Index n, std::mt19937_64& rng);
// General POVM: S^{-1/2} G_b G_b^+ S^{-1/2} with Ginibre G_b and S the sum.
std::vector<CMat> random_povm_elements(Index dim, int outcomes, std::mt19937_64& rng);
// 4x4 table of nonnegative entries summing to one.
Eigen::Matrix4d random_prob_matrix(std::mt19937_64& rng);

}  // namespace swapsteer
