#pragma once

#include <cstdint>
#include <functional>

#include "swapsteer/types.hpp"

namespace swapsteer {

// Shared knobs for every multistart search in the library.
struct OptimizerConfig {
  int restarts = 100;
  int max_iters = 400;        // per Nelder-Mead run
  double step_tol = 1e-9;     // simplex diameter at convergence
  double spread_tol = 1e-6;   // max allowed disagreement between restart optima
  double constraint_tol = 1e-9;  // feasibility threshold for constrained searches
  std::uint64_t seed = 0x5eed5eed5eed5eedULL;
};

struct NelderMeadResult {
  RVec x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Derivative-free simplex minimizer (reflect 1, expand 2, contract 1/2,
// shrink 1/2).  Deterministic given x0/radius.  Stops when the simplex
// diameter drops below step_tol or max_iters is hit.
NelderMeadResult nelder_mead(const std::function<double(const RVec&)>& f, const RVec& x0, double radius,
                             int max_iters, double step_tol);

// Two-stage run: a full search followed by a restarted polish around the
// found optimum with a tighter simplex, which reliably finishes ridge
// landscapes the single pass stalls on.
NelderMeadResult nelder_mead_polished(const std::function<double(const RVec&)>& f, const RVec& x0, double radius,
                                      int max_iters, double step_tol);

}  // namespace swapsteer
