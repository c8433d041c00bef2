#include "swapsteer/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace swapsteer {

NelderMeadResult nelder_mead(const std::function<double(const RVec&)>& f, const RVec& x0, double radius,
                             int max_iters, double step_tol) {
  const int n = static_cast<int>(x0.size());
  if (n < 1) throw ValidationError("nelder_mead: empty parameter vector");
  if (!(radius > 0.0)) throw ValidationError("nelder_mead: radius must be positive");

  std::vector<RVec> xs(static_cast<std::size_t>(n) + 1, x0);
  std::vector<double> fs(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i) + 1](i) += radius;
  for (std::size_t i = 0; i < xs.size(); ++i) fs[i] = f(xs[i]);

  std::vector<int> order(xs.size());
  NelderMeadResult result;
  int iter = 0;
  for (; iter < max_iters; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return fs[static_cast<std::size_t>(a)] < fs[static_cast<std::size_t>(b)]; });
    const int best = order.front();
    const int worst = order.back();
    const int second_worst = order[order.size() - 2];

    double diameter = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      diameter = std::max(diameter, (xs[i] - xs[static_cast<std::size_t>(best)]).cwiseAbs().maxCoeff());
    }
    if (diameter < step_tol) {
      result.converged = true;
      break;
    }

    RVec centroid = RVec::Zero(n);
    for (int i : order) {
      if (i != worst) centroid += xs[static_cast<std::size_t>(i)];
    }
    centroid /= static_cast<double>(n);

    const RVec xw = xs[static_cast<std::size_t>(worst)];
    const RVec xr = centroid + (centroid - xw);
    const double fr = f(xr);
    if (fr < fs[static_cast<std::size_t>(best)]) {
      const RVec xe = centroid + 2.0 * (centroid - xw);
      const double fe = f(xe);
      if (fe < fr) {
        xs[static_cast<std::size_t>(worst)] = xe;
        fs[static_cast<std::size_t>(worst)] = fe;
      } else {
        xs[static_cast<std::size_t>(worst)] = xr;
        fs[static_cast<std::size_t>(worst)] = fr;
      }
    } else if (fr < fs[static_cast<std::size_t>(second_worst)]) {
      xs[static_cast<std::size_t>(worst)] = xr;
      fs[static_cast<std::size_t>(worst)] = fr;
    } else {
      const bool outside = fr < fs[static_cast<std::size_t>(worst)];
      const RVec xc = outside ? centroid + 0.5 * (xr - centroid) : centroid + 0.5 * (xw - centroid);
      const double fc = f(xc);
      if (fc < (outside ? fr : fs[static_cast<std::size_t>(worst)])) {
        xs[static_cast<std::size_t>(worst)] = xc;
        fs[static_cast<std::size_t>(worst)] = fc;
      } else {
        for (std::size_t i = 0; i < xs.size(); ++i) {  // shrink toward the best vertex
          if (static_cast<int>(i) == best) continue;
          xs[i] = xs[static_cast<std::size_t>(best)] + 0.5 * (xs[i] - xs[static_cast<std::size_t>(best)]);
          fs[i] = f(xs[i]);
        }
      }
    }
  }

  const std::size_t best = static_cast<std::size_t>(
      std::min_element(fs.begin(), fs.end()) - fs.begin());
  result.x = xs[best];
  result.value = fs[best];
  result.iterations = iter;
  return result;
}

NelderMeadResult nelder_mead_polished(const std::function<double(const RVec&)>& f, const RVec& x0, double radius,
                                      int max_iters, double step_tol) {
  NelderMeadResult first = nelder_mead(f, x0, radius, max_iters, step_tol);
  NelderMeadResult second = nelder_mead(f, first.x, radius * 1e-2, max_iters, step_tol);
  second.iterations += first.iterations;
  if (first.value < second.value) {
    second.x = first.x;
    second.value = first.value;
  }
  return second;
}

}  // namespace swapsteer
