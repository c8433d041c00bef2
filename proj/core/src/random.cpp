#include "swapsteer/random.hpp"

#include "swapsteer/linalg.hpp"

namespace swapsteer {

CMat ginibre(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMat g(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) g(i, j) = Complex{gauss(rng), gauss(rng)};
  return g;
}

CMat random_unitary(Index n, std::mt19937_64& rng) {
  const CMat g = ginibre(n, n, rng);
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  const CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the column phases so the distribution is Haar rather than QR-biased.
  for (Index k = 0; k < n; ++k) {
    const Complex d = r(k, k);
    q.col(k) *= (std::abs(d) > 0.0) ? d / std::abs(d) : Complex{1.0, 0.0};
  }
  return q;
}

CVec random_pure_state(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVec v(n);
  for (Index i = 0; i < n; ++i) v(i) = Complex{gauss(rng), gauss(rng)};
  return v / v.norm();
}

CMat random_density_matrix(Index n, std::mt19937_64& rng) {
  const CMat g = ginibre(n, n, rng);
  CMat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return (rho + rho.adjoint()) / 2.0;
}

std::vector<CMat> random_povm_elements(Index dim, int outcomes, std::mt19937_64& rng) {
  std::vector<CMat> raw;
  raw.reserve(static_cast<std::size_t>(outcomes));
  CMat sum = CMat::Zero(dim, dim);
  for (int b = 0; b < outcomes; ++b) {
    const CMat g = ginibre(dim, dim, rng);
    raw.push_back(g * g.adjoint());
    sum += raw.back();
  }
  Eigen::SelfAdjointEigenSolver<CMat> solver(sum);
  const CMat s_inv_sqrt = solver.operatorInverseSqrt();
  std::vector<CMat> out;
  out.reserve(raw.size());
  for (const CMat& e : raw) {
    CMat el = s_inv_sqrt * e * s_inv_sqrt;
    out.push_back((el + el.adjoint()) / 2.0);
  }
  return out;
}

Eigen::Matrix4d random_prob_matrix(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Eigen::Matrix4d p;
  double total = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      p(a, b) = uni(rng);
      total += p(a, b);
    }
  return p / total;
}

}  // namespace swapsteer
