#include "swapsteer/qobj.hpp"

#include <cmath>

namespace swapsteer {

Povm::Povm(std::vector<CMat> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw ValidationError("Povm: no elements");
  const Index d = elements_.front().rows();
  CMat sum = CMat::Zero(d, d);
  for (const CMat& e : elements_) {
    if (e.rows() != d || e.cols() != d) throw ValidationError("Povm: elements must be square with equal dimensions");
    if (!is_hermitian(e, kStructuralTol)) throw ValidationError("Povm: element is not Hermitian within 1e-12");
    Eigen::SelfAdjointEigenSolver<CMat> solver((e + e.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -kStructuralTol) {
      throw ValidationError("Povm: element has an eigenvalue below -1e-12");
    }
    sum += e;
  }
  if (max_abs(sum - CMat::Identity(d, d)) > 1e-10) {
    throw ValidationError("Povm: elements do not sum to the identity within 1e-10");
  }
}

const char* bell_label_name(BellLabel l) {
  switch (l) {
    case BellLabel::PhiPlus: return "phi+";
    case BellLabel::PhiMinus: return "phi-";
    case BellLabel::PsiPlus: return "psi+";
    case BellLabel::PsiMinus: return "psi-";
  }
  throw ValidationError("bell_label_name: unknown label");
}

CVec bell_state(BellLabel l) {
  CVec v = CVec::Zero(4);
  const double r = 1.0 / std::sqrt(2.0);
  switch (l) {
    case BellLabel::PhiPlus: v(0) = r; v(3) = r; break;
    case BellLabel::PhiMinus: v(0) = r; v(3) = -r; break;
    case BellLabel::PsiPlus: v(1) = r; v(2) = r; break;
    case BellLabel::PsiMinus: v(1) = r; v(2) = -r; break;
  }
  return v;
}

int bell_eigenphase(BellLabel l) {
  switch (l) {
    case BellLabel::PhiPlus: return 1;
    case BellLabel::PsiPlus: return 2;
    case BellLabel::PhiMinus: return 3;
    case BellLabel::PsiMinus: return 0;
  }
  throw ValidationError("bell_eigenphase: unknown label");
}

int bell_pattern_index(BellLabel l) {
  switch (l) {
    case BellLabel::PhiPlus: return 0;   // |00>
    case BellLabel::PsiPlus: return 1;   // |01>
    case BellLabel::PsiMinus: return 2;  // |10>
    case BellLabel::PhiMinus: return 3;  // |11>
  }
  throw ValidationError("bell_pattern_index: unknown label");
}

BellOrdering::BellOrdering(std::array<BellLabel, 4> labels) : labels_(labels) {
  std::array<bool, 4> seen{};
  for (BellLabel l : labels_) {
    auto& flag = seen.at(static_cast<std::size_t>(l));
    if (flag) throw ValidationError("BellOrdering: labels must be a permutation of the four Bell vectors");
    flag = true;
  }
  for (int a = 0; a < 4; ++a) eigenphase_[static_cast<std::size_t>(a)] = bell_eigenphase(labels_[static_cast<std::size_t>(a)]);
}

BellOrdering BellOrdering::canonical() {
  return BellOrdering({BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus});
}

BellOrdering BellOrdering::fourier() {
  return BellOrdering({BellLabel::PsiMinus, BellLabel::PhiPlus, BellLabel::PsiPlus, BellLabel::PhiMinus});
}

Povm bell_basis(const BellOrdering& ordering) {
  std::vector<CMat> elements;
  elements.reserve(4);
  for (int a = 0; a < 4; ++a) {
    const CVec v = bell_state(ordering.label(a));
    elements.push_back(v * v.adjoint());
  }
  return Povm(std::move(elements));
}

Povm computational_basis_povm(Index dim) {
  std::vector<CMat> elements;
  elements.reserve(static_cast<std::size_t>(dim));
  for (Index b = 0; b < dim; ++b) {
    CMat e = CMat::Zero(dim, dim);
    e(b, b) = 1.0;
    elements.push_back(std::move(e));
  }
  return Povm(std::move(elements));
}

DensityOperator werner_state(double alpha) {
  if (alpha < -1.0 / 3.0 - kStructuralTol || alpha > 1.0 + kStructuralTol) {
    throw ValidationError("werner_state: alpha outside [-1/3, 1]");
  }
  const CVec phi = bell_state(BellLabel::PhiPlus);
  CMat m = alpha * (phi * phi.adjoint()).eval() + (1.0 - alpha) / 4.0 * CMat::Identity(4, 4);
  return DensityOperator((m + m.adjoint()) / 2.0);
}

Observable observable_from_povm(const Povm& p, int k, int d) {
  if (p.outcomes() != d) throw ValidationError("observable_from_povm: outcome count does not match d");
  if (k < 0 || k >= d) throw ValidationError("observable_from_povm: index k outside 0..d-1");
  const Complex omega = std::polar(1.0, 2.0 * M_PI / static_cast<double>(d));
  CMat m = CMat::Zero(p.dim(), p.dim());
  for (int a = 0; a < d; ++a) m += std::pow(omega, a * k) * p.element(a);
  return Observable{std::move(m), d, k};
}

Observable trusted_observable(const BellOrdering& ordering) {
  CMat m = CMat::Zero(4, 4);
  for (int a = 0; a < 4; ++a) {
    const CVec v = bell_state(ordering.label(a));
    m += std::pow(kI, ordering.eigenphase(a)) * (v * v.adjoint());
  }
  return Observable{std::move(m), 4, 1};
}

RMat probs_from_correlators(const CMat& correlators, int d) {
  if (d < 2) throw ValidationError("probs_from_correlators: d must be at least 2");
  if (correlators.rows() != d || correlators.cols() != d) {
    throw ValidationError("probs_from_correlators: table must be d x d");
  }
  if (std::abs(correlators(0, 0) - Complex{1.0, 0.0}) > 1e-9) {
    throw ValidationError("probs_from_correlators: entry (0,0) must equal 1");
  }
  const Complex omega = std::polar(1.0, 2.0 * M_PI / static_cast<double>(d));
  RMat out(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Complex acc{0.0, 0.0};
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) acc += std::pow(omega, -(a * k + b * l)) * correlators(k, l);
      acc /= static_cast<double>(d * d);
      if (std::abs(acc.imag()) > 1e-9) {
        throw InconsistencyError("probs_from_correlators: imaginary residue above 1e-9");
      }
      out(a, b) = acc.real();
    }
  return out;
}

}  // namespace swapsteer
