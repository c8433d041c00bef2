#include "swapsteer/assemblage.hpp"

#include <cmath>

namespace swapsteer {

namespace {

void check_positive_block(const CMat& m, Index dim, const char* what) {
  if (m.rows() != dim || m.cols() != dim) throw ValidationError(std::string(what) + ": wrong block dimension");
  if (!is_hermitian(m, kStructuralTol)) throw ValidationError(std::string(what) + ": block is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> solver((m + m.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kStructuralTol) {
    throw ValidationError(std::string(what) + ": block has an eigenvalue below -1e-12");
  }
}

}  // namespace

Assemblage::Assemblage(std::vector<CMat> sigmas) : sigmas_(std::move(sigmas)) {
  if (sigmas_.empty()) throw ValidationError("Assemblage: no outcomes");
  const Index d = sigmas_.front().rows();
  double total = 0.0;
  for (const CMat& s : sigmas_) {
    check_positive_block(s, d, "Assemblage");
    total += s.trace().real();
  }
  if (std::abs(total - 1.0) > kStructuralTol) {
    throw ValidationError("Assemblage: traces do not sum to 1 within 1e-12");
  }
}

Assemblage compute_assemblage(const Scenario& s) {
  const CMat rho = s.ensemble().joint_state();
  const SubsystemShape shape({2, 2, s.ensemble().dim_b1(), s.ensemble().dim_b2()});
  std::vector<CMat> sigmas;
  sigmas.reserve(4);
  for (int b = 0; b < 4; ++b) {
    const CMat weighted = kron(CMat::Identity(4, 4), s.bob().element(b)) * rho;
    CMat sigma = partial_trace(weighted, shape, {0, 1});
    sigmas.push_back(((sigma + sigma.adjoint()) / 2.0).eval());
  }
  return Assemblage(std::move(sigmas));
}

double verify_same_assemblage(const Assemblage& x, const Assemblage& y) {
  if (x.outcomes() != y.outcomes() || x.dim() != y.dim()) {
    throw ValidationError("verify_same_assemblage: shape mismatch");
  }
  double dev = 0.0;
  for (int b = 0; b < x.outcomes(); ++b) dev = std::max(dev, max_abs(x.sigma(b) - y.sigma(b)));
  return dev;
}

ProductAssemblage::ProductAssemblage(int n1, int n2, std::vector<ProductTerm> terms)
    : n1_(n1), n2_(n2), terms_(std::move(terms)) {
  if (n1_ < 1 || n2_ < 1) throw ValidationError("ProductAssemblage: outcome counts must be positive");
  if (terms_.empty()) throw ValidationError("ProductAssemblage: no terms");
  for (const ProductTerm& t : terms_) {
    if (static_cast<int>(t.sigma1.size()) != n1_ || static_cast<int>(t.sigma2.size()) != n2_) {
      throw ValidationError("ProductAssemblage: term outcome counts do not match (n1, n2)");
    }
    for (const CMat& m : t.sigma1) check_positive_block(m, 2, "ProductAssemblage");
    for (const CMat& m : t.sigma2) check_positive_block(m, 2, "ProductAssemblage");
  }
}

Assemblage assemblage_from_product(const ProductAssemblage& pa) {
  std::vector<CMat> sigmas(static_cast<std::size_t>(pa.n1() * pa.n2()), CMat::Zero(4, 4));
  for (const ProductTerm& t : pa.terms()) {
    for (int b1 = 0; b1 < pa.n1(); ++b1)
      for (int b2 = 0; b2 < pa.n2(); ++b2) {
        sigmas[static_cast<std::size_t>(b1 * pa.n2() + b2)] +=
            kron(t.sigma1[static_cast<std::size_t>(b1)], t.sigma2[static_cast<std::size_t>(b2)]);
      }
  }
  return Assemblage(std::move(sigmas));
}

ProductAssemblage product_assemblage_from_scenario(const SourceEnsemble& ensemble, const std::vector<CMat>& bob1,
                                                   const std::vector<CMat>& bob2) {
  const Index d1 = ensemble.dim_b1();
  const Index d2 = ensemble.dim_b2();
  CMat sum1 = CMat::Zero(d1, d1), sum2 = CMat::Zero(d2, d2);
  for (const CMat& k : bob1) {
    check_positive_block(k, d1, "product_assemblage_from_scenario (source-1 POVM)");
    sum1 += k;
  }
  for (const CMat& l : bob2) {
    check_positive_block(l, d2, "product_assemblage_from_scenario (source-2 POVM)");
    sum2 += l;
  }
  if (max_abs(sum1 - CMat::Identity(d1, d1)) > 1e-10 || max_abs(sum2 - CMat::Identity(d2, d2)) > 1e-10) {
    throw ValidationError("product_assemblage_from_scenario: factor POVMs do not sum to the identity");
  }

  const SubsystemShape shape1({2, d1});
  const SubsystemShape shape2({2, d2});
  std::vector<ProductTerm> terms;
  for (const SourceComponent& c : ensemble.components()) {
    ProductTerm t;
    for (const CMat& k : bob1) {
      // Component weight rides on the source-1 factor so the term product is
      // exactly w_j sigma1 x sigma2.
      CMat s = c.weight * partial_trace(kron(CMat::Identity(2, 2), k) * c.rho1.matrix(), shape1, {0});
      t.sigma1.push_back(((s + s.adjoint()) / 2.0).eval());
    }
    for (const CMat& l : bob2) {
      CMat s = partial_trace(kron(CMat::Identity(2, 2), l) * c.rho2.matrix(), shape2, {0});
      t.sigma2.push_back(((s + s.adjoint()) / 2.0).eval());
    }
    terms.push_back(std::move(t));
  }
  return ProductAssemblage(static_cast<int>(bob1.size()), static_cast<int>(bob2.size()), std::move(terms));
}

SohsRealization sohs_from_product_assemblage(const ProductAssemblage& pa) {
  std::vector<SourceComponent> components;
  for (std::size_t j = 0; j < pa.terms().size(); ++j) {
    const ProductTerm& t = pa.terms()[j];
    double norm1 = 0.0, norm2 = 0.0;
    for (const CMat& m : t.sigma1) norm1 += m.trace().real();
    for (const CMat& m : t.sigma2) norm2 += m.trace().real();
    if (norm1 <= kStructuralTol || norm2 <= kStructuralTol) {
      throw ValidationError("sohs_from_product_assemblage: degenerate zero-weight term");
    }
    // Flag construction: each source ships its outcome block on the Alice
    // qubit and the outcome label on a flag register Bob will read.
    CMat rho1 = CMat::Zero(2 * pa.n1(), 2 * pa.n1());
    CMat rho2 = CMat::Zero(2 * pa.n2(), 2 * pa.n2());
    for (int b1 = 0; b1 < pa.n1(); ++b1) {
      CMat flag = CMat::Zero(pa.n1(), pa.n1());
      flag(b1, b1) = 1.0;
      rho1 += kron(t.sigma1[static_cast<std::size_t>(b1)], flag) / norm1;
    }
    for (int b2 = 0; b2 < pa.n2(); ++b2) {
      CMat flag = CMat::Zero(pa.n2(), pa.n2());
      flag(b2, b2) = 1.0;
      rho2 += kron(t.sigma2[static_cast<std::size_t>(b2)], flag) / norm2;
    }
    components.push_back(SourceComponent{norm1 * norm2, DensityOperator((rho1 + rho1.adjoint()) / 2.0),
                                         DensityOperator((rho2 + rho2.adjoint()) / 2.0)});
  }

  // Bob reads the two flags: outcome (b1, b2) -> b1*n2 + b2.
  const Index db = static_cast<Index>(pa.n1()) * static_cast<Index>(pa.n2());
  std::vector<CMat> bob;
  for (int b1 = 0; b1 < pa.n1(); ++b1)
    for (int b2 = 0; b2 < pa.n2(); ++b2) {
      CMat e = CMat::Zero(db, db);
      e(b1 * pa.n2() + b2, b1 * pa.n2() + b2) = 1.0;
      bob.push_back(std::move(e));
    }
  return SohsRealization{SourceEnsemble(std::move(components)), Povm(std::move(bob))};
}

}  // namespace swapsteer
