#pragma once

#include <vector>

#include "swapsteer/network.hpp"

namespace swapsteer {

// Alice's conditional (unnormalized) states given Bob's outcome:
// sigma_b = Tr_B[(1_A x N_b) rho], with sum_b Tr(sigma_b) = 1.
class Assemblage {
 public:
  explicit Assemblage(std::vector<CMat> sigmas);
  int outcomes() const { return static_cast<int>(sigmas_.size()); }
  Index dim() const { return sigmas_.front().rows(); }
  const CMat& sigma(int b) const { return sigmas_.at(static_cast<std::size_t>(b)); }

 private:
  std::vector<CMat> sigmas_;
};

Assemblage compute_assemblage(const Scenario& s);

// Largest absolute entry-wise deviation between two assemblages.
double verify_same_assemblage(const Assemblage& x, const Assemblage& y);

// Assemblage that factorizes across Bob's outcome pair (b1, b2):
// sigma_{b1 b2} = sum_j sigma1[j][b1] x sigma2[j][b2], each factor a
// positive 2x2 block on the matching Alice qubit.
struct ProductTerm {
  std::vector<CMat> sigma1;  // indexed by b1, 2x2
  std::vector<CMat> sigma2;  // indexed by b2, 2x2
};
class ProductAssemblage {
 public:
  ProductAssemblage(int n1, int n2, std::vector<ProductTerm> terms);
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  const std::vector<ProductTerm>& terms() const { return terms_; }

 private:
  int n1_, n2_;
  std::vector<ProductTerm> terms_;
};

// Flatten to a plain assemblage with outcome index b = b1*n2 + b2.
Assemblage assemblage_from_product(const ProductAssemblage& pa);

// Product assemblage of an ensemble measured with a product POVM
// {K_{b1} x L_{b2}}; one term per classical source branch.
ProductAssemblage product_assemblage_from_scenario(const SourceEnsemble& ensemble, const std::vector<CMat>& bob1,
                                                   const std::vector<CMat>& bob2);

// Separable-sources realization reproducing a product assemblage: each term
// becomes a classical branch whose Bob factors store the term's outcome
// blocks as flag registers, and Bob simply reads the flags.  Its witness
// value therefore obeys the 1/2 bound.
struct SohsRealization {
  SourceEnsemble ensemble;
  Povm bob;
};
SohsRealization sohs_from_product_assemblage(const ProductAssemblage& pa);

}  // namespace swapsteer
