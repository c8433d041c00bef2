#pragma once

#include <vector>

#include "swapsteer/types.hpp"

namespace swapsteer {

// Dimensions of a tensor-product space.  Subsystem 0 is the most significant
// digit of the composite index: |i0 i1 ... i{n-1}> sits at row
// i0*d1*...*d{n-1} + i1*d2*...*d{n-1} + ... + i{n-1}.
class SubsystemShape {
 public:
  explicit SubsystemShape(std::vector<Index> dims);
  Index count() const { return static_cast<Index>(dims_.size()); }
  Index dim(Index k) const { return dims_.at(static_cast<std::size_t>(k)); }
  Index total() const { return total_; }
  const std::vector<Index>& dims() const { return dims_; }

 private:
  std::vector<Index> dims_;
  Index total_;
};

double max_abs(const CMat& m);
bool is_hermitian(const CMat& m, double tol = kStructuralTol);

// Kronecker products with subsystem 0 on the left (most significant).
CMat kron(const CMat& a, const CMat& b);
CVec kron(const CVec& a, const CVec& b);

// Trace out every subsystem not listed in `keep`.  `keep` must be strictly
// ascending; the kept subsystems retain their relative order.
CMat partial_trace(const CMat& m, const SubsystemShape& shape, const std::vector<int>& keep);

// Reorder tensor factors.  `perm[k]` names the input subsystem that lands in
// output slot k, so the output shape is (dims[perm[0]], ..., dims[perm[n-1]]).
CVec permute_subsystems(const CVec& v, const SubsystemShape& shape, const std::vector<int>& perm);
CMat permute_subsystems(const CMat& m, const SubsystemShape& shape, const std::vector<int>& perm);

// Eigendecomposition of a Hermitian matrix, eigenvalues descending.  Each
// eigenvector is rephased so its largest-magnitude entry (lowest index on
// ties) is real and positive, which makes the output deterministic away from
// degeneracies.  Rejects input whose anti-Hermitian part exceeds 1e-10.
struct HermitianEig {
  RVec values;
  CMat vectors;  // column k pairs with values[k]
};
HermitianEig hermitian_eig(const CMat& h);

// Schmidt decomposition of a bipartite pure state:
//   psi = sum_k coefficients[k] * kron(left.col(k), right.col(k)),
// coefficients descending.  Columns are rephased the same way as in
// hermitian_eig (phase pushed onto `right` so the reconstruction is exact).
struct SchmidtDecomposition {
  RVec coefficients;
  CMat left;   // dim_a x r
  CMat right;  // dim_b x r
};
SchmidtDecomposition schmidt_decompose(const CVec& psi, Index dim_a, Index dim_b);

// Validated density operator: Hermitian, unit trace, eigenvalues >= -1e-12.
class DensityOperator {
 public:
  explicit DensityOperator(CMat m);
  const CMat& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }

 private:
  CMat m_;
};

// Smallest eigenvalue of the partial transpose on the second tensor factor.
// Negative values witness entanglement across the cut.
double ppt_min_eigenvalue(const CMat& rho, Index dim_a, Index dim_b);
double ppt_min_eigenvalue(const DensityOperator& rho);  // 2x2 split of a two-qubit state

// Distance min over a global phase of ||u - e^{i t} v||_max; zero when the two
// unitaries agree up to phase.
double phase_aligned_distance(const CMat& u, const CMat& v);

CVec normalized_or_throw(CVec v, const char* what);

}  // namespace swapsteer
