#include "swapsteer/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace swapsteer {

namespace {

// Row-index lookup table for a subsystem permutation: map[i_out] = i_in.
std::vector<Index> permutation_index_map(const SubsystemShape& shape, const std::vector<int>& perm) {
  const Index n = shape.count();
  if (static_cast<Index>(perm.size()) != n) {
    throw ValidationError("permute_subsystems: permutation length does not match subsystem count");
  }
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int p : perm) {
    if (p < 0 || p >= n || seen[static_cast<std::size_t>(p)]) {
      throw ValidationError("permute_subsystems: perm is not a permutation of 0..n-1");
    }
    seen[static_cast<std::size_t>(p)] = true;
  }

  std::vector<Index> in_stride(static_cast<std::size_t>(n));
  Index s = 1;
  for (Index k = n - 1; k >= 0; --k) {
    in_stride[static_cast<std::size_t>(k)] = s;
    s *= shape.dim(k);
  }
  std::vector<Index> out_dims(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) out_dims[static_cast<std::size_t>(k)] = shape.dim(perm[static_cast<std::size_t>(k)]);

  const Index total = shape.total();
  std::vector<Index> map(static_cast<std::size_t>(total));
  for (Index idx = 0; idx < total; ++idx) {
    Index rem = idx;
    Index in_idx = 0;
    for (Index k = n - 1; k >= 0; --k) {
      const Index digit = rem % out_dims[static_cast<std::size_t>(k)];
      rem /= out_dims[static_cast<std::size_t>(k)];
      in_idx += digit * in_stride[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
    }
    map[static_cast<std::size_t>(idx)] = in_idx;
  }
  return map;
}

// Rephase each column so its largest-magnitude entry (lowest index on ties)
// becomes real positive.  Returns the applied phases so callers can
// compensate on a partner matrix.
std::vector<Complex> fix_column_phases(CMat& v) {
  std::vector<Complex> phases(static_cast<std::size_t>(v.cols()), Complex{1.0, 0.0});
  for (Index c = 0; c < v.cols(); ++c) {
    Index arg = 0;
    double best = -1.0;
    for (Index r = 0; r < v.rows(); ++r) {
      const double a = std::abs(v(r, c));
      if (a > best) {
        best = a;
        arg = r;
      }
    }
    if (best <= 0.0) continue;
    const Complex phase = v(arg, c) / best;
    v.col(c) *= std::conj(phase);
    phases[static_cast<std::size_t>(c)] = phase;
  }
  return phases;
}

}  // namespace

SubsystemShape::SubsystemShape(std::vector<Index> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw ValidationError("SubsystemShape: empty dimension list");
  total_ = 1;
  for (Index d : dims_) {
    if (d < 1) throw ValidationError("SubsystemShape: dimensions must be positive");
    total_ *= d;
  }
}

double max_abs(const CMat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool is_hermitian(const CMat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= tol;
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CVec kron(const CVec& a, const CVec& b) {
  CVec out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

CMat partial_trace(const CMat& m, const SubsystemShape& shape, const std::vector<int>& keep) {
  if (m.rows() != m.cols()) throw ValidationError("partial_trace: matrix must be square");
  if (m.rows() != shape.total()) throw ValidationError("partial_trace: matrix dimension does not match shape");
  const Index n = shape.count();
  for (std::size_t k = 0; k + 1 < keep.size(); ++k) {
    if (keep[k] >= keep[k + 1]) throw ValidationError("partial_trace: keep indices must be strictly ascending");
  }
  for (int k : keep) {
    if (k < 0 || k >= n) throw ValidationError("partial_trace: keep index out of range");
  }

  std::vector<Index> stride(static_cast<std::size_t>(n));
  Index s = 1;
  for (Index k = n - 1; k >= 0; --k) {
    stride[static_cast<std::size_t>(k)] = s;
    s *= shape.dim(k);
  }
  std::vector<int> traced;
  for (int k = 0; k < n; ++k) {
    if (!std::binary_search(keep.begin(), keep.end(), k)) traced.push_back(k);
  }

  // Composite offsets for every kept and every traced multi-index.
  auto offsets = [&](const std::vector<int>& subs) {
    Index count = 1;
    for (int k : subs) count *= shape.dim(k);
    std::vector<Index> off(static_cast<std::size_t>(count));
    for (Index idx = 0; idx < count; ++idx) {
      Index rem = idx, o = 0;
      for (auto it = subs.rbegin(); it != subs.rend(); ++it) {
        const Index d = shape.dim(*it);
        o += (rem % d) * stride[static_cast<std::size_t>(*it)];
        rem /= d;
      }
      off[static_cast<std::size_t>(idx)] = o;
    }
    return off;
  };
  const std::vector<Index> kept_off = offsets(keep);
  const std::vector<Index> traced_off = offsets(traced);

  const Index dk = static_cast<Index>(kept_off.size());
  CMat out = CMat::Zero(dk, dk);
  for (Index i = 0; i < dk; ++i)
    for (Index j = 0; j < dk; ++j) {
      Complex acc{0.0, 0.0};
      for (Index t_off : traced_off) acc += m(kept_off[static_cast<std::size_t>(i)] + t_off, kept_off[static_cast<std::size_t>(j)] + t_off);
      out(i, j) = acc;
    }
  return out;
}

CVec permute_subsystems(const CVec& v, const SubsystemShape& shape, const std::vector<int>& perm) {
  if (v.size() != shape.total()) throw ValidationError("permute_subsystems: vector length does not match shape");
  const std::vector<Index> map = permutation_index_map(shape, perm);
  CVec out(v.size());
  for (Index i = 0; i < v.size(); ++i) out(i) = v(map[static_cast<std::size_t>(i)]);
  return out;
}

CMat permute_subsystems(const CMat& m, const SubsystemShape& shape, const std::vector<int>& perm) {
  if (m.rows() != m.cols() || m.rows() != shape.total()) {
    throw ValidationError("permute_subsystems: matrix dimension does not match shape");
  }
  const std::vector<Index> map = permutation_index_map(shape, perm);
  CMat out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out(i, j) = m(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]);
  return out;
}

HermitianEig hermitian_eig(const CMat& h) {
  if (h.rows() != h.cols()) throw ValidationError("hermitian_eig: matrix must be square");
  if (!is_hermitian(h, kSpectralTol)) throw ValidationError("hermitian_eig: matrix is not Hermitian within 1e-10");
  Eigen::SelfAdjointEigenSolver<CMat> solver((h + h.adjoint()) / 2.0);
  if (solver.info() != Eigen::Success) throw InconsistencyError("hermitian_eig: eigensolver failed to converge");

  const Index n = h.rows();
  HermitianEig out;
  out.values = RVec(n);
  out.vectors = CMat(n, n);
  for (Index k = 0; k < n; ++k) {  // Eigen returns ascending order; flip to descending.
    out.values(k) = solver.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  fix_column_phases(out.vectors);
  return out;
}

SchmidtDecomposition schmidt_decompose(const CVec& psi, Index dim_a, Index dim_b) {
  if (dim_a < 1 || dim_b < 1 || psi.size() != dim_a * dim_b) {
    throw ValidationError("schmidt_decompose: state length does not match dim_a*dim_b");
  }
  if (std::abs(psi.norm() - 1.0) > 1e-10) throw ValidationError("schmidt_decompose: state is not normalized");

  // psi[i*dim_b + j] laid out as a dim_a x dim_b coefficient matrix.
  Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> coeff(psi.data(), dim_a,
                                                                                                  dim_b);
  Eigen::JacobiSVD<CMat> svd(coeff, Eigen::ComputeThinU | Eigen::ComputeThinV);

  SchmidtDecomposition out;
  out.coefficients = svd.singularValues();
  out.left = svd.matrixU();
  // psi = sum_k s_k u_k (v_k)^+ as a matrix, i.e. right vectors are conj(V).
  out.right = svd.matrixV().conjugate();
  const std::vector<Complex> phases = fix_column_phases(out.left);
  for (Index c = 0; c < out.right.cols(); ++c) out.right.col(c) *= phases[static_cast<std::size_t>(c)];
  return out;
}

DensityOperator::DensityOperator(CMat m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) throw ValidationError("DensityOperator: matrix must be square");
  if (!is_hermitian(m_, kStructuralTol)) throw ValidationError("DensityOperator: matrix is not Hermitian within 1e-12");
  if (std::abs(m_.trace().real() - 1.0) > kStructuralTol) {
    throw ValidationError("DensityOperator: trace differs from 1 beyond 1e-12");
  }
  Eigen::SelfAdjointEigenSolver<CMat> solver(m_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kStructuralTol) {
    throw ValidationError("DensityOperator: matrix has an eigenvalue below -1e-12");
  }
}

double ppt_min_eigenvalue(const CMat& rho, Index dim_a, Index dim_b) {
  if (rho.rows() != rho.cols() || rho.rows() != dim_a * dim_b) {
    throw ValidationError("ppt_min_eigenvalue: dimensions do not match the bipartition");
  }
  CMat pt(rho.rows(), rho.cols());
  for (Index i = 0; i < dim_a; ++i)
    for (Index j = 0; j < dim_b; ++j)
      for (Index k = 0; k < dim_a; ++k)
        for (Index l = 0; l < dim_b; ++l) pt(i * dim_b + j, k * dim_b + l) = rho(i * dim_b + l, k * dim_b + j);
  Eigen::SelfAdjointEigenSolver<CMat> solver((pt + pt.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double ppt_min_eigenvalue(const DensityOperator& rho) {
  if (rho.dim() != 4) throw ValidationError("ppt_min_eigenvalue: expected a two-qubit state");
  return ppt_min_eigenvalue(rho.matrix(), 2, 2);
}

double phase_aligned_distance(const CMat& u, const CMat& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw ValidationError("phase_aligned_distance: shape mismatch");
  }
  const Complex overlap = (v.adjoint() * u).trace();
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex{1.0, 0.0};
  return max_abs(u - phase * v);
}

CVec normalized_or_throw(CVec v, const char* what) {
  const double n = v.norm();
  if (std::abs(n - 1.0) > 1e-10) throw ValidationError(std::string(what) + ": state is not normalized");
  return v / n;
}

}  // namespace swapsteer
