#include "swapsteer/selftest.hpp"

#include <cmath>

#include "swapsteer/random.hpp"

namespace swapsteer {

namespace {

constexpr double kSosGate = 1e-8;
constexpr double kSchmidtRankTol = 1e-6;

CMat matrix_power(const CMat& m, int n) {
  CMat out = CMat::Identity(m.rows(), m.cols());
  for (int i = 0; i < n; ++i) out = out * m;
  return out;
}

// Joint state of a flat separable description, reordered to A1 A2 B1 B2.
CMat state_from_terms(const std::vector<SeparableTerm>& terms, Index db1, Index db2) {
  const SubsystemShape shape({2, db1, 2, db2});
  const std::vector<int> to_alice_bob{0, 2, 1, 3};
  CMat acc = CMat::Zero(4 * db1 * db2, 4 * db1 * db2);
  for (const SeparableTerm& t : terms) {
    const CVec joint = permute_subsystems(kron(t.psi1, t.psi2), shape, to_alice_bob);
    acc += t.weight * (joint * joint.adjoint());
  }
  return acc;
}

struct GroupedDecomposition {
  std::vector<CVec> states1, states2;
  RMat weights;  // (component of source 1) x (component of source 2)
};

std::size_t find_or_add(std::vector<CVec>& states, const CVec& v) {
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (max_abs(states[k] - v) <= 1e-10) return k;
  }
  states.push_back(v);
  return states.size() - 1;
}

GroupedDecomposition group_decomposition(const std::vector<SeparableTerm>& terms) {
  GroupedDecomposition g;
  std::vector<std::array<std::size_t, 2>> pairs;
  pairs.reserve(terms.size());
  for (const SeparableTerm& t : terms) {
    pairs.push_back({find_or_add(g.states1, t.psi1), find_or_add(g.states2, t.psi2)});
  }
  g.weights = RMat::Zero(static_cast<Index>(g.states1.size()), static_cast<Index>(g.states2.size()));
  for (std::size_t i = 0; i < terms.size(); ++i) {
    g.weights(static_cast<Index>(pairs[i][0]), static_cast<Index>(pairs[i][1])) += terms[i].weight;
  }
  return g;
}

struct SourceExtraction {
  CMat u;                     // block unitary on C^{2 m}
  std::vector<CMat> p_ops;    // 2x2 Schmidt-weight operator per component
};

// Schmidt-decompose every component, map |f_j> -> |e_j*> x |s>, and complete
// to a unitary on the orthogonal remainder.
SourceExtraction extract_source(const std::vector<CVec>& states, Index dim_b, int source_tag) {
  const Index m = dim_b / 2;
  const Index n_comp = static_cast<Index>(states.size());
  if (2 * n_comp > dim_b) {
    throw ValidationError("extract_local_unitaries: source " + std::to_string(source_tag) +
                          " has more components than the junk dimension supports");
  }

  SourceExtraction ex;
  CMat f_cols(dim_b, 2 * n_comp);
  CMat t_cols(dim_b, 2 * n_comp);
  for (Index s = 0; s < n_comp; ++s) {
    const SchmidtDecomposition sd = schmidt_decompose(states[static_cast<std::size_t>(s)], 2, dim_b);
    if (sd.coefficients.size() < 2 || sd.coefficients(1) < kSchmidtRankTol) {
      throw SeparableSourceError("extract_local_unitaries: source " + std::to_string(source_tag) +
                                 " component has Schmidt rank < 2 and cannot maximally violate");
    }
    CMat p = CMat::Zero(2, 2);
    CVec chi = CVec::Zero(m);
    chi(s) = 1.0;  // s < m by the capacity check above
    for (Index j = 0; j < 2; ++j) {
      p += std::sqrt(2.0) * sd.coefficients(j) * (sd.left.col(j) * sd.left.col(j).adjoint());
      f_cols.col(2 * s + j) = sd.right.col(j);
      t_cols.col(2 * s + j) = kron(CVec(sd.left.col(j).conjugate()), chi);
    }
    ex.p_ops.push_back(std::move(p));
  }

  // Orthonormal completion of both frames, then the exact frame map f -> t.
  auto complete = [&](const CMat& cols) {
    Eigen::JacobiSVD<CMat> svd(cols, Eigen::ComputeFullU);
    CMat full(dim_b, dim_b);
    full.leftCols(2 * n_comp) = cols;
    full.rightCols(dim_b - 2 * n_comp) = svd.matrixU().rightCols(dim_b - 2 * n_comp);
    return full;
  };
  const CMat f_full = complete(f_cols);
  const CMat t_full = complete(t_cols);
  CMat u = t_full * f_full.inverse();
  if (max_abs(u * u.adjoint() - CMat::Identity(dim_b, dim_b)) > 1e-6) {
    throw InconsistencyError("extract_local_unitaries: decomposition components are not orthonormal enough");
  }
  Eigen::JacobiSVD<CMat> polar(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  ex.u = polar.matrixU() * polar.matrixV().adjoint();
  return ex;
}

}  // namespace

void validate_realization(const Realization& r) {
  if (r.dim_b1 < 2 || r.dim_b2 < 2 || r.dim_b1 % 2 != 0 || r.dim_b2 % 2 != 0) {
    throw ValidationError("Realization: Bob factor dimensions must be even and at least 2");
  }
  if (r.rho.dim() != 4 * r.dim_b1 * r.dim_b2) {
    throw ValidationError("Realization: state dimension does not match 4*dim_b1*dim_b2");
  }
  if (r.bob_observable.rows() != r.bob_observable.cols() || r.bob_observable.rows() != r.dim_b1 * r.dim_b2) {
    throw ValidationError("Realization: observable dimension does not match Bob's space");
  }
  if (r.decomposition) {
    double total = 0.0;
    for (const SeparableTerm& t : *r.decomposition) {
      if (t.weight < 0.0) throw ValidationError("Realization: negative decomposition weight");
      total += t.weight;
      if (t.psi1.size() != 2 * r.dim_b1 || t.psi2.size() != 2 * r.dim_b2) {
        throw ValidationError("Realization: decomposition state dimensions do not match the sources");
      }
      if (std::abs(t.psi1.norm() - 1.0) > 1e-10 || std::abs(t.psi2.norm() - 1.0) > 1e-10) {
        throw ValidationError("Realization: decomposition states must be normalized");
      }
    }
    if (std::abs(total - 1.0) > kStructuralTol) {
      throw ValidationError("Realization: decomposition weights do not sum to 1 within 1e-12");
    }
    if (max_abs(state_from_terms(*r.decomposition, r.dim_b1, r.dim_b2) - r.rho.matrix()) > 1e-10) {
      throw InconsistencyError("Realization: separable decomposition does not reproduce the joint state");
    }
  }
}

std::array<double, 4> sos_residuals(const Realization& r) {
  validate_realization(r);
  const CMat a0 = trusted_observable().matrix;
  std::array<double, 4> out{};
  for (int k = 0; k < 4; ++k) {
    const CMat op = kron(matrix_power(a0, k), matrix_power(r.bob_observable, 4 - k));
    out[static_cast<std::size_t>(k)] = max_abs(op * r.rho.matrix() - r.rho.matrix());
  }
  return out;
}

double bob_projectivity_check(const Realization& r) {
  validate_realization(r);
  const Index db = r.dim_b1 * r.dim_b2;
  const CMat rho_b = partial_trace(r.rho.matrix(), SubsystemShape({4, db}), {1});
  Eigen::SelfAdjointEigenSolver<CMat> solver((rho_b + rho_b.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < 1e-10) {
    throw FullRankAssumptionError("bob_projectivity_check: Bob's reduced state is rank-deficient");
  }
  const CMat& b0 = r.bob_observable;
  const CMat id = CMat::Identity(db, db);
  return std::max(max_abs(b0 * b0.adjoint() - id), max_abs(b0.adjoint() * b0 - id));
}

double commutant_residual(const CMat& p1, const CMat& p2) {
  for (const CMat* p : {&p1, &p2}) {
    if (p->rows() != 2 || p->cols() != 2) throw ValidationError("commutant_residual: P operators must be 2x2");
    if (!is_hermitian(*p, 1e-10)) throw ValidationError("commutant_residual: P operators must be Hermitian");
    Eigen::SelfAdjointEigenSolver<CMat> solver((*p + p->adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-10) {
      throw ValidationError("commutant_residual: P operators must be positive");
    }
  }
  const CMat a0 = trusted_observable().matrix;
  const CMat sq = matrix_power(kron(p1, p2), 2);
  return max_abs(a0 * sq - sq * a0);
}

double support_orthogonality_check(const Realization& r) {
  validate_realization(r);
  if (!r.decomposition) {
    throw ValidationError("support_orthogonality_check: realization has no separable decomposition");
  }
  const GroupedDecomposition g = group_decomposition(*r.decomposition);
  double worst = 0.0;
  auto scan_source = [&](const std::vector<CVec>& states, Index dim_b) {
    std::vector<CMat> f_vectors;
    for (const CVec& psi : states) {
      const SchmidtDecomposition sd = schmidt_decompose(psi, 2, dim_b);
      f_vectors.push_back(sd.right.leftCols(2));
    }
    for (std::size_t l = 0; l < f_vectors.size(); ++l)
      for (std::size_t s = 0; s < f_vectors.size(); ++s) {
        if (l == s) continue;
        worst = std::max(worst, max_abs(f_vectors[l].adjoint() * f_vectors[s]));
      }
  };
  scan_source(g.states1, r.dim_b1);
  scan_source(g.states2, r.dim_b2);
  return worst;
}

SelfTestCertificate extract_local_unitaries(const Realization& r) {
  validate_realization(r);
  if (!r.decomposition) {
    throw ValidationError("extract_local_unitaries: a separable decomposition is required");
  }

  // Premise scan first: a component of Schmidt rank < 2 disqualifies the
  // realization outright, whatever the residuals say.
  const GroupedDecomposition g = group_decomposition(*r.decomposition);
  for (int tag = 1; tag <= 2; ++tag) {
    const std::vector<CVec>& states = (tag == 1) ? g.states1 : g.states2;
    const Index dim_b = (tag == 1) ? r.dim_b1 : r.dim_b2;
    for (const CVec& s : states) {
      const SchmidtDecomposition sd = schmidt_decompose(s, 2, dim_b);
      if (sd.coefficients.size() < 2 || sd.coefficients(1) < kSchmidtRankTol) {
        throw SeparableSourceError("extract_local_unitaries: source " + std::to_string(tag) +
                                   " component has Schmidt rank < 2 and cannot maximally violate");
      }
    }
  }

  SelfTestCertificate cert;
  cert.sos_residuals = sos_residuals(r);
  cert.max_sos_residual = *std::max_element(cert.sos_residuals.begin(), cert.sos_residuals.end());
  if (cert.max_sos_residual > kSosGate) {
    throw NonMaximalViolationError("extract_local_unitaries: operator identities fail beyond 1e-8; "
                                   "the violation is not maximal");
  }
  cert.bob_unitarity_residual = bob_projectivity_check(r);

  const SourceExtraction ex1 = extract_source(g.states1, r.dim_b1, 1);
  const SourceExtraction ex2 = extract_source(g.states2, r.dim_b2, 2);
  cert.u1 = ex1.u;
  cert.u2 = ex2.u;

  cert.commutant_residual = -1.0;
  for (const CMat& p1 : ex1.p_ops)
    for (const CMat& p2 : ex2.p_ops) {
      const double res = commutant_residual(p1, p2);
      if (res > cert.commutant_residual) {
        cert.commutant_residual = res;
        cert.p1 = p1;
        cert.p2 = p2;
      }
    }

  const Index m1 = r.dim_b1 / 2, m2 = r.dim_b2 / 2;
  const CMat u_b = kron(cert.u1, cert.u2);
  const CMat rotated = kron(CMat::Identity(4, 4), u_b) * r.rho.matrix() * kron(CMat::Identity(4, 4), u_b).adjoint();

  // Trace out the junk registers and overlap with phi+ x phi+ on A1 B1' A2 B2'.
  const SubsystemShape rotated_shape({2, 2, 2, m1, 2, m2});
  const CMat reduced = partial_trace(rotated, rotated_shape, {0, 1, 2, 4});
  const CVec phi = bell_state(BellLabel::PhiPlus);
  const CVec reference = permute_subsystems(kron(phi, phi), SubsystemShape({2, 2, 2, 2}), {0, 2, 1, 3});
  cert.state_fidelity = (reference.adjoint() * reduced * reference)(0, 0).real();

  cert.observable_residual = max_abs(u_b * r.bob_observable * u_b.adjoint() - ideal_bob_observable(m1, m2));
  return cert;
}

Povm povm_from_observable(const CMat& observable, const BellOrdering& ordering) {
  const Index d = observable.rows();
  if (observable.cols() != d) throw ValidationError("povm_from_observable: matrix must be square");
  const CMat id = CMat::Identity(d, d);
  if (max_abs(observable * observable.adjoint() - id) > 1e-8 || max_abs(matrix_power(observable, 4) - id) > 1e-8) {
    throw ValidationError("povm_from_observable: observable must be unitary with fourth power 1");
  }
  // Projector onto the i^k eigenspace via the group average (1/4) sum_n i^{-kn} B^n.
  std::vector<CMat> elements;
  for (int b = 0; b < 4; ++b) {
    const int k = ordering.eigenphase(b);
    CMat proj = CMat::Zero(d, d);
    for (int n = 0; n < 4; ++n) proj += std::pow(kI, ((4 - k) * n) % 4) * matrix_power(observable, n);
    proj /= 4.0;
    elements.push_back(((proj + proj.adjoint()) / 2.0).eval());
  }
  return Povm(std::move(elements));
}

ProbTable realization_prob_table(const Realization& r, const BellOrdering& ordering) {
  validate_realization(r);
  const Povm alice = bell_basis(ordering);
  const Povm bob = povm_from_observable(r.bob_observable, ordering);
  Eigen::Matrix4d raw;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const CMat effect = kron(alice.element(a), bob.element(b));
      raw(a, b) = (effect.transpose().cwiseProduct(r.rho.matrix())).sum().real();
    }
  return ProbTable::from_matrix(raw);
}

CMat ideal_bob_observable(Index m1, Index m2) {
  if (m1 < 1 || m2 < 1) throw ValidationError("ideal_bob_observable: junk dimensions must be positive");
  const CMat stacked = kron(trusted_observable().matrix, CMat::Identity(m1 * m2, m1 * m2));
  // (B1' B2' B1'' B2'') -> (B1' B1'' B2' B2'')
  return permute_subsystems(stacked, SubsystemShape({2, 2, m1, m2}), {0, 2, 1, 3});
}

Realization ideal_realization(Index m1, Index m2) {
  if (m1 < 1 || m2 < 1) throw ValidationError("ideal_realization: junk dimensions must be positive");
  const CVec phi = bell_state(BellLabel::PhiPlus);

  auto junk_weights = [](Index m) {
    RVec q(m);
    for (Index s = 0; s < m; ++s) q(s) = std::pow(2.0, static_cast<double>(m - s));
    return RVec(q / q.sum());  // distinct spectrum, avoids junk-basis ambiguity
  };
  const RVec q1 = junk_weights(m1), q2 = junk_weights(m2);

  std::vector<SeparableTerm> terms;
  for (Index s = 0; s < m1; ++s)
    for (Index t = 0; t < m2; ++t) {
      CVec chi1 = CVec::Zero(m1), chi2 = CVec::Zero(m2);
      chi1(s) = 1.0;
      chi2(t) = 1.0;
      terms.push_back(SeparableTerm{q1(s) * q2(t), kron(phi, chi1), kron(phi, chi2)});
    }

  const CMat rho = state_from_terms(terms, 2 * m1, 2 * m2);
  return Realization{DensityOperator((rho + rho.adjoint()) / 2.0), ideal_bob_observable(m1, m2), 2 * m1, 2 * m2,
                     std::move(terms)};
}

Realization apply_bob_disguise(const Realization& r, const CMat& v1, const CMat& v2) {
  const CMat id1 = CMat::Identity(r.dim_b1, r.dim_b1);
  const CMat id2 = CMat::Identity(r.dim_b2, r.dim_b2);
  if (v1.rows() != r.dim_b1 || v1.cols() != r.dim_b1 || max_abs(v1 * v1.adjoint() - id1) > 1e-10 ||
      v2.rows() != r.dim_b2 || v2.cols() != r.dim_b2 || max_abs(v2 * v2.adjoint() - id2) > 1e-10) {
    throw ValidationError("apply_bob_disguise: disguises must be unitaries on Bob's factors");
  }
  const CMat v = kron(v1, v2);
  const CMat big = kron(CMat::Identity(4, 4), v);
  Realization out{DensityOperator(big * r.rho.matrix() * big.adjoint()), v * r.bob_observable * v.adjoint(),
                  r.dim_b1, r.dim_b2, std::nullopt};
  if (r.decomposition) {
    std::vector<SeparableTerm> terms;
    for (const SeparableTerm& t : *r.decomposition) {
      terms.push_back(SeparableTerm{t.weight, kron(CMat::Identity(2, 2), v1) * t.psi1,
                                    kron(CMat::Identity(2, 2), v2) * t.psi2});
    }
    out.decomposition = std::move(terms);
  }
  return out;
}

Realization disguised_ideal_realization(Index m1, Index m2, std::mt19937_64& rng) {
  const Realization base = ideal_realization(m1, m2);
  return apply_bob_disguise(base, random_unitary(2 * m1, rng), random_unitary(2 * m2, rng));
}

Realization werner_realization(double alpha1, double alpha2) {
  const std::array<BellLabel, 4> labels{BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus,
                                        BellLabel::PsiMinus};
  auto spectrum = [](double alpha) {
    return std::array<double, 4>{(1.0 + 3.0 * alpha) / 4.0, (1.0 - alpha) / 4.0, (1.0 - alpha) / 4.0,
                                 (1.0 - alpha) / 4.0};
  };
  const std::array<double, 4> q1 = spectrum(alpha1), q2 = spectrum(alpha2);
  std::vector<SeparableTerm> terms;
  for (int s = 0; s < 4; ++s)
    for (int t = 0; t < 4; ++t) {
      const double w = q1[static_cast<std::size_t>(s)] * q2[static_cast<std::size_t>(t)];
      if (w < 1e-15) continue;
      terms.push_back(SeparableTerm{w, bell_state(labels[static_cast<std::size_t>(s)]),
                                    bell_state(labels[static_cast<std::size_t>(t)])});
    }
  const CMat rho = state_from_terms(terms, 2, 2);
  return Realization{DensityOperator((rho + rho.adjoint()) / 2.0), trusted_observable().matrix, 2, 2,
                     std::move(terms)};
}

}  // namespace swapsteer
