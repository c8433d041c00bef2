#include "swapsteer/network.hpp"

#include <cmath>

namespace swapsteer {

SourceEnsemble::SourceEnsemble(std::vector<SourceComponent> components) : components_(std::move(components)) {
  if (components_.empty()) throw ValidationError("SourceEnsemble: no components");
  double total = 0.0;
  for (const SourceComponent& c : components_) {
    if (c.weight < 0.0) throw ValidationError("SourceEnsemble: negative component weight");
    total += c.weight;
    if (c.rho1.dim() % 2 != 0 || c.rho2.dim() % 2 != 0) {
      throw ValidationError("SourceEnsemble: source states must act on a qubit tensor a Bob factor");
    }
  }
  if (std::abs(total - 1.0) > kStructuralTol) {
    throw ValidationError("SourceEnsemble: weights do not sum to 1 within 1e-12");
  }
  dim_b1_ = components_.front().rho1.dim() / 2;
  dim_b2_ = components_.front().rho2.dim() / 2;
  for (const SourceComponent& c : components_) {
    if (c.rho1.dim() != 2 * dim_b1_ || c.rho2.dim() != 2 * dim_b2_) {
      throw ValidationError("SourceEnsemble: component dimensions are inconsistent");
    }
  }
}

CMat SourceEnsemble::joint_state() const {
  const Index d = 4 * dim_b1_ * dim_b2_;
  const SubsystemShape shape({2, dim_b1_, 2, dim_b2_});
  const std::vector<int> to_alice_bob{0, 2, 1, 3};  // A1 B1 A2 B2 -> A1 A2 B1 B2
  CMat acc = CMat::Zero(d, d);
  for (const SourceComponent& c : components_) {
    acc += c.weight * permute_subsystems(kron(c.rho1.matrix(), c.rho2.matrix()), shape, to_alice_bob);
  }
  return acc;
}

Scenario::Scenario(SourceEnsemble ensemble, Povm alice, Povm bob)
    : ensemble_(std::move(ensemble)), alice_(std::move(alice)), bob_(std::move(bob)) {
  if (alice_.dim() != 4 || alice_.outcomes() != 4) {
    throw ValidationError("Scenario: Alice's measurement must have 4 outcomes on dimension 4");
  }
  if (bob_.outcomes() != 4) throw ValidationError("Scenario: Bob's measurement must have 4 outcomes");
  if (bob_.dim() != ensemble_.dim_b1() * ensemble_.dim_b2()) {
    throw ValidationError("Scenario: Bob's measurement dimension does not match the sources");
  }
}

ProbTable ProbTable::from_matrix(const Eigen::Matrix4d& raw) {
  double total = 0.0;
  double min_raw = 0.0;
  Eigen::Matrix4d p = raw;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      min_raw = std::min(min_raw, raw(a, b));
      if (raw(a, b) < -kStructuralTol) {
        throw ValidationError("ProbTable: entry below -1e-12");
      }
      if (raw(a, b) < 0.0) p(a, b) = 0.0;
      total += raw(a, b);
    }
  if (std::abs(total - 1.0) > kStructuralTol) throw ValidationError("ProbTable: entries do not sum to 1 within 1e-12");
  return ProbTable(p, min_raw);
}

ProbTable joint_probability(const Scenario& s) {
  const CMat rho = s.ensemble().joint_state();
  Eigen::Matrix4d raw;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const CMat effect = kron(s.alice().element(a), s.bob().element(b));
      // Tr(E rho) without forming the product matrix.
      raw(a, b) = (effect.transpose().cwiseProduct(rho)).sum().real();
    }
  }
  return ProbTable::from_matrix(raw);
}

double witness_value(const ProbTable& p) { return p.matrix().trace(); }

Complex correlator(const ProbTable& p, int k, int l) {
  if (k < 0 || k > 3 || l < 0 || l > 3) throw ValidationError("correlator: Fourier indices must lie in 0..3");
  Complex acc{0.0, 0.0};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) acc += std::pow(kI, (a * k + b * l) % 4) * p.p(a, b);
  return acc;
}

CMat correlator_table(const ProbTable& p) {
  CMat out(4, 4);
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l) out(k, l) = correlator(p, k, l);
  return out;
}

double witness_value_correlator_form(const ProbTable& p) {
  Complex acc{0.0, 0.0};
  for (int k = 0; k < 4; ++k) acc += correlator(p, k, (4 - k) % 4);
  acc /= 4.0;
  if (std::abs(acc.imag()) > 1e-9) {
    throw InconsistencyError("witness_value_correlator_form: imaginary residue above 1e-9");
  }
  return acc.real();
}

Scenario ideal_scenario(const BellOrdering& ordering) {
  const CVec phi = bell_state(BellLabel::PhiPlus);
  const DensityOperator rho((phi * phi.adjoint()).eval());
  SourceEnsemble ensemble({SourceComponent{1.0, rho, rho}});
  Povm bell = bell_basis(ordering);
  return Scenario(std::move(ensemble), bell, bell);
}

Scenario saturating_scenario(const BellOrdering& ordering) {
  CMat m = CMat::Zero(4, 4);
  m(0, 0) = 0.5;  // |00><00|
  m(3, 3) = 0.5;  // |11><11|
  const DensityOperator rho(m);
  SourceEnsemble ensemble({SourceComponent{1.0, rho, rho}});
  // Bob reads his two bits and announces the outcome whose Bell vector is
  // supported on that pattern, so each announcement matches Alice's reading
  // with probability 1/2 and the witness reaches 1/2.
  std::vector<CMat> bob(4);
  for (int b = 0; b < 4; ++b) {
    const int pattern = bell_pattern_index(ordering.label(b));
    CMat proj = CMat::Zero(4, 4);
    proj(pattern, pattern) = 1.0;
    bob[static_cast<std::size_t>(b)] = std::move(proj);
  }
  return Scenario(std::move(ensemble), bell_basis(ordering), Povm(std::move(bob)));
}

Scenario werner_scenario(double alpha1, double alpha2, const BellOrdering& ordering) {
  SourceEnsemble ensemble({SourceComponent{1.0, werner_state(alpha1), werner_state(alpha2)}});
  Povm bell = bell_basis(ordering);
  return Scenario(std::move(ensemble), bell, bell);
}

}  // namespace swapsteer
