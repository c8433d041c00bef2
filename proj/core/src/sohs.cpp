#include "swapsteer/sohs.hpp"

#include <cmath>
#include <random>

namespace swapsteer {

namespace {

void check_distribution(const double* p, std::size_t n, const char* what) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] < 0.0) throw ValidationError(std::string(what) + ": negative probability");
    total += p[i];
  }
  if (std::abs(total - 1.0) > kStructuralTol) {
    throw ValidationError(std::string(what) + ": probabilities do not sum to 1 within 1e-12");
  }
}

CVec bloch_state(double theta, double phi) {
  CVec v(2);
  v(0) = std::cos(theta / 2.0);
  v(1) = std::polar(std::sin(theta / 2.0), phi);
  return v;
}

}  // namespace

SOHSModel::SOHSModel(std::vector<SohsAtom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw ValidationError("SOHSModel: no atoms");
  double total = 0.0;
  for (const SohsAtom& atom : atoms_) {
    if (atom.weight < 0.0) throw ValidationError("SOHSModel: negative atom weight");
    total += atom.weight;
    if (atom.alice.empty()) throw ValidationError("SOHSModel: atom has no Alice components");
    double inner = 0.0;
    for (const AliceComponent& c : atom.alice) {
      if (c.weight < 0.0) throw ValidationError("SOHSModel: negative Alice component weight");
      inner += c.weight;
      if (c.psi1.size() != 2 || c.psi2.size() != 2) {
        throw ValidationError("SOHSModel: Alice component states must be qubits");
      }
      if (std::abs(c.psi1.norm() - 1.0) > 1e-10 || std::abs(c.psi2.norm() - 1.0) > 1e-10) {
        throw ValidationError("SOHSModel: Alice component states must be normalized");
      }
    }
    if (std::abs(inner - 1.0) > kStructuralTol) {
      throw ValidationError("SOHSModel: Alice component weights do not sum to 1 within 1e-12");
    }
    check_distribution(atom.bob_response.data(), 4, "SOHSModel response");
  }
  if (std::abs(total - 1.0) > kStructuralTol) {
    throw ValidationError("SOHSModel: atom weights do not sum to 1 within 1e-12");
  }
}

ProbTable sohs_prob_table(const SOHSModel& m, const Povm& alice) {
  if (alice.dim() != 4 || alice.outcomes() != 4) {
    throw ValidationError("sohs_prob_table: Alice's measurement must have 4 outcomes on dimension 4");
  }
  Eigen::Matrix4d raw = Eigen::Matrix4d::Zero();
  for (const SohsAtom& atom : m.atoms()) {
    std::array<double, 4> alice_probs{};
    for (const AliceComponent& c : atom.alice) {
      const CVec product = kron(c.psi1, c.psi2);
      for (int a = 0; a < 4; ++a) {
        alice_probs[static_cast<std::size_t>(a)] +=
            c.weight * (product.adjoint() * alice.element(a) * product)(0, 0).real();
      }
    }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        raw(a, b) += atom.weight * alice_probs[static_cast<std::size_t>(a)] * atom.bob_response[static_cast<std::size_t>(b)];
      }
  }
  return ProbTable::from_matrix(raw);
}

SOHSModel saturating_sohs_model(const BellOrdering& ordering) {
  // Outcome announced for each two-bit pattern: the one whose Bell vector is
  // supported on it.  Alice's Bell reading of |x>|y> lands on that outcome
  // with probability 1/2, so the witness reaches its separable maximum 1/2.
  std::array<int, 4> outcome_of_pattern{};
  for (int b = 0; b < 4; ++b) outcome_of_pattern[static_cast<std::size_t>(bell_pattern_index(ordering.label(b)))] = b;

  std::vector<SohsAtom> atoms;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      CVec e1 = CVec::Zero(2), e2 = CVec::Zero(2);
      e1(x) = 1.0;
      e2(y) = 1.0;
      SohsAtom atom;
      atom.weight = 0.25;
      atom.alice = {AliceComponent{1.0, e1, e2}};
      atom.bob_response = {0.0, 0.0, 0.0, 0.0};
      atom.bob_response[static_cast<std::size_t>(outcome_of_pattern[static_cast<std::size_t>(2 * x + y)])] = 1.0;
      atoms.push_back(std::move(atom));
    }
  return SOHSModel(std::move(atoms));
}

Scenario scenario_from_sohs(const SOHSModel& m) {
  const Index n_atoms = static_cast<Index>(m.atoms().size());
  if (n_atoms > 8) throw ValidationError("scenario_from_sohs: flag construction limited to 8 atoms");

  // Every Alice component becomes its own classical branch; branches of one
  // atom share the flag value, so Bob's flag readout recovers the atom index
  // while Alice sees exactly the atom's mixture of product states.
  std::vector<SourceComponent> components;
  for (Index t = 0; t < n_atoms; ++t) {
    const SohsAtom& atom = m.atoms()[static_cast<std::size_t>(t)];
    CMat flag = CMat::Zero(n_atoms, n_atoms);
    flag(t, t) = 1.0;
    for (const AliceComponent& c : atom.alice) {
      components.push_back(SourceComponent{atom.weight * c.weight,
                                           DensityOperator(kron((c.psi1 * c.psi1.adjoint()).eval(), flag)),
                                           DensityOperator(kron((c.psi2 * c.psi2.adjoint()).eval(), flag))});
    }
  }
  SourceEnsemble ensemble(std::move(components));

  // Bob reads matching flag pairs and samples the atom's response; mismatched
  // pairs never occur, split them evenly to complete the POVM.
  const Index db = n_atoms * n_atoms;
  std::vector<CMat> bob(4, CMat::Zero(db, db));
  for (Index t1 = 0; t1 < n_atoms; ++t1)
    for (Index t2 = 0; t2 < n_atoms; ++t2) {
      const Index idx = t1 * n_atoms + t2;
      if (t1 == t2) {
        const SohsAtom& atom = m.atoms()[static_cast<std::size_t>(t1)];
        for (int b = 0; b < 4; ++b) bob[static_cast<std::size_t>(b)](idx, idx) = atom.bob_response[static_cast<std::size_t>(b)];
      } else {
        for (int b = 0; b < 4; ++b) bob[static_cast<std::size_t>(b)](idx, idx) = 0.25;
      }
    }
  return Scenario(std::move(ensemble), bell_basis(BellOrdering::canonical()), Povm(std::move(bob)));
}

SohsBoundResult sohs_bound_optimize(const Povm& alice, const OptimizerConfig& cfg) {
  if (alice.dim() != 4 || alice.outcomes() != 4) {
    throw ValidationError("sohs_bound_optimize: Alice's measurement must have 4 outcomes on dimension 4");
  }
  if (cfg.restarts < 1) throw ValidationError("sohs_bound_optimize: restarts must be positive");

  auto branch_value = [&](int a, const RVec& x) {
    const CVec product = kron(bloch_state(x(0), x(1)), bloch_state(x(2), x(3)));
    return (product.adjoint() * alice.element(a) * product)(0, 0).real();
  };

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  SohsBoundResult result;
  double worst_restart = 1.0;
  for (int r = 0; r < cfg.restarts; ++r) {
    // theta uniform in cos(theta) for an unbiased Bloch-sphere start.
    RVec x0(4);
    x0(0) = std::acos(1.0 - 2.0 * u01(rng));
    x0(1) = 2.0 * M_PI * u01(rng);
    x0(2) = std::acos(1.0 - 2.0 * u01(rng));
    x0(3) = 2.0 * M_PI * u01(rng);

    double restart_best = -1.0;
    int restart_outcome = 0;
    RVec restart_x;
    for (int a = 0; a < 4; ++a) {
      auto negated = [&](const RVec& x) { return -branch_value(a, x); };
      const NelderMeadResult nm = nelder_mead_polished(negated, x0, 0.4, cfg.max_iters, cfg.step_tol);
      if (-nm.value > restart_best) {
        restart_best = -nm.value;
        restart_outcome = a;
        restart_x = nm.x;
      }
    }
    worst_restart = std::min(worst_restart, restart_best);
    if (restart_best > result.bound) {
      result.bound = restart_best;
      result.outcome = restart_outcome;
      for (int i = 0; i < 4; ++i) result.angles[static_cast<std::size_t>(i)] = restart_x(i);
      result.psi1 = bloch_state(restart_x(0), restart_x(1));
      result.psi2 = bloch_state(restart_x(2), restart_x(3));
    }
  }
  result.spread = result.bound - worst_restart;
  result.converged = result.spread <= cfg.spread_tol;
  return result;
}

NLHVModel::NLHVModel(std::vector<double> lambda1_weights, std::vector<double> lambda2_weights,
                     std::vector<std::vector<NLHVResponse>> responses)
    : w1_(std::move(lambda1_weights)), w2_(std::move(lambda2_weights)), responses_(std::move(responses)) {
  if (w1_.empty() || w2_.empty()) throw ValidationError("NLHVModel: empty hidden-variable alphabet");
  check_distribution(w1_.data(), w1_.size(), "NLHVModel lambda1");
  check_distribution(w2_.data(), w2_.size(), "NLHVModel lambda2");
  if (responses_.size() != w1_.size()) throw ValidationError("NLHVModel: response table shape mismatch");
  for (const auto& row : responses_) {
    if (row.size() != w2_.size()) throw ValidationError("NLHVModel: response table shape mismatch");
    for (const NLHVResponse& r : row) {
      check_distribution(r.alice.data(), 4, "NLHVModel Alice response");
      check_distribution(r.bob.data(), 4, "NLHVModel Bob response");
    }
  }
}

ProbTable nlhv_prob_table(const NLHVModel& m) {
  Eigen::Matrix4d raw = Eigen::Matrix4d::Zero();
  for (std::size_t l1 = 0; l1 < m.lambda1_weights().size(); ++l1)
    for (std::size_t l2 = 0; l2 < m.lambda2_weights().size(); ++l2) {
      const double w = m.lambda1_weights()[l1] * m.lambda2_weights()[l2];
      const NLHVResponse& r = m.response(l1, l2);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          raw(a, b) += w * r.alice[static_cast<std::size_t>(a)] * r.bob[static_cast<std::size_t>(b)];
        }
    }
  return ProbTable::from_matrix(raw);
}

NLHVModel build_nlhv_model(const ProbTable& p) {
  // lambda1 ranges over the support of p; its value announces the outcome
  // pair both parties should emit.  lambda2 carries no information.
  std::vector<double> w1;
  std::vector<std::vector<NLHVResponse>> responses;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (p.p(a, b) <= 0.0) continue;
      w1.push_back(p.p(a, b));
      NLHVResponse r{};
      r.alice[static_cast<std::size_t>(a)] = 1.0;
      r.bob[static_cast<std::size_t>(b)] = 1.0;
      responses.push_back({r});
    }
  if (w1.empty()) throw ValidationError("build_nlhv_model: table has empty support");
  return NLHVModel(std::move(w1), {1.0}, std::move(responses));
}

}  // namespace swapsteer
