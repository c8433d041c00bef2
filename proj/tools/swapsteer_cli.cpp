// Command-line front end for the swap-steering toolkit: witness evaluation,
// Werner sweeps, classical-bound optimization, self-testing, randomness
// certification, hidden-variable model construction, and fixture generation.

#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "swapsteer/assemblage.hpp"
#include "swapsteer/linalg.hpp"
#include "swapsteer/network.hpp"
#include "swapsteer/optimize.hpp"
#include "swapsteer/qobj.hpp"
#include "swapsteer/random.hpp"
#include "swapsteer/randomness.hpp"
#include "swapsteer/selftest.hpp"
#include "swapsteer/serialize.hpp"
#include "swapsteer/sohs.hpp"
#include "swapsteer/types.hpp"

namespace ss = swapsteer;
using nlohmann::json;

namespace {

// Exit codes shared with the documentation and the test-suite.
constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitInconsistency = 3;
constexpr int kExitIo = 4;
constexpr int kExitNoConvergence = 5;
constexpr int kExitSelfTestGate = 6;
constexpr int kExitInfeasible = 7;

constexpr std::uint64_t kFixtureSeed = 0x0f1c5eedULL;

// Seed precedence: explicit flag, then the scenario file, then the
// SWAPSTEER_SEED environment variable, then the library default.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag_seed,
                           const std::optional<std::uint64_t>& file_seed, std::uint64_t fallback) {
  if (flag_seed) return *flag_seed;
  if (file_seed) return *file_seed;
  if (const char* env = std::getenv("SWAPSTEER_SEED")) {
    errno = 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (errno != 0 || end == env || *end != '\0') {
      throw ss::ValidationError("SWAPSTEER_SEED: not an unsigned integer");
    }
    return static_cast<std::uint64_t>(v);
  }
  return fallback;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
  } else {
    ss::write_text_file(out_path, text);
  }
}

json cvec_to_json(const ss::CVec& v) {
  json out = json::array();
  for (ss::Index i = 0; i < v.size(); ++i) out.push_back(json::array({v(i).real(), v(i).imag()}));
  return out;
}

json table_to_json(const Eigen::Matrix4d& m) {
  json rows = json::array();
  for (int r = 0; r < 4; ++r) {
    json row = json::array();
    for (int c = 0; c < 4; ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------- witness --

struct WitnessArgs {
  std::string scenario_path;
  std::string out;
  bool json_out = false;
  double consistency_tol = 1e-9;
  double steer_tol = 1e-9;
};

int cmd_witness(const WitnessArgs& a) {
  ss::ScenarioDocument doc = ss::load_scenario(a.scenario_path);
  ss::ProbTable table = ss::joint_probability(doc.scenario);
  double w = ss::witness_value(table);
  double wc = ss::witness_value_correlator_form(table);
  double diff = std::abs(w - wc);
  if (diff > a.consistency_tol) {
    throw ss::InconsistencyError("witness forms disagree by " + ss::format_double(diff));
  }
  bool steerable = w > 0.5 + a.steer_tol;
  const char* verdict = steerable ? "swap-steerable" : "not demonstrated";

  if (a.json_out || !a.out.empty()) {
    json j{{"p", table_to_json(table.matrix())},
           {"witness", w},
           {"witness_correlator_form", wc},
           {"form_difference", diff},
           {"min_raw_entry", table.min_raw_entry()},
           {"steerable", steerable},
           {"verdict", verdict}};
    emit(j.dump(2), a.out);
  } else {
    std::ostringstream os;
    os << "p(a,b):\n";
    for (int r = 0; r < 4; ++r) {
      os << " ";
      for (int c = 0; c < 4; ++c) os << " " << ss::format_double(table.p(r, c));
      os << "\n";
    }
    os << "witness = " << ss::format_double(w) << "\n";
    os << "witness_correlator_form = " << ss::format_double(wc) << "\n";
    os << "form_difference = " << ss::format_double(diff) << "\n";
    os << "verdict = " << verdict << "\n";
    emit(os.str(), a.out);
  }
  return kExitOk;
}

// ----------------------------------------------------------- werner-sweep --

struct SweepArgs {
  std::string spec_path;
  std::string out;
  std::string format;
  double steer_tol = 1e-9;
};

int cmd_werner_sweep(const SweepArgs& a) {
  ss::SweepSpec spec = ss::load_sweep_spec(a.spec_path);
  if (!a.out.empty()) spec.output = a.out;
  if (!a.format.empty()) spec.format = a.format;

  std::vector<double> as1 = ss::sweep_axis_points(spec.alpha1);
  std::vector<double> as2 = ss::sweep_axis_points(spec.alpha2);

  struct Row {
    double alpha1, alpha2, witness, analytic, abs_error;
    int steerable;
    double ppt1, ppt2;
  };
  std::vector<Row> rows;
  rows.reserve(as1.size() * as2.size());
  for (double a1 : as1) {
    double ppt1 = ss::ppt_min_eigenvalue(ss::werner_state(a1));
    for (double a2 : as2) {
      ss::Scenario sc = ss::werner_scenario(a1, a2);
      double w = ss::witness_value(ss::joint_probability(sc));
      double analytic = (3.0 * a1 * a2 + 1.0) / 4.0;
      double ppt2 = ss::ppt_min_eigenvalue(ss::werner_state(a2));
      rows.push_back(Row{a1, a2, w, analytic, std::abs(w - analytic), w > 0.5 + a.steer_tol ? 1 : 0, ppt1, ppt2});
    }
  }

  std::string text;
  if (spec.format == "csv") {
    std::ostringstream os;
    os << "alpha1,alpha2,witness,analytic,abs_error,steerable,ppt_min_eig_1,ppt_min_eig_2\n";
    for (const Row& r : rows) {
      os << ss::format_double(r.alpha1) << ',' << ss::format_double(r.alpha2) << ',' << ss::format_double(r.witness)
         << ',' << ss::format_double(r.analytic) << ',' << ss::format_double(r.abs_error) << ',' << r.steerable << ','
         << ss::format_double(r.ppt1) << ',' << ss::format_double(r.ppt2) << '\n';
    }
    text = os.str();
  } else {
    json jrows = json::array();
    for (const Row& r : rows) {
      jrows.push_back(json{{"alpha1", r.alpha1},
                           {"alpha2", r.alpha2},
                           {"witness", r.witness},
                           {"analytic", r.analytic},
                           {"abs_error", r.abs_error},
                           {"steerable", r.steerable},
                           {"ppt_min_eig_1", r.ppt1},
                           {"ppt_min_eig_2", r.ppt2}});
    }
    text = json{{"rows", std::move(jrows)}}.dump(2);
  }
  emit(text, spec.output.value_or(""));
  return kExitOk;
}

// ------------------------------------------------------------- sohs-bound --

struct SohsArgs {
  int restarts = 100;
  int max_iters = 400;
  double step_tol = 1e-9;
  double spread_tol = 1e-6;
  std::optional<std::uint64_t> seed;
  std::string povm = "bell";
  std::string out;
  bool json_out = false;
};

int cmd_sohs_bound(const SohsArgs& a) {
  ss::OptimizerConfig cfg;
  cfg.restarts = a.restarts;
  cfg.max_iters = a.max_iters;
  cfg.step_tol = a.step_tol;
  cfg.spread_tol = a.spread_tol;
  cfg.seed = resolve_seed(a.seed, std::nullopt, cfg.seed);

  ss::Povm alice =
      a.povm == "bell" ? ss::bell_basis(ss::BellOrdering::canonical()) : ss::computational_basis_povm(4);
  ss::SohsBoundResult r = ss::sohs_bound_optimize(alice, cfg);

  if (a.json_out || !a.out.empty()) {
    json j{{"bound", r.bound},
           {"spread", r.spread},
           {"converged", r.converged},
           {"outcome", r.outcome},
           {"angles",
            json{{"theta1", r.angles[0]}, {"phi1", r.angles[1]}, {"theta2", r.angles[2]}, {"phi2", r.angles[3]}}},
           {"psi1", cvec_to_json(r.psi1)},
           {"psi2", cvec_to_json(r.psi2)},
           {"restarts", a.restarts},
           {"seed", cfg.seed}};
    emit(j.dump(2), a.out);
  } else {
    std::ostringstream os;
    os << "bound = " << ss::format_double(r.bound) << "\n";
    os << "spread = " << ss::format_double(r.spread) << "\n";
    os << "outcome = " << r.outcome << "\n";
    os << "angles = " << ss::format_double(r.angles[0]) << " " << ss::format_double(r.angles[1]) << " "
       << ss::format_double(r.angles[2]) << " " << ss::format_double(r.angles[3]) << "\n";
    os << "converged = " << (r.converged ? "true" : "false") << "\n";
    emit(os.str(), a.out);
  }
  if (!r.converged) {
    std::cerr << "sohs-bound: restart spread " << ss::format_double(r.spread) << " exceeds tolerance "
              << ss::format_double(a.spread_tol) << "\n";
    return kExitNoConvergence;
  }
  return kExitOk;
}

// --------------------------------------------------------------- selftest --

struct SelftestArgs {
  std::string scenario_path;
  std::string out;
  double fidelity_gate = 1e-8;
  double observable_gate = 1e-8;
};

int cmd_selftest(const SelftestArgs& a) {
  ss::ScenarioDocument doc = ss::load_scenario(a.scenario_path);
  if (!doc.realization) {
    throw ss::ValidationError("scenario has no selftest block (bob_observable + separable decomposition)");
  }
  ss::SelfTestCertificate cert = ss::extract_local_unitaries(*doc.realization);
  emit(ss::certificate_to_json(cert), a.out);
  bool pass = cert.state_fidelity >= 1.0 - a.fidelity_gate && cert.observable_residual <= a.observable_gate;
  if (!pass) {
    std::cerr << "selftest: gate failed (fidelity = " << ss::format_double(cert.state_fidelity)
              << ", observable residual = " << ss::format_double(cert.observable_residual) << ")\n";
    return kExitSelfTestGate;
  }
  return kExitOk;
}

// ------------------------------------------------------------- randomness --

struct RandomnessArgs {
  std::string scenario_path;
  int eve_dim = 4;
  int restarts = 100;
  std::optional<std::uint64_t> seed;
  double constraint_tol = 1e-9;
  double certified_tol = 1e-9;
  std::string out;
};

int cmd_randomness(const RandomnessArgs& a) {
  ss::ScenarioDocument doc = ss::load_scenario(a.scenario_path);
  ss::ProbTable table = ss::joint_probability(doc.scenario);
  double w = ss::witness_value(table);

  // Certified frame: a maximally violating scenario whose Bob measurement has
  // the projector-times-identity shape pins G to 1/4 for every eavesdropper.
  if (std::abs(w - 1.0) <= a.certified_tol) {
    ss::Index aux_dim = doc.scenario.bob().dim() / 4;
    ss::CVec aux = ss::CVec::Zero(aux_dim);
    aux(0) = 1.0;
    std::vector<ss::CMat> eve_elements;
    eve_elements.push_back(ss::CMat::Identity(1, 1));
    for (int b = 1; b < 4; ++b) eve_elements.push_back(ss::CMat::Zero(1, 1));
    try {
      ss::RandomnessReport report =
          ss::certified_guessing_probability(doc.scenario.bob(), aux, ss::Povm(std::move(eve_elements)));
      emit(ss::randomness_report_to_json(report, "certified", true, 0), a.out);
      return kExitOk;
    } catch (const ss::ValidationError&) {
      // Bob's POVM is not of the certified shape; fall back to the search.
    }
  }

  ss::OptimizerConfig cfg;
  cfg.restarts = a.restarts;
  cfg.constraint_tol = a.constraint_tol;
  cfg.seed = resolve_seed(a.seed, doc.seed, cfg.seed);
  ss::EveSearchResult res = ss::eve_search(table, a.eve_dim, cfg);
  emit(ss::randomness_report_to_json(res.best, "eve-search", res.found_feasible, res.feasible_count), a.out);
  if (!res.found_feasible) {
    std::cerr << "randomness: no strategy reproduced the table within " << ss::format_double(a.constraint_tol)
              << " (best violation " << ss::format_double(res.best_violation) << ")\n";
    return kExitInfeasible;
  }
  return kExitOk;
}

// ------------------------------------------------------------------- nlhv --

struct NlhvArgs {
  std::string table_path;
  std::string out;
  double normalization_tol = 1e-9;
  double max_reproduction_error = 1e-15;
};

int cmd_nlhv(const NlhvArgs& a) {
  ss::ProbTable p = ss::load_prob_table(a.table_path, a.normalization_tol);
  ss::NLHVModel model = ss::build_nlhv_model(p);
  ss::ProbTable repro = ss::nlhv_prob_table(model);
  double err = (repro.matrix() - p.matrix()).cwiseAbs().maxCoeff();
  if (err > a.max_reproduction_error) {
    throw ss::InconsistencyError("hidden-variable model misses the table by " + ss::format_double(err));
  }
  std::string summary = "atoms = " + std::to_string(model.lambda1_weights().size()) + " x " +
                        std::to_string(model.lambda2_weights().size()) +
                        ", reproduction_error = " + ss::format_double(err) + "\n";
  if (a.out.empty()) {
    std::cout << ss::nlhv_to_json(model) << "\n";
    std::cerr << summary;
  } else {
    ss::save_nlhv(model, a.out);
    std::cout << summary;
  }
  return kExitOk;
}

// --------------------------------------------------------------- fixtures --

ss::Scenario scenario_from_realization(const ss::Realization& r) {
  std::vector<ss::SourceComponent> comps;
  for (const ss::SeparableTerm& t : *r.decomposition) {
    comps.push_back(ss::SourceComponent{t.weight, ss::DensityOperator(t.psi1 * t.psi1.adjoint()),
                                        ss::DensityOperator(t.psi2 * t.psi2.adjoint())});
  }
  return ss::Scenario(ss::SourceEnsemble(std::move(comps)), ss::bell_basis(ss::BellOrdering::canonical()),
                      ss::povm_from_observable(r.bob_observable));
}

struct FixturesArgs {
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

int cmd_fixtures(const FixturesArgs& a) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  if (ec) throw ss::IoError("cannot create directory " + a.out_dir + ": " + ec.message());
  auto path = [&](const char* name) { return (fs::path(a.out_dir) / name).string(); };

  // Both sources maximally entangled, both parties reading the Bell basis.
  ss::save_scenario(ss::ScenarioDocument{ss::ideal_scenario(), ss::BellOrdering::canonical(), std::nullopt,
                                         ss::ideal_realization(1, 1)},
                    path("ideal.json"));

  // Classical model that saturates the witness bound of 1/2.
  ss::save_scenario(
      ss::ScenarioDocument{ss::saturating_scenario(), ss::BellOrdering::canonical(), std::nullopt, std::nullopt},
      path("fact1_saturating.json"));

  // 101x101 grid over both Werner parameters.
  ss::SweepSpec grid;
  grid.alpha1 = ss::SweepAxis{0.0, 1.0, 0.01};
  grid.alpha2 = ss::SweepAxis{0.0, 1.0, 0.01};
  grid.format = "csv";
  ss::save_sweep_spec(grid, path("werner_grid.json"));

  // Ideal realization hidden behind local basis changes on Bob's qubits.
  std::uint64_t seed = a.seed.value_or(kFixtureSeed);
  std::mt19937_64 rng(seed);
  ss::Realization disguised = ss::disguised_ideal_realization(1, 1, rng);
  ss::save_scenario(
      ss::ScenarioDocument{scenario_from_realization(disguised), ss::BellOrdering::canonical(), seed, disguised},
      path("disguised_ideal.json"));

  // Werner sources at alpha = 0.8: steerable but not maximally violating, so
  // the self-test gate rejects it.
  ss::Realization werner = ss::werner_realization(0.8, 0.8);
  ss::save_scenario(
      ss::ScenarioDocument{scenario_from_realization(werner), ss::BellOrdering::canonical(), std::nullopt, werner},
      path("werner08.json"));

  std::cout << "wrote 5 fixtures to " << a.out_dir << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------- main --

int run(int argc, char** argv) {
  CLI::App app{"swap-steering toolkit: witness evaluation, classical bounds, self-testing, randomness"};
  app.require_subcommand(1);

  WitnessArgs wa;
  CLI::App* witness = app.add_subcommand("witness", "Evaluate the steering witness for a scenario file");
  witness->add_option("--scenario", wa.scenario_path, "Scenario JSON file")->required();
  witness->add_option("--out", wa.out, "Write the report to this file (JSON)");
  witness->add_flag("--json", wa.json_out, "Emit JSON instead of text");
  witness->add_option("--consistency-tol", wa.consistency_tol, "Allowed gap between the two witness forms");
  witness->add_option("--steer-tol", wa.steer_tol, "Margin above 1/2 required for the steerable verdict");

  SweepArgs ga;
  CLI::App* sweep = app.add_subcommand("werner-sweep", "Sweep the witness over a grid of Werner parameters");
  sweep->add_option("--spec", ga.spec_path, "Sweep specification JSON file")->required();
  sweep->add_option("--out", ga.out, "Output file (overrides the spec)");
  sweep->add_option("--format", ga.format, "Output format (overrides the spec)")
      ->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--steer-tol", ga.steer_tol, "Margin above 1/2 required for the steerable flag");

  SohsArgs sa;
  CLI::App* sohs = app.add_subcommand("sohs-bound", "Optimize the classical bound for a trusted measurement");
  sohs->add_option("--restarts", sa.restarts, "Number of optimizer restarts")->check(CLI::PositiveNumber);
  sohs->add_option("--max-iters", sa.max_iters, "Iteration cap per local search")->check(CLI::PositiveNumber);
  sohs->add_option("--step-tol", sa.step_tol, "Simplex diameter convergence tolerance");
  sohs->add_option("--spread-tol", sa.spread_tol, "Allowed spread across restart optima");
  std::uint64_t sohs_seed = 0;
  CLI::Option* sohs_seed_opt = sohs->add_option("--seed", sohs_seed, "Optimizer seed");
  sohs->add_option("--povm", sa.povm, "Trusted measurement: bell or computational-product")
      ->check(CLI::IsMember({"bell", "computational-product"}));
  sohs->add_option("--out", sa.out, "Write the report to this file (JSON)");
  sohs->add_flag("--json", sa.json_out, "Emit JSON instead of text");

  SelftestArgs ta;
  CLI::App* selftest = app.add_subcommand("selftest", "Extract local unitaries and certify a realization");
  selftest->add_option("--scenario", ta.scenario_path, "Scenario JSON file with a selftest block")->required();
  selftest->add_option("--out", ta.out, "Write the certificate to this file (JSON)");
  selftest->add_option("--fidelity-gate", ta.fidelity_gate, "Allowed fidelity deficit for exit 0");
  selftest->add_option("--observable-gate", ta.observable_gate, "Allowed observable residual for exit 0");

  RandomnessArgs ra;
  CLI::App* randomness = app.add_subcommand("randomness", "Certify output randomness or search for an eavesdropper");
  randomness->add_option("--scenario", ra.scenario_path, "Scenario JSON file")->required();
  randomness->add_option("--eve-dim", ra.eve_dim, "Eavesdropper Hilbert-space dimension (1..16)")
      ->check(CLI::Range(1, 16));
  randomness->add_option("--restarts", ra.restarts, "Search restarts")->check(CLI::PositiveNumber);
  std::uint64_t rand_seed = 0;
  CLI::Option* rand_seed_opt = randomness->add_option("--seed", rand_seed, "Search seed");
  randomness->add_option("--constraint-tol", ra.constraint_tol, "Allowed deviation from the target table");
  randomness->add_option("--certified-tol", ra.certified_tol, "Allowed witness deficit for the certified path");
  randomness->add_option("--out", ra.out, "Write the report to this file (JSON)");

  NlhvArgs na;
  CLI::App* nlhv = app.add_subcommand("nlhv", "Construct a network-local hidden-variable model for a table");
  nlhv->add_option("--table", na.table_path, "Probability table JSON file")->required();
  nlhv->add_option("--out", na.out, "Write the model to this file (JSON)");
  nlhv->add_option("--normalization-tol", na.normalization_tol, "Allowed deviation of the input total from 1");
  nlhv->add_option("--max-reproduction-error", na.max_reproduction_error, "Allowed model reproduction error");

  FixturesArgs fa;
  CLI::App* fixtures = app.add_subcommand("fixtures", "Write the bundled example files");
  fixtures->add_option("--out", fa.out_dir, "Output directory")->required();
  std::uint64_t fix_seed = 0;
  CLI::Option* fix_seed_opt = fixtures->add_option("--seed", fix_seed, "Seed for the disguised fixture");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (sohs_seed_opt->count() > 0) sa.seed = sohs_seed;
  if (rand_seed_opt->count() > 0) ra.seed = rand_seed;
  if (fix_seed_opt->count() > 0) fa.seed = fix_seed;

  if (witness->parsed()) return cmd_witness(wa);
  if (sweep->parsed()) return cmd_werner_sweep(ga);
  if (sohs->parsed()) return cmd_sohs_bound(sa);
  if (selftest->parsed()) return cmd_selftest(ta);
  if (randomness->parsed()) return cmd_randomness(ra);
  if (nlhv->parsed()) return cmd_nlhv(na);
  if (fixtures->parsed()) return cmd_fixtures(fa);
  return kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ss::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ss::SelfTestError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSelfTestGate;
  } catch (const ss::InconsistencyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInconsistency;
  } catch (const ss::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
