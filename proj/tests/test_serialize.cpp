#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <random>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "swapsteer/linalg.hpp"
#include "swapsteer/network.hpp"
#include "swapsteer/random.hpp"
#include "swapsteer/selftest.hpp"
#include "swapsteer/serialize.hpp"
#include "testutil.hpp"

using namespace swapsteer;

namespace {

// Unique scratch path; removed by TempFile's destructor.
struct TempFile {
  std::string path;
  explicit TempFile(const std::string& tag) {
    static int counter = 0;
    const char* base = std::getenv("TMPDIR");
    path = std::string(base ? base : "/tmp") + "/swapsteer_ser_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter++) + "_" + tag;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("scenario documents round trip") {
  // Scenario sources and the attached realization must agree on Bob's local
  // dimensions, so pair the plain two-qubit scenario with the junk-free model.
  ScenarioDocument doc{ideal_scenario(BellOrdering::fourier()), BellOrdering::fourier(), 1234u,
                       ideal_realization(1, 1)};
  const std::string text = scenario_to_json(doc);
  const ScenarioDocument back = scenario_from_json(text);

  CHECK((joint_probability(back.scenario).matrix() - joint_probability(doc.scenario).matrix())
            .cwiseAbs()
            .maxCoeff() < 1e-15);
  for (int a = 0; a < 4; ++a) CHECK(back.ordering.label(a) == doc.ordering.label(a));
  REQUIRE(back.seed.has_value());
  CHECK(*back.seed == 1234u);
  REQUIRE(back.realization.has_value());
  CHECK(max_abs(back.realization->bob_observable - doc.realization->bob_observable) < 1e-15);
  CHECK(max_abs(back.realization->rho.matrix() - doc.realization->rho.matrix()) < 1e-12);
  REQUIRE(back.realization->decomposition.has_value());
  CHECK(back.realization->decomposition->size() == doc.realization->decomposition->size());

  SUBCASE("file round trip") {
    TempFile f("scenario.json");
    save_scenario(doc, f.path);
    const ScenarioDocument loaded = load_scenario(f.path);
    CHECK((joint_probability(loaded.scenario).matrix() - joint_probability(doc.scenario).matrix())
              .cwiseAbs()
              .maxCoeff() < 1e-15);
  }
}

TEST_CASE("scenario parsing accepts the bell shorthand") {
  ScenarioDocument doc{saturating_scenario(), BellOrdering::canonical(), std::nullopt, std::nullopt};
  nlohmann::json j = nlohmann::json::parse(scenario_to_json(doc));
  j["alice"] = "bell";
  const ScenarioDocument back = scenario_from_json(j.dump());
  const Povm bell = bell_basis(BellOrdering::canonical());
  for (int a = 0; a < 4; ++a) CHECK(max_abs(back.scenario.alice().element(a) - bell.element(a)) < 1e-15);

  SUBCASE("the shorthand follows the declared ordering") {
    nlohmann::json jf = nlohmann::json::parse(scenario_to_json(
        ScenarioDocument{saturating_scenario(BellOrdering::fourier()), BellOrdering::fourier(), std::nullopt,
                         std::nullopt}));
    jf["alice"] = "bell";
    const ScenarioDocument bf = scenario_from_json(jf.dump());
    const Povm fourier = bell_basis(BellOrdering::fourier());
    for (int a = 0; a < 4; ++a) CHECK(max_abs(bf.scenario.alice().element(a) - fourier.element(a)) < 1e-15);
  }
}

TEST_CASE("unknown keys are rejected at every level") {
  const ScenarioDocument doc{ideal_scenario(), BellOrdering::canonical(), std::nullopt,
                             ideal_realization(1, 1)};
  const nlohmann::json base = nlohmann::json::parse(scenario_to_json(doc));

  SUBCASE("top level") {
    nlohmann::json j = base;
    j["extra"] = 1;
    CHECK_THROWS_AS(scenario_from_json(j.dump()), ValidationError);
  }
  SUBCASE("inside a source") {
    nlohmann::json j = base;
    j["sources"][0]["comment"] = "hi";
    CHECK_THROWS_AS(scenario_from_json(j.dump()), ValidationError);
  }
  SUBCASE("inside the selftest block") {
    nlohmann::json j = base;
    j["selftest"]["note"] = 2;
    CHECK_THROWS_AS(scenario_from_json(j.dump()), ValidationError);
  }
  SUBCASE("inside a decomposition term") {
    nlohmann::json j = base;
    j["selftest"]["decomposition"][0]["w"] = 0.5;
    CHECK_THROWS_AS(scenario_from_json(j.dump()), ValidationError);
  }
  SUBCASE("prob table") {
    TempFile f("table.json");
    write_text_file(f.path, "{\"p\": [[0.25,0,0,0],[0,0.25,0,0],[0,0,0.25,0],[0,0,0,0.25]], \"q\": 1}");
    CHECK_THROWS_AS(load_prob_table(f.path), ValidationError);
  }
  SUBCASE("nlhv") {
    std::mt19937_64 rng(81);
    nlohmann::json j =
        nlohmann::json::parse(nlhv_to_json(build_nlhv_model(ProbTable::from_matrix(testutil::random_table(rng)))));
    j["spare"] = true;
    CHECK_THROWS_AS(nlhv_from_json(j.dump()), ValidationError);
  }
  SUBCASE("sweep spec") {
    TempFile f("spec.json");
    write_text_file(f.path, "{\"alpha1\": {\"min\":0,\"max\":1,\"step\":0.5}, \"alphaX\": 3}");
    CHECK_THROWS_AS(load_sweep_spec(f.path), ValidationError);
  }
  SUBCASE("sweep axis") {
    TempFile f("spec.json");
    write_text_file(f.path, "{\"alpha1\": {\"min\":0,\"max\":1,\"step\":0.5,\"count\":3}}");
    CHECK_THROWS_AS(load_sweep_spec(f.path), ValidationError);
  }
}

TEST_CASE("malformed input") {
  SUBCASE("broken json text") {
    CHECK_THROWS_AS(scenario_from_json("{\"sources\": ["), ValidationError);
  }
  SUBCASE("bad seed type") {
    nlohmann::json j = nlohmann::json::parse(
        scenario_to_json(ScenarioDocument{ideal_scenario(), BellOrdering::canonical(), std::nullopt, std::nullopt}));
    j["seed"] = -3;
    CHECK_THROWS_AS(scenario_from_json(j.dump()), ValidationError);
    j["seed"] = "abc";
    CHECK_THROWS_AS(scenario_from_json(j.dump()), ValidationError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_scenario("/nonexistent/dir/none.json"), IoError);
    CHECK_THROWS_AS(read_text_file("/nonexistent/dir/none.json"), IoError);
  }
  SUBCASE("unwritable path") {
    CHECK_THROWS_AS(write_text_file("/nonexistent/dir/out.json", "x"), IoError);
  }
}

TEST_CASE("probability table files") {
  std::mt19937_64 rng(82);

  SUBCASE("round trip preserves every entry") {
    const ProbTable p = ProbTable::from_matrix(testutil::random_table(rng));
    TempFile f("table.json");
    save_prob_table(p, f.path);
    const ProbTable back = load_prob_table(f.path);
    CHECK((back.matrix() - p.matrix()).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("small drift is renormalized") {
    TempFile f("table.json");
    nlohmann::json rows = nlohmann::json::array();
    for (int a = 0; a < 4; ++a) {
      nlohmann::json row = nlohmann::json::array();
      for (int b = 0; b < 4; ++b) row.push_back((1.0 / 16.0) * (1.0 + 5e-10));
      rows.push_back(row);
    }
    write_text_file(f.path, nlohmann::json{{"p", rows}}.dump());
    const ProbTable p = load_prob_table(f.path);
    CHECK(p.matrix().sum() == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("large drift is rejected") {
    TempFile f("table.json");
    nlohmann::json rows = nlohmann::json::array();
    for (int a = 0; a < 4; ++a) {
      nlohmann::json row = nlohmann::json::array();
      for (int b = 0; b < 4; ++b) row.push_back((1.0 / 16.0) * (1.0 + 1e-6));
      rows.push_back(row);
    }
    write_text_file(f.path, nlohmann::json{{"p", rows}}.dump());
    CHECK_THROWS_AS(load_prob_table(f.path), ValidationError);
  }

  SUBCASE("negative entries are rejected") {
    TempFile f("table.json");
    write_text_file(f.path,
                    "{\"p\": [[0.3,0,0,0],[0,0.3,0,0],[0,0,0.3,0],[0,0,0,0.10000001],"
                    "[0,0,0,0]]}");
    CHECK_THROWS_AS(load_prob_table(f.path), ValidationError);
    write_text_file(f.path, "{\"p\": [[0.3,-0.0001,0,0],[0,0.3001,0,0],[0,0,0.3,0],[0,0,0,0.1]]}");
    CHECK_THROWS_AS(load_prob_table(f.path), ValidationError);
  }
}

TEST_CASE("hidden-variable model files") {
  std::mt19937_64 rng(83);
  const ProbTable target = ProbTable::from_matrix(testutil::random_table(rng));
  const NLHVModel m = build_nlhv_model(target);
  TempFile f("nlhv.json");
  save_nlhv(m, f.path);
  const NLHVModel back = load_nlhv(f.path);
  CHECK((nlhv_prob_table(back).matrix() - target.matrix()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(back.lambda1_weights().size() == m.lambda1_weights().size());
}

TEST_CASE("certificate serialization") {
  const SelfTestCertificate cert = extract_local_unitaries(ideal_realization(1, 1));
  const nlohmann::json j = nlohmann::json::parse(certificate_to_json(cert));
  CHECK(j.at("state_fidelity").get<double>() == doctest::Approx(cert.state_fidelity).epsilon(1e-15));
  CHECK(j.at("max_sos_residual").get<double>() == cert.max_sos_residual);
  CHECK(j.at("sos_residuals").size() == 4);
  CHECK(j.contains("u1"));
  CHECK(j.contains("p2"));
  CHECK(j.at("commutant_residual").get<double>() >= 0.0);
}

TEST_CASE("randomness report serialization") {
  const nlohmann::json j =
      nlohmann::json::parse(randomness_report_to_json(make_report(0.25, 0.0), "certified", true, 1));
  CHECK(j.at("guessing_probability").get<double>() == 0.25);
  CHECK(j.at("min_entropy_bits").get<double>() == 2.0);
  CHECK(j.at("mode").get<std::string>() == "certified");
  CHECK(j.at("feasible").get<bool>());
  CHECK(j.at("feasible_count").get<int>() == 1);
}

TEST_CASE("sweep specifications") {
  SUBCASE("round trip") {
    SweepSpec spec;
    spec.alpha1 = {0.0, 1.0, 0.01};
    spec.alpha2 = {0.25, 0.75, 0.25};
    spec.output = "grid.csv";
    spec.format = "csv";
    TempFile f("spec.json");
    save_sweep_spec(spec, f.path);
    const SweepSpec back = load_sweep_spec(f.path);
    CHECK(back.alpha1.step == 0.01);
    CHECK(back.alpha2.min == 0.25);
    REQUIRE(back.output.has_value());
    CHECK(*back.output == "grid.csv");
  }

  SUBCASE("unit grid axis lands on 101 points") {
    const std::vector<double> pts = sweep_axis_points({0.0, 1.0, 0.01});
    REQUIRE(pts.size() == 101);
    CHECK(pts.front() == 0.0);
    CHECK(pts.back() == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("degenerate axes") {
    const std::vector<double> single = sweep_axis_points({0.5, 0.5, 0.1});
    REQUIRE(single.size() == 1);
    CHECK(single[0] == 0.5);
    CHECK_THROWS_AS(sweep_axis_points({0.0, 1.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(sweep_axis_points({0.0, 1.0, -0.1}), ValidationError);
  }

  SUBCASE("axis bounds") {
    TempFile f("spec.json");
    write_text_file(f.path, "{\"alpha1\": {\"min\":-0.5,\"max\":1,\"step\":0.1}}");
    CHECK_THROWS_AS(load_sweep_spec(f.path), ValidationError);
    write_text_file(f.path, "{\"alpha1\": {\"min\":0,\"max\":1.5,\"step\":0.1}}");
    CHECK_THROWS_AS(load_sweep_spec(f.path), ValidationError);
    write_text_file(f.path, "{\"alpha1\": {\"min\":0.9,\"max\":0.1,\"step\":0.1}}");
    CHECK_THROWS_AS(load_sweep_spec(f.path), ValidationError);
  }

  SUBCASE("format gate") {
    TempFile f("spec.json");
    write_text_file(f.path, "{\"alpha1\": {\"min\":0,\"max\":1,\"step\":0.1}, \"format\": \"xml\"}");
    CHECK_THROWS_AS(load_sweep_spec(f.path), ValidationError);
  }
}

TEST_CASE("number and matrix formatting") {
  std::mt19937_64 rng(84);

  SUBCASE("seventeen significant digits round trip") {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 200; ++t) {
      const double v = std::ldexp(u(rng), static_cast<int>(rng() % 40) - 20);
      const std::string s = format_double(v);
      CHECK(std::strtod(s.c_str(), nullptr) == v);
      CHECK(s.find(',') == std::string::npos);
    }
    CHECK(format_double(0.25) == "0.25");
  }

  SUBCASE("matrices round trip through text") {
    const CMat m = random_unitary(3, rng);
    const CMat back = matrix_from_json_text(matrix_to_json_text(m));
    CHECK(max_abs(back - m) == 0.0);
  }

  SUBCASE("matrix entries must be re/im pairs") {
    CHECK_THROWS_AS(matrix_from_json_text("[[1.0, 2.0], [3.0, 4.0]]"), ValidationError);
    CHECK_THROWS_AS(matrix_from_json_text("[[[1.0, 0.0, 0.0]]]"), ValidationError);
  }
}
