#include "swapsteer/serialize.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace swapsteer {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected a JSON object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw ValidationError(where + ": unknown field '" + item.key() + "'");
    }
  }
}

const json& require_field(const json& j, const std::string& key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(where + ": missing field '" + key + "'");
  return *it;
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError(where + ": expected a number");
  return j.get<double>();
}

Complex complex_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ValidationError(where + ": expected an [re, im] pair");
  return Complex{as_number(j[0], where), as_number(j[1], where)};
}

json complex_to_json(const Complex& c) { return json::array({c.real(), c.imag()}); }

CMat matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ValidationError(where + ": expected a non-empty nested array");
  const Index rows = static_cast<Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) throw ValidationError(where + ": expected rows of [re, im] pairs");
  const Index cols = static_cast<Index>(j[0].size());
  CMat m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    if (!j[static_cast<std::size_t>(r)].is_array() ||
        static_cast<Index>(j[static_cast<std::size_t>(r)].size()) != cols) {
      throw ValidationError(where + ": ragged matrix rows");
    }
    for (Index c = 0; c < cols; ++c) {
      m(r, c) = complex_from_json(j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)], where);
    }
  }
  return m;
}

json matrix_to_json(const CMat& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

CVec vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ValidationError(where + ": expected a non-empty array");
  CVec v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = complex_from_json(j[static_cast<std::size_t>(i)], where);
  return v;
}

json vector_to_json(const CVec& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

BellLabel bell_label_from_name(const std::string& name) {
  if (name == "phi+") return BellLabel::PhiPlus;
  if (name == "phi-") return BellLabel::PhiMinus;
  if (name == "psi+") return BellLabel::PsiPlus;
  if (name == "psi-") return BellLabel::PsiMinus;
  throw ValidationError("bell_ordering: unknown label '" + name + "' (expected phi+/phi-/psi+/psi-)");
}

Povm povm_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ValidationError(where + ": expected an array of matrices");
  std::vector<CMat> elements;
  for (const json& e : j) elements.push_back(matrix_from_json(e, where));
  return Povm(std::move(elements));
}

json povm_to_json(const Povm& p) {
  json out = json::array();
  for (const CMat& e : p.elements()) out.push_back(matrix_to_json(e));
  return out;
}

json parse_text(const std::string& text, const std::string& where) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError(where + ": malformed JSON");
  return j;
}

SweepAxis axis_from_json(const json& j, const std::string& where) {
  reject_unknown_keys(j, {"min", "max", "step"}, where);
  SweepAxis axis;
  axis.min = as_number(require_field(j, "min", where), where);
  axis.max = as_number(require_field(j, "max", where), where);
  axis.step = as_number(require_field(j, "step", where), where);
  if (!(axis.step > 0.0)) throw ValidationError(where + ": step must be positive");
  if (axis.min > axis.max) throw ValidationError(where + ": min exceeds max");
  if (axis.min < -1.0 / 3.0 - 1e-12 || axis.max > 1.0 + 1e-12) {
    throw ValidationError(where + ": bounds must lie within [-1/3, 1]");
  }
  return axis;
}

json axis_to_json(const SweepAxis& axis) {
  return json{{"min", axis.min}, {"max", axis.max}, {"step", axis.step}};
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failure: " + path);
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open file for writing: " + path);
  out << content;
  out.flush();
  if (!out) throw IoError("write failure: " + path);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ScenarioDocument scenario_from_json(const std::string& text) {
  const json j = parse_text(text, "scenario");
  reject_unknown_keys(j, {"sources", "alice", "bob", "bell_ordering", "seed", "selftest"}, "scenario");

  BellOrdering ordering = BellOrdering::canonical();
  if (j.contains("bell_ordering")) {
    const json& jo = j["bell_ordering"];
    if (!jo.is_array() || jo.size() != 4) {
      throw ValidationError("scenario: bell_ordering must list four labels");
    }
    std::array<BellLabel, 4> labels{};
    for (std::size_t i = 0; i < 4; ++i) {
      if (!jo[i].is_string()) throw ValidationError("scenario: bell_ordering entries must be strings");
      labels[i] = bell_label_from_name(jo[i].get<std::string>());
    }
    ordering = BellOrdering(labels);
  }

  const json& js = require_field(j, "sources", "scenario");
  if (!js.is_array() || js.empty()) throw ValidationError("scenario: sources must be a non-empty array");
  std::vector<SourceComponent> components;
  for (const json& jc : js) {
    reject_unknown_keys(jc, {"weight", "rho1", "rho2"}, "scenario source");
    components.push_back(SourceComponent{
        as_number(require_field(jc, "weight", "scenario source"), "scenario source weight"),
        DensityOperator(matrix_from_json(require_field(jc, "rho1", "scenario source"), "rho1")),
        DensityOperator(matrix_from_json(require_field(jc, "rho2", "scenario source"), "rho2"))});
  }
  SourceEnsemble ensemble(std::move(components));

  const json& ja = require_field(j, "alice", "scenario");
  Povm alice = (ja.is_string() && ja.get<std::string>() == "bell") ? bell_basis(ordering)
                                                                  : povm_from_json(ja, "alice");
  Povm bob = povm_from_json(require_field(j, "bob", "scenario"), "bob");

  std::optional<std::uint64_t> seed;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ValidationError("scenario: seed must be a non-negative integer");
    seed = j["seed"].get<std::uint64_t>();
  }

  std::optional<Realization> realization;
  if (j.contains("selftest")) {
    const json& jt = j["selftest"];
    reject_unknown_keys(jt, {"bob_observable", "decomposition"}, "selftest");
    std::vector<SeparableTerm> terms;
    const json& jd = require_field(jt, "decomposition", "selftest");
    if (!jd.is_array() || jd.empty()) throw ValidationError("selftest: decomposition must be a non-empty array");
    for (const json& jterm : jd) {
      reject_unknown_keys(jterm, {"weight", "psi1", "psi2"}, "selftest term");
      terms.push_back(SeparableTerm{as_number(require_field(jterm, "weight", "selftest term"), "selftest weight"),
                                    vector_from_json(require_field(jterm, "psi1", "selftest term"), "psi1"),
                                    vector_from_json(require_field(jterm, "psi2", "selftest term"), "psi2")});
    }
    Realization r{DensityOperator(ensemble.joint_state()),
                  matrix_from_json(require_field(jt, "bob_observable", "selftest"), "bob_observable"),
                  ensemble.dim_b1(), ensemble.dim_b2(), std::move(terms)};
    validate_realization(r);
    realization = std::move(r);
  }

  return ScenarioDocument{Scenario(std::move(ensemble), std::move(alice), std::move(bob)), ordering, seed,
                          std::move(realization)};
}

ScenarioDocument load_scenario(const std::string& path) { return scenario_from_json(read_text_file(path)); }

std::string scenario_to_json(const ScenarioDocument& doc) {
  json j;
  json sources = json::array();
  for (const SourceComponent& c : doc.scenario.ensemble().components()) {
    sources.push_back(json{{"weight", c.weight},
                           {"rho1", matrix_to_json(c.rho1.matrix())},
                           {"rho2", matrix_to_json(c.rho2.matrix())}});
  }
  j["sources"] = std::move(sources);
  j["alice"] = povm_to_json(doc.scenario.alice());
  j["bob"] = povm_to_json(doc.scenario.bob());
  json labels = json::array();
  for (int a = 0; a < 4; ++a) labels.push_back(bell_label_name(doc.ordering.label(a)));
  j["bell_ordering"] = std::move(labels);
  if (doc.seed) j["seed"] = *doc.seed;
  if (doc.realization) {
    json jt;
    jt["bob_observable"] = matrix_to_json(doc.realization->bob_observable);
    json terms = json::array();
    if (doc.realization->decomposition) {
      for (const SeparableTerm& t : *doc.realization->decomposition) {
        terms.push_back(json{{"weight", t.weight}, {"psi1", vector_to_json(t.psi1)}, {"psi2", vector_to_json(t.psi2)}});
      }
    }
    jt["decomposition"] = std::move(terms);
    j["selftest"] = std::move(jt);
  }
  return j.dump(1);
}

void save_scenario(const ScenarioDocument& doc, const std::string& path) {
  write_text_file(path, scenario_to_json(doc) + "\n");
}

ProbTable load_prob_table(const std::string& path, double normalization_tol) {
  const json j = parse_text(read_text_file(path), "prob table");
  reject_unknown_keys(j, {"p"}, "prob table");
  const json& jp = require_field(j, "p", "prob table");
  if (!jp.is_array() || jp.size() != 4) throw ValidationError("prob table: expected 4 rows of 4 real numbers");
  Eigen::Matrix4d p;
  for (Index r = 0; r < 4; ++r) {
    const json& jrow = jp[static_cast<std::size_t>(r)];
    if (!jrow.is_array() || jrow.size() != 4) throw ValidationError("prob table: expected 4 rows of 4 real numbers");
    for (Index c = 0; c < 4; ++c) {
      p(r, c) = as_number(jrow[static_cast<std::size_t>(c)], "prob table entry");
    }
  }
  double total = 0.0;
  for (Index r = 0; r < 4; ++r)
    for (Index c = 0; c < 4; ++c) {
      if (p(r, c) < -1e-12) throw ValidationError("prob table: negative entry");
      total += p(r, c);
    }
  if (std::abs(total - 1.0) > normalization_tol) {
    throw ValidationError("prob table: entries do not sum to 1 within " + format_double(normalization_tol));
  }
  return ProbTable::from_matrix(p / total);
}

void save_prob_table(const ProbTable& p, const std::string& path) {
  json rows = json::array();
  for (int a = 0; a < 4; ++a) {
    json row = json::array();
    for (int b = 0; b < 4; ++b) row.push_back(p.p(a, b));
    rows.push_back(std::move(row));
  }
  write_text_file(path, json{{"p", std::move(rows)}}.dump(1) + "\n");
}

NLHVModel nlhv_from_json(const std::string& text) {
  const json j = parse_text(text, "nlhv");
  reject_unknown_keys(j, {"lambda1_weights", "lambda2_weights", "responses"}, "nlhv");
  const json& j1 = require_field(j, "lambda1_weights", "nlhv");
  const json& j2 = require_field(j, "lambda2_weights", "nlhv");
  const json& jr = require_field(j, "responses", "nlhv");
  if (!j1.is_array() || !j2.is_array() || !jr.is_array()) throw ValidationError("nlhv: malformed fields");
  std::vector<double> w1, w2;
  for (const json& w : j1) w1.push_back(as_number(w, "nlhv lambda1"));
  for (const json& w : j2) w2.push_back(as_number(w, "nlhv lambda2"));
  std::vector<std::vector<NLHVResponse>> responses;
  for (const json& jrow : jr) {
    if (!jrow.is_array()) throw ValidationError("nlhv: responses must be a nested array");
    std::vector<NLHVResponse> row;
    for (const json& jcell : jrow) {
      reject_unknown_keys(jcell, {"alice", "bob"}, "nlhv response");
      NLHVResponse resp{};
      const json& jalice = require_field(jcell, "alice", "nlhv response");
      const json& jbob = require_field(jcell, "bob", "nlhv response");
      if (!jalice.is_array() || jalice.size() != 4 || !jbob.is_array() || jbob.size() != 4) {
        throw ValidationError("nlhv: responses must hold 4-entry distributions");
      }
      for (std::size_t i = 0; i < 4; ++i) {
        resp.alice[i] = as_number(jalice[i], "nlhv response");
        resp.bob[i] = as_number(jbob[i], "nlhv response");
      }
      row.push_back(resp);
    }
    responses.push_back(std::move(row));
  }
  return NLHVModel(std::move(w1), std::move(w2), std::move(responses));
}

std::string nlhv_to_json(const NLHVModel& m) {
  json j;
  j["lambda1_weights"] = m.lambda1_weights();
  j["lambda2_weights"] = m.lambda2_weights();
  json rows = json::array();
  for (std::size_t l1 = 0; l1 < m.lambda1_weights().size(); ++l1) {
    json row = json::array();
    for (std::size_t l2 = 0; l2 < m.lambda2_weights().size(); ++l2) {
      const NLHVResponse& r = m.response(l1, l2);
      row.push_back(json{{"alice", r.alice}, {"bob", r.bob}});
    }
    rows.push_back(std::move(row));
  }
  j["responses"] = std::move(rows);
  return j.dump(1);
}

void save_nlhv(const NLHVModel& m, const std::string& path) { write_text_file(path, nlhv_to_json(m) + "\n"); }

NLHVModel load_nlhv(const std::string& path) { return nlhv_from_json(read_text_file(path)); }

std::string certificate_to_json(const SelfTestCertificate& cert) {
  json j;
  j["sos_residuals"] = cert.sos_residuals;
  j["max_sos_residual"] = cert.max_sos_residual;
  j["bob_unitarity_residual"] = cert.bob_unitarity_residual;
  j["u1"] = matrix_to_json(cert.u1);
  j["u2"] = matrix_to_json(cert.u2);
  j["state_fidelity"] = cert.state_fidelity;
  j["observable_residual"] = cert.observable_residual;
  j["p1"] = matrix_to_json(cert.p1);
  j["p2"] = matrix_to_json(cert.p2);
  j["commutant_residual"] = cert.commutant_residual;
  return j.dump(1);
}

void save_certificate(const SelfTestCertificate& cert, const std::string& path) {
  write_text_file(path, certificate_to_json(cert) + "\n");
}

std::string randomness_report_to_json(const RandomnessReport& report, const std::string& mode, bool feasible,
                                      int feasible_count) {
  json j;
  j["guessing_probability"] = report.guessing_probability;
  j["min_entropy_bits"] = report.min_entropy_bits;
  j["constraint_violation"] = report.constraint_violation;
  j["mode"] = mode;
  j["feasible"] = feasible;
  j["feasible_count"] = feasible_count;
  return j.dump(1);
}

void save_randomness_report(const RandomnessReport& report, const std::string& mode, bool feasible,
                            int feasible_count, const std::string& path) {
  write_text_file(path, randomness_report_to_json(report, mode, feasible, feasible_count) + "\n");
}

SweepSpec load_sweep_spec(const std::string& path) {
  const json j = parse_text(read_text_file(path), "sweep spec");
  reject_unknown_keys(j, {"alpha1", "alpha2", "output", "format"}, "sweep spec");
  SweepSpec spec;
  spec.alpha1 = axis_from_json(require_field(j, "alpha1", "sweep spec"), "sweep spec alpha1");
  spec.alpha2 = j.contains("alpha2") ? axis_from_json(j["alpha2"], "sweep spec alpha2") : spec.alpha1;
  if (j.contains("output")) {
    if (!j["output"].is_string()) throw ValidationError("sweep spec: output must be a string");
    spec.output = j["output"].get<std::string>();
  }
  if (j.contains("format")) {
    if (!j["format"].is_string()) throw ValidationError("sweep spec: format must be a string");
    spec.format = j["format"].get<std::string>();
  }
  if (spec.format != "csv" && spec.format != "json") {
    throw ValidationError("sweep spec: format must be 'csv' or 'json'");
  }
  return spec;
}

std::string sweep_spec_to_json(const SweepSpec& spec) {
  json j;
  j["alpha1"] = axis_to_json(spec.alpha1);
  j["alpha2"] = axis_to_json(spec.alpha2);
  if (spec.output) j["output"] = *spec.output;
  j["format"] = spec.format;
  return j.dump(1);
}

void save_sweep_spec(const SweepSpec& spec, const std::string& path) {
  write_text_file(path, sweep_spec_to_json(spec) + "\n");
}

std::vector<double> sweep_axis_points(const SweepAxis& axis) {
  if (!(axis.step > 0.0)) throw ValidationError("sweep axis: step must be positive");
  const long long n = std::llround((axis.max - axis.min) / axis.step) + 1;
  if (n < 1 || n > 1000000) throw ValidationError("sweep axis: invalid point count");
  std::vector<double> points;
  points.reserve(static_cast<std::size_t>(n));
  for (long long k = 0; k < n; ++k) {
    double v = axis.min + static_cast<double>(k) * axis.step;
    if (v > axis.max + axis.step * 0.5) break;
    points.push_back(v);
  }
  return points;
}

std::string matrix_to_json_text(const CMat& m) { return matrix_to_json(m).dump(); }

CMat matrix_from_json_text(const std::string& text) {
  return matrix_from_json(parse_text(text, "matrix"), "matrix");
}

}  // namespace swapsteer
