#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "swapsteer/network.hpp"
#include "swapsteer/randomness.hpp"
#include "swapsteer/selftest.hpp"
#include "swapsteer/sohs.hpp"

namespace swapsteer {

// Filesystem failures (missing file, unwritable path); the CLI maps these to
// their own exit code, distinct from validation failures.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Scenario document: sources + measurements (+ optional self-test block
// holding Bob's observable and the separable description of the state).
// All matrices are nested row-major arrays of [re, im] pairs.  Unknown JSON
// keys are rejected everywhere.
struct ScenarioDocument {
  Scenario scenario;
  BellOrdering ordering;
  std::optional<std::uint64_t> seed;
  std::optional<Realization> realization;
};

ScenarioDocument load_scenario(const std::string& path);
std::string scenario_to_json(const ScenarioDocument& doc);
ScenarioDocument scenario_from_json(const std::string& text);
void save_scenario(const ScenarioDocument& doc, const std::string& path);

// 4x4 outcome table document {"p": [[...]]}.  Totals off 1 by more than
// `normalization_tol` are rejected; smaller drift is renormalized away.
ProbTable load_prob_table(const std::string& path, double normalization_tol = 1e-9);
void save_prob_table(const ProbTable& p, const std::string& path);

NLHVModel nlhv_from_json(const std::string& text);
std::string nlhv_to_json(const NLHVModel& m);
void save_nlhv(const NLHVModel& m, const std::string& path);
NLHVModel load_nlhv(const std::string& path);

std::string certificate_to_json(const SelfTestCertificate& cert);
void save_certificate(const SelfTestCertificate& cert, const std::string& path);

std::string randomness_report_to_json(const RandomnessReport& report, const std::string& mode, bool feasible,
                                      int feasible_count);
void save_randomness_report(const RandomnessReport& report, const std::string& mode, bool feasible,
                            int feasible_count, const std::string& path);

// Axis of a parameter sweep: min/max inclusive with a positive step.
struct SweepAxis {
  double min = 0.0;
  double max = 1.0;
  double step = 0.01;
};
struct SweepSpec {
  SweepAxis alpha1;
  SweepAxis alpha2;
  std::optional<std::string> output;
  std::string format = "csv";
};
SweepSpec load_sweep_spec(const std::string& path);
std::string sweep_spec_to_json(const SweepSpec& spec);
void save_sweep_spec(const SweepSpec& spec, const std::string& path);
std::vector<double> sweep_axis_points(const SweepAxis& axis);

// Shared helpers for tests and tools.
std::string matrix_to_json_text(const CMat& m);
CMat matrix_from_json_text(const std::string& text);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::string format_double(double v);  // 17 significant digits, '.' separator

}  // namespace swapsteer
