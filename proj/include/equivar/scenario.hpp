#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "equivar/action.hpp"
#include "equivar/errors.hpp"
#include "equivar/factored_model.hpp"
#include "equivar/nir/dataset.hpp"
#include "equivar/reparam.hpp"
#include "equivar/translation.hpp"

namespace equivar {

inline constexpr int kScenarioSchemaVersion = 1;

// A second model sitting between the machine and the human, with translations
// machine -> surrogate -> human.
struct SurrogateSpec {
  FactoredModel model;
  Translation to_surrogate;
  Translation to_human;
};

struct Scenario {
  std::string name;
  std::string description;
  nlohmann::json metadata = nlohmann::json::object();
  // For mixture scenarios the machine is always flatten(*mixture).
  FactoredModel machine;
  FactoredModel human;
  Translation translation;
  // Default human variable to forecast in a Turing session.
  std::optional<std::string> query{};
  // Claims zero-discrepancy brute equivariance at k = 1; validate checks it
  // when the systems are enumerable.
  bool equivariant = false;
  // Machine actions expected to pass; validate checks them with verify_region.
  std::vector<CompoundAction> region{};
  std::optional<MixtureModel> mixture{};
  std::optional<nir::DatasetRule> nir{};
  std::optional<SurrogateSpec> surrogate{};
};

// Codec. Every *_from_json throws ParseError whose field is a JSON pointer
// rooted at `field`.
nlohmann::json model_to_json(const FactoredModel& model);
FactoredModel model_from_json(const nlohmann::json& j, const std::string& field = "");
nlohmann::json translation_to_json(const Translation& t);
Translation translation_from_json(const nlohmann::json& j, const VariableSystem& source, const VariableSystem& target,
                                  const std::string& field = "");
nlohmann::json mixture_to_json(const MixtureModel& mix);
MixtureModel mixture_from_json(const nlohmann::json& j, const std::string& field = "");

nlohmann::json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);
// Parses text; syntax errors carry the line number.
Scenario parse_scenario(std::string_view text);

// Empty when the scenario is sound. Runs the structural checks, then the
// smoke checks the scenario declares (skipped past `cap` states).
std::vector<Diagnostic> validate(const Scenario& s, std::uint64_t cap = kDefaultStateCap);

// "builtin:<name>" or a file path. Parses and validates; throws
// UnknownScenario, ParseError or ValidationError.
Scenario load_scenario(std::string_view spec);

std::vector<std::string> builtin_names();
// Throws UnknownScenario.
Scenario builtin(std::string_view name);
// One knob per period; the selected period's knob alone drives temperature.
MixtureModel builtin_mixture(std::size_t periods, std::string selector = "day");
// Monolithic thermostat: `knobs` binary knobs into one logistic temperature.
FactoredModel builtin_knob_monolith(std::size_t knobs);

// Wheel setting -> display reading of the basic thermostat (wheel 1..8).
std::size_t thermostat_display(std::size_t wheel);

// Nine bins of the gaussian_unit output, split at -1.5, -0.5, ..., 5.5; bin
// labels are the integer centers -2..6.
std::vector<double> gaussian_bin_edges();
std::vector<double> gaussian_bin_probabilities(double mean, double stddev);

// Brief listing used by GET /api/scenarios.
nlohmann::json scenario_summary(const Scenario& s);

}  // namespace equivar
