#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "equivar/scenario.hpp"

namespace equivar {

using nlohmann::json;

namespace {

std::vector<std::string> numbered(std::size_t from, std::size_t to, const std::string& prefix = "") {
  std::vector<std::string> out;
  for (std::size_t v = from; v <= to; ++v) out.push_back(prefix + std::to_string(v));
  return out;
}

// Row r puts all its mass on values[r].
Cpd deterministic(std::size_t card, const std::vector<std::size_t>& values) {
  std::vector<double> t(card * values.size(), 0.0);
  for (std::size_t r = 0; r < values.size(); ++r) t[r * card + values[r]] = 1.0;
  return Cpd::table(std::move(t));
}

std::size_t heat_band(std::size_t wheel) { return wheel <= 2 ? 0 : wheel <= 4 ? 1 : 2; }

const std::vector<std::string> kHeat{"low", "med", "high"};
const std::vector<std::string> kComfort{"no", "yes"};

FactoredModel thermostat_machine(const std::function<std::size_t(std::size_t)>& display_of) {
  VariableSystem sys(std::vector<Variable>{{"wheel", numbered(1, 8)}, {"display", numbered(0, 10)}, {"comfort", kComfort}});
  std::vector<std::size_t> display, comfort;
  for (std::size_t w = 1; w <= 8; ++w) display.push_back(display_of(w));
  for (std::size_t d = 0; d <= 10; ++d) comfort.push_back(d == 2 ? 1 : 0);
  return FactoredModel(sys, {{}, {0}, {1}}, {Cpd::uniform(8), deterministic(11, display), deterministic(2, comfort)});
}

FactoredModel thermostat_human(const std::function<std::size_t(std::size_t)>& band_of) {
  VariableSystem sys(std::vector<Variable>{{"wheel", numbered(1, 8)}, {"heat", kHeat}, {"comfort", kComfort}});
  std::vector<std::size_t> heat;
  for (std::size_t w = 1; w <= 8; ++w) heat.push_back(band_of(w));
  return FactoredModel(sys, {{}, {0}, {1}}, {Cpd::uniform(8), deterministic(3, heat), deterministic(2, {0, 1, 0})});
}

// display -> heat as the human reads it.
std::vector<std::size_t> heat_of_display() {
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d <= 10; ++d) out.push_back(d <= 1 ? 2 : d == 2 ? 1 : 0);
  return out;
}

Translation thermostat_translation(const FactoredModel& machine, const FactoredModel& human,
                                   std::vector<std::size_t> heat_map, std::vector<std::size_t> comfort_map) {
  std::vector<std::size_t> wheel(8);
  for (std::size_t w = 0; w < 8; ++w) wheel[w] = w;
  return Translation(machine.system(), human.system(), {0, 1, 2}, {wheel, std::move(heat_map), std::move(comfort_map)});
}

json thermostat_metadata() {
  return {{"traces", {"Do(wheel=6): display 1, comfort no", "Do(wheel=4): display 2, comfort yes"}},
          {"observed_rows", {{"display", {"wheel=4", "wheel=6"}}}},
          {"extrapolated_rows", {{"display", {"wheel=1", "wheel=2", "wheel=3", "wheel=5", "wheel=7", "wheel=8"}}}},
          {"extrapolation", "display decreases monotonically in the wheel setting; readings 0 and 4..10 never occur"},
          {"heat_bands", {{"low", "wheel 1-2"}, {"med", "wheel 3-4"}, {"high", "wheel 5-8"}}}};
}

Scenario thermostat_basic() {
  FactoredModel m = thermostat_machine(thermostat_display);
  FactoredModel h = thermostat_human(heat_band);
  Translation t = thermostat_translation(m, h, heat_of_display(), {0, 1});
  return Scenario{.name = "thermostat_basic",
                  .description = "Wheel, display and comfort of a thermostat, read by a human as heat bands",
                  .metadata = thermostat_metadata(),
                  .machine = std::move(m),
                  .human = std::move(h),
                  .translation = std::move(t),
                  .query = "comfort",
                  .equivariant = true};
}

Scenario thermostat_scrambled() {
  FactoredModel m = thermostat_machine(thermostat_display);
  FactoredModel h = thermostat_human(heat_band);
  // Display readings land in the wrong bands and the comfort light is read inverted.
  std::vector<std::size_t> heat;
  for (std::size_t d = 0; d <= 10; ++d) heat.push_back(d <= 1 ? 1 : d == 2 ? 0 : d == 3 ? 2 : 0);
  Translation t = thermostat_translation(m, h, heat, {1, 0});
  json meta = thermostat_metadata();
  meta["scrambled"] = "display 3 read as high, 2 as low, 0-1 as med; comfort read inverted";
  return Scenario{.name = "thermostat_scrambled",
                  .description = "The basic thermostat under a translation that misreads display and comfort",
                  .metadata = meta,
                  .machine = std::move(m),
                  .human = std::move(h),
                  .translation = std::move(t),
                  .query = "comfort",
                  .equivariant = false};
}

Scenario thermostat_knobs() {
  FactoredModel m = builtin_knob_monolith(100);
  Translation t = Translation::identity(m.system());
  FactoredModel h = m;
  return Scenario{.name = "thermostat_knobs",
                  .description = "A thermostat with 100 binary knobs jointly driving temperature",
                  .metadata = {{"temperature", "P(warm) = logistic(-5 + 0.1 * knobs on)"},
                               {"states", "2^101"}},
                  .machine = std::move(m),
                  .human = std::move(h),
                  .translation = std::move(t),
                  .query = "temperature",
                  .equivariant = true};
}

Scenario thermostat_mixture() {
  MixtureModel mix = builtin_mixture(12, "month");
  FactoredModel m = flatten(mix);
  Translation t = Translation::identity(m.system());
  FactoredModel h = m;
  return Scenario{.name = "thermostat_mixture",
                  .description = "Twelve monthly regimes; in each month a single knob drives temperature",
                  .metadata = {{"selector", "month"}, {"active_knob", "knob<m> in month m"}},
                  .machine = std::move(m),
                  .human = std::move(h),
                  .translation = std::move(t),
                  .query = "temperature",
                  .equivariant = true,
                  .mixture = std::move(mix)};
}

const std::vector<double> kSigmas{0.5, 1.0, 2.0};

Scenario gaussian_unit() {
  const std::vector<std::string> bins = [] {
    std::vector<std::string> out;
    for (int c = -2; c <= 6; ++c) out.push_back(std::to_string(c));
    return out;
  }();
  VariableSystem ms(std::vector<Variable>{{"V1", numbered(0, 4)}, {"sigma", {"0.5", "1.0", "2.0"}}, {"V2", bins}});
  VariableSystem hs(std::vector<Variable>{{"V1", numbered(0, 4)}, {"sigma", {"0.5", "1.0", "2.0"}}, {"V2", {"low", "mid", "high"}}});
  std::vector<double> fine, coarse;
  for (std::size_t mu = 0; mu <= 4; ++mu) {
    for (double s : kSigmas) {
      const auto p = gaussian_bin_probabilities(static_cast<double>(mu), s);
      fine.insert(fine.end(), p.begin(), p.end());
      coarse.insert(coarse.end(), {p[0] + p[1] + p[2], p[3] + p[4] + p[5], p[6] + p[7] + p[8]});
    }
  }
  FactoredModel m(ms, {{}, {}, {0, 1}}, {Cpd::uniform(5), Cpd::uniform(3), Cpd::table(fine)}, {1});
  FactoredModel h(hs, {{}, {}, {0, 1}}, {Cpd::uniform(5), Cpd::uniform(3), Cpd::table(coarse)}, {1});
  Translation t(ms, hs, {0, 1, 2}, {{0, 1, 2, 3, 4}, {0, 1, 2}, {0, 0, 0, 1, 1, 1, 2, 2, 2}});
  std::vector<CompoundAction> region;
  for (std::size_t i = 0; i < 2; ++i) {
    for (ActionKind kind : {ActionKind::Observe, ActionKind::Do}) {
      for (std::size_t v = 0; v < ms.cardinality(i); ++v) region.push_back({Action{kind, i, v}});
    }
  }
  for (std::size_t v = 0; v < 9; ++v) region.push_back({Action{ActionKind::Do, 2, v}});
  return Scenario{.name = "gaussian_unit",
                  .description = "V2 ~ N(V1, sigma^2) binned into nine cells, read by a human as low/mid/high",
                  .metadata = {{"bin_edges", gaussian_bin_edges()},
                               {"coarsening", {{"low", "bins -2..0"}, {"mid", "bins 1..3"}, {"high", "bins 4..6"}}},
                               {"region", "every action on V1 and sigma, Do on V2; observing a fine V2 bin is not "
                                          "expressible in the coarse reading"}},
                  .machine = std::move(m),
                  .human = std::move(h),
                  .translation = std::move(t),
                  .query = "V2",
                  .equivariant = false,
                  .region = std::move(region)};
}

nir::DatasetRule braking_rule() {
  nir::DatasetRule r;
  r.input_dim = 6;
  r.concepts = {{"ambulance", {1, 1, 0, 0, 0, 0}, 1.0}, {"green_light", {0, 0, 1, -1, 0, 0}, 0.0}};
  r.task = {"brake", {2.0, -2.0}, 1.0};
  r.samples = 4000;
  r.train_fraction = 0.75;
  r.low = -1.0;
  r.high = 1.0;
  r.seed = 13;
  return r;
}

Scenario braking() {
  nir::DatasetRule rule = braking_rule();
  FactoredModel h = nir::rule_model(rule);
  FactoredModel m = h;
  Translation t = Translation::identity(m.system());
  return Scenario{.name = "braking",
                  .description = "Brake at an intersection: ambulance and green light concepts from six inputs",
                  .metadata = {{"rule", rule.describe()},
                               {"machine", "placeholder equal to the rule; check-nir substitutes the discretized "
                                           "trained network"}},
                  .machine = std::move(m),
                  .human = std::move(h),
                  .translation = std::move(t),
                  .query = "brake",
                  .equivariant = true,
                  .nir = std::move(rule)};
}

Scenario surrogate(bool corrupted) {
  FactoredModel original = thermostat_machine(thermostat_display);
  // The corrupted surrogate shows wheel 3 as display 2 and wheel 4 as display 1;
  // its human reads exactly that.
  auto surrogate_display = [&](std::size_t w) { return corrupted ? (w <= 2 ? 3 : w == 3 ? 2 : 1) : thermostat_display(w); };
  auto surrogate_band = [&](std::size_t w) { return corrupted ? (w <= 2 ? 0 : w == 3 ? 1 : 2) : heat_band(w); };
  FactoredModel sur = thermostat_machine(surrogate_display);
  FactoredModel h = thermostat_human(surrogate_band);
  Translation to_sur = Translation::identity(original.system());
  Translation to_human = thermostat_translation(sur, h, heat_of_display(), {0, 1});
  Translation t = thermostat_translation(original, h, heat_of_display(), {0, 1});
  const std::string name = corrupted ? "surrogate_corrupted" : "surrogate_faithful";
  return Scenario{.name = name,
                  .description = corrupted ? "A surrogate that misreports wheel 4, explained faithfully to a human"
                                           : "An exact surrogate of the basic thermostat",
                  .metadata = {{"chain", "machine -> surrogate -> human"}},
                  .machine = std::move(original),
                  .human = std::move(h),
                  .translation = std::move(t),
                  .query = "comfort",
                  .equivariant = !corrupted,
                  .surrogate = SurrogateSpec{std::move(sur), std::move(to_sur), std::move(to_human)}};
}

// Two machine switches the human only reads together, as one light that is on
// when both are. Single-switch actions cannot be translated.
Scenario two_switches() {
  const std::vector<std::string> off_on{"off", "on"};
  VariableSystem ms(std::vector<Variable>{{"switch_a", off_on}, {"switch_b", off_on}});
  VariableSystem hs(std::vector<Variable>{{"light", off_on}});
  FactoredModel machine(ms, {{}, {}}, {Cpd::uniform(2), Cpd::uniform(2)});
  FactoredModel human(hs, {{}}, {Cpd::table({0.75, 0.25})});
  Translation t(machine.system(), human.system(), {0, 0}, {{0, 0, 0, 1}});
  return Scenario{.name = "two_switches",
                  .description = "Two switches read as one light; only joint actions are readable.",
                  .metadata = json::object(),
                  .machine = std::move(machine),
                  .human = std::move(human),
                  .translation = std::move(t),
                  .query = "light",
                  .equivariant = true};
}

const std::map<std::string, std::function<Scenario()>, std::less<>>& registry() {
  static const std::map<std::string, std::function<Scenario()>, std::less<>> r{
      {"thermostat_basic", thermostat_basic},
      {"thermostat_scrambled", thermostat_scrambled},
      {"thermostat_knobs", thermostat_knobs},
      {"thermostat_mixture", thermostat_mixture},
      {"gaussian_unit", gaussian_unit},
      {"braking", braking},
      {"surrogate_faithful", [] { return surrogate(false); }},
      {"surrogate_corrupted", [] { return surrogate(true); }},
      {"two_switches", two_switches},
  };
  return r;
}

}  // namespace

std::size_t thermostat_display(std::size_t wheel) { return wheel <= 2 ? 3 : wheel <= 4 ? 2 : 1; }

std::vector<double> gaussian_bin_edges() { return {-1.5, -0.5, 0.5, 1.5, 2.5, 3.5, 4.5, 5.5}; }

std::vector<double> gaussian_bin_probabilities(double mean, double stddev) {
  // P(X <= e) = erfc(-(e - mean) / (stddev sqrt 2)) / 2
  auto cdf = [&](double e) { return 0.5 * std::erfc(-(e - mean) / (stddev * std::numbers::sqrt2)); };
  const auto edges = gaussian_bin_edges();
  std::vector<double> p;
  double below = 0.0;
  for (double e : edges) {
    const double c = cdf(e);
    p.push_back(c - below);
    below = c;
  }
  p.push_back(0.5 * std::erfc((edges.back() - mean) / (stddev * std::numbers::sqrt2)));
  return p;
}

FactoredModel builtin_knob_monolith(std::size_t knobs) {
  std::vector<Variable> vars;
  for (std::size_t k = 1; k <= knobs; ++k) vars.push_back({"knob" + std::to_string(k), {"off", "on"}});
  vars.push_back({"temperature", {"cold", "warm"}});
  std::vector<std::vector<std::size_t>> parents(knobs + 1);
  for (std::size_t k = 0; k < knobs; ++k) parents[knobs].push_back(k);
  std::vector<Cpd> cpds(knobs, Cpd::uniform(2));
  cpds.push_back(Cpd::logistic(-5.0, std::vector<double>(knobs, 0.1)));
  return FactoredModel(VariableSystem(std::move(vars)), std::move(parents), std::move(cpds));
}

MixtureModel builtin_mixture(std::size_t periods, std::string selector) {
  if (periods == 0) throw InvalidArgument("builtin_mixture: need at least one period");
  std::vector<Variable> vars;
  for (std::size_t k = 1; k <= periods; ++k) vars.push_back({"knob" + std::to_string(k), {"off", "on"}});
  vars.push_back({"temperature", {"cold", "warm"}});
  const VariableSystem sys(std::move(vars));
  std::vector<FactoredModel> comps;
  for (std::size_t s = 0; s < periods; ++s) {
    std::vector<std::vector<std::size_t>> parents(periods + 1);
    parents[periods] = {s};
    std::vector<Cpd> cpds(periods, Cpd::uniform(2));
    cpds.push_back(Cpd::table({0.8, 0.2, 0.1, 0.9}));
    comps.emplace_back(sys, std::move(parents), std::move(cpds));
  }
  return MixtureModel(Variable{std::move(selector), numbered(1, periods)},
                      std::vector<double>(periods, 1.0 / static_cast<double>(periods)), std::move(comps));
}

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& [name, unused] : registry()) out.push_back(name);
  return out;
}

Scenario builtin(std::string_view name) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw UnknownScenario("no builtin scenario named '" + std::string(name) + "'");
  return it->second();
}

}  // namespace equivar
