#include "cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "equivar/nir/checkpoint.hpp"
#include "equivar/nir/transparency.hpp"
#include "equivar/reparam.hpp"
#include "equivar/report_json.hpp"
#include "equivar/service.hpp"
#include "equivar/turing.hpp"

namespace equivar::cli {

using nlohmann::json;

namespace {

// Thrown for problems with the command line or its input files.
struct UsageError : Error {
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json read_json(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) line += text[i] == '\n' ? 1 : 0;
    throw ParseError("", line, path + ": " + e.what());
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

std::size_t default_query(const Scenario& s) {
  if (s.query) return s.human.system().index_of(*s.query);
  return s.human.size() - 1;
}

// ---- verify ---------------------------------------------------------------

struct VerifyArgs {
  std::string scenario;
  std::string mode = "brute";
  std::string family = "both";
  std::string method = "auto";
  std::size_t max_compound = 1;
  double tolerance = kDefaultEquivarianceTolerance;
  std::string actions;
  std::string json_out;
};

void print_report(const json& r, std::ostream& out) {
  if (r.value("estimated", false)) {
    out << "mode: " << r["mode"].get<std::string>() << " (estimate only)\n"
        << "holds: unknown\n"
        << "cost: " << fmt(r["cost"].get<double>()) << "\n"
        << "reason: " << r["reason"].get<std::string>() << "\n";
    return;
  }
  if (r.contains("composed")) {
    for (const char* leg : {"original_to_surrogate", "surrogate_to_human", "composed"}) {
      out << leg << ": " << (r[leg]["holds"].get<bool>() ? "holds" : "fails")
          << ", max discrepancy " << fmt(r[leg]["max_discrepancy"].get<double>()) << "\n";
    }
    out << "holds: " << (r["holds"].get<bool>() ? "yes" : "no") << "\n";
    return;
  }
  out << "mode: " << r["mode"].get<std::string>() << "\n"
      << "holds: " << (r["holds"].get<bool>() ? "yes" : "no") << "\n"
      << "max discrepancy: " << fmt(r["max_discrepancy"].get<double>()) << "\n"
      << "actions: " << r["passed"] << " passed, " << r["failed"] << " failed, " << r["undefined"] << " undefined, "
      << r["ambiguous"] << " ambiguous\n"
      << "evaluations: " << r["evaluations"] << "\n"
      << "cost: " << fmt(r["cost"].get<double>()) << "\n";
  const json& cxs = r["counterexamples"];
  for (std::size_t k = 0; k < cxs.size() && k < 5; ++k) {
    out << "  counterexample " << cxs[k]["label"].get<std::string>() << " at " << cxs[k]["human_state"].dump()
        << ": " << fmt(cxs[k]["lhs"].get<double>()) << " vs " << fmt(cxs[k]["rhs"].get<double>()) << "\n";
  }
}

int run_verify(const VerifyArgs& a, std::ostream& out) {
  json request{{"scenario", a.scenario},   {"mode", a.mode},     {"family", a.family},
               {"max_compound", a.max_compound}, {"method", a.method}, {"tolerance", a.tolerance}};
  if (!a.actions.empty()) {
    if (a.mode != "region") throw UsageError("--actions needs --mode region");
    const json actions = read_json(a.actions);
    if (!actions.is_array()) throw ParseError("", 0, a.actions + ": expected an array of actions");
    request["region"] = actions;
  }
  const Scenario s = load_scenario(a.scenario);
  const json report = service::execute_verify(service::verify_request_from_json(request), s);
  const bool holds = report["holds"].is_boolean() && report["holds"].get<bool>();
  if (a.json_out.empty()) {
    print_report(report, out);
  } else if (a.json_out == "-") {
    out << dump(report);
  } else {
    write_file(a.json_out, dump(report));
    print_report(report, out);
  }
  return holds ? kExitOk : kExitFailed;
}

// ---- load -----------------------------------------------------------------

int run_load(const std::string& spec, const std::string& family_text, bool human, std::ostream& out) {
  const Scenario s = load_scenario(spec);
  const ActionFamily family = parse_action_family(family_text);
  CognitiveLoadProfile p;
  const VariableSystem* sys = nullptr;
  if (human) {
    p = cognitive_load(s.human, family);
    sys = &s.human.system();
  } else if (s.mixture) {
    p = cognitive_load(*s.mixture, family);
    sys = &s.machine.system();
  } else {
    p = cognitive_load(s.machine, family);
    sys = &s.machine.system();
  }
  std::size_t width = 6;
  for (const LoadEntry& e : p.per_action) width = std::max(width, to_string(e.action, *sys).size());
  out << std::left << std::setw(static_cast<int>(width)) << "action" << "  load  considered\n";
  for (const LoadEntry& e : p.per_action) {
    out << std::left << std::setw(static_cast<int>(width)) << to_string(e.action, *sys) << "  " << std::setw(4)
        << e.load << "  ";
    for (std::size_t k = 0; k < e.considered.size(); ++k) out << (k ? "," : "") << (*sys)[e.considered[k]].name;
    out << "\n";
  }
  out << "max load: " << p.max_load << " (limit " << p.limit << ", " << (p.within_limit() ? "within" : "over")
      << ")\n";
  return kExitOk;
}

// ---- nir ------------------------------------------------------------------

const nir::DatasetRule& rule_of(const Scenario& s) {
  if (!s.nir) throw UsageError("scenario '" + s.name + "' has no NIR dataset rule");
  return *s.nir;
}

int run_train(const std::string& spec, const std::string& config_path, const std::string& out_path,
              const std::string& trace_path, std::ostream& out) {
  const Scenario s = load_scenario(spec);
  const nir::DatasetRule& rule = rule_of(s);
  const nir::TrainConfig config =
      config_path.empty() ? nir::TrainConfig{} : nir::train_config_from_json(read_json(config_path));
  const auto [train_set, test_set] = nir::split(nir::generate(rule), rule.train_fraction);
  const nir::TrainResult result = nir::train(train_set, rule.concept_names(), config);
  nir::save_checkpoint(nir::Checkpoint{result.model, config, rule}, out_path);
  if (!trace_path.empty()) write_file(trace_path, nir::loss_trace_csv(result.trace));
  const nir::Accuracy acc = nir::evaluate(result.model, test_set);
  out << "trained " << config.epochs << " epochs on " << train_set.size() << " samples\n"
      << "final loss: task " << fmt(result.trace.back().task_loss) << ", concepts "
      << fmt(result.trace.back().concept_loss) << "\n"
      << "test accuracy: task " << fmt(acc.task);
  for (std::size_t j = 0; j < acc.concepts.size(); ++j) {
    out << ", " << rule.concept_names()[j] << " " << fmt(acc.concepts[j]);
  }
  out << "\nwrote " << out_path << "\n";
  return kExitOk;
}

int run_check_nir(const std::string& model_path, const std::string& spec, const std::string& json_out,
                  std::ostream& out) {
  const nir::Checkpoint ckpt = nir::load_checkpoint(model_path);
  const Scenario s = load_scenario(spec);
  const nir::DatasetRule& rule = rule_of(s);
  if (ckpt.model.input_dim() != rule.input_dim || ckpt.model.concept_names() != rule.concept_names()) {
    throw UsageError("checkpoint does not match the scenario's inputs and concepts");
  }
  const auto [train_set, test_set] = nir::split(nir::generate(rule), rule.train_fraction);
  (void)train_set;
  const nir::Accuracy acc = nir::evaluate(ckpt.model, test_set);
  const nir::TransparencyReport t = nir::check_transparency(ckpt.model, test_set, rule);
  const json report = to_json(t.semantic);
  if (json_out == "-") {
    out << dump(report);
    return t.semantic.holds() ? kExitOk : kExitFailed;
  }
  if (!json_out.empty()) write_file(json_out, dump(report));

  const std::vector<std::string> names = rule.concept_names();
  out << "test accuracy: task " << fmt(acc.task);
  for (std::size_t j = 0; j < names.size(); ++j) out << ", " << names[j] << " " << fmt(acc.concepts[j]);
  out << "\ncells realized: " << t.discretization.cells.size() << " (" << t.discretization.empty_cells.size()
      << " empty)\n";
  for (const nir::Cell& c : t.discretization.cells) {
    out << "  ";
    for (std::size_t j = 0; j < names.size(); ++j) out << names[j] << "=" << c.concepts[j] << " ";
    out << "n=" << c.count << " y_hat=" << fmt(c.y_hat) << "\n";
  }
  out << "transparency: " << (t.semantic.holds() ? "holds" : "fails") << ", max discrepancy "
      << fmt(t.semantic.max_discrepancy) << "\n";
  // Functional interventions: zero one generated weight and count flipped decisions.
  out << "functional interventions (weight set to 0, test set):\n";
  for (std::size_t j = 0; j < names.size(); ++j) {
    std::size_t flipped = 0;
    for (std::size_t n = 0; n < test_set.size(); ++n) {
      const Eigen::VectorXd x = test_set.inputs.col(static_cast<Eigen::Index>(n));
      const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
      const bool before = ckpt.model.forward(xs).y_hat > 0.5;
      const bool after = nir::functional_intervention(ckpt.model, {{j, 0.0}}, xs).y_hat > 0.5;
      flipped += before != after ? 1 : 0;
    }
    out << "  " << names[j] << ": " << flipped << " of " << test_set.size() << " decisions change\n";
  }
  return t.semantic.holds() ? kExitOk : kExitFailed;
}

// ---- turing ---------------------------------------------------------------

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

// "do wheel=6 observe display=2" or a JSON action.
json parse_action_line(const std::string& line) {
  if (!line.empty() && line[0] == '{') return json::parse(line);
  std::istringstream in(line);
  json action = json::object();
  std::string kind, word;
  while (in >> word) {
    if (word == "do" || word == "observe") {
      kind = word;
      continue;
    }
    const auto eq = word.find('=');
    if (kind.empty() || eq == std::string::npos) throw ParseError("/action", 0, "expected 'do var=value ...'");
    action[kind][word.substr(0, eq)] = word.substr(eq + 1);
  }
  return action;
}

// "no", "no=0.3 yes=0.7" or JSON.
json parse_forecast_line(const std::string& line) {
  if (!line.empty() && (line[0] == '{' || line[0] == '"')) return json::parse(line);
  if (line.find('=') == std::string::npos) return line;
  std::istringstream in(line);
  json f = json::object();
  for (std::string word; in >> word;) {
    const auto eq = word.find('=');
    if (eq == std::string::npos) throw ParseError("/forecast", 0, "expected 'label=p ...'");
    try {
      f[word.substr(0, eq)] = std::stod(word.substr(eq + 1));
    } catch (const std::exception&) {
      throw ParseError("/forecast/" + word.substr(0, eq), 0, "expected a probability");
    }
  }
  return f;
}

void print_round(const turing::Session& s, std::ostream& out) {
  const json r = turing::round_to_json(s, s.rounds().size() - 1);
  out << "round " << r["round"] << ": " << r["label"].get<std::string>() << " | forecast "
      << (r["forecast"].is_string() ? r["forecast"].get<std::string>() : r["forecast"].dump()) << " | truth "
      << r["truth"].get<std::string>() << " | score " << fmt(r["score"].get<double>()) << " | mean "
      << fmt(r["running_mean"].get<double>()) << "\n";
}

void print_verdict(const turing::Verdict& v, std::ostream& out) {
  out << "verdict: " << (v.interpretable ? "interpretable" : "not interpretable") << " (mean score "
      << fmt(v.mean_score) << " over " << v.rounds_counted << " rounds; needs >= " << fmt(v.threshold) << " over >= "
      << v.min_rounds << ")\n";
}

struct TuringArgs {
  std::string scenario;
  std::string query;
  std::string script;
  std::string replay;
  bool interactive = false;
  std::uint64_t seed = 1;
  std::optional<double> threshold;
  std::optional<std::size_t> min_rounds;
  std::string transcript;
};

int run_turing(const TuringArgs& a, std::istream& in, std::ostream& out) {
  const auto sc = std::make_shared<const Scenario>(load_scenario(a.scenario));
  const std::string query = a.query.empty() ? sc->human.system()[default_query(*sc)].name : a.query;
  const std::size_t q = sc->human.system().index_of(query);
  const int modes = (a.script.empty() ? 0 : 1) + (a.replay.empty() ? 0 : 1) + (a.interactive ? 1 : 0);
  if (modes != 1) throw UsageError("give exactly one of --script, --replay and --interactive");

  std::optional<turing::Session> session;
  double threshold = a.threshold.value_or(turing::kDefaultThreshold);
  std::size_t min_rounds = a.min_rounds.value_or(turing::kDefaultMinRounds);
  if (!a.replay.empty()) {
    session = turing::replay(read_json(a.replay), sc);
    out << dump(turing::transcript_to_json(*session));
    return kExitOk;
  }
  if (!a.script.empty()) {
    const turing::Script script = turing::script_from_json(read_json(a.script), *sc, q);
    threshold = a.threshold.value_or(script.threshold);
    min_rounds = a.min_rounds.value_or(script.min_rounds);
    session = turing::run_script(sc, query, script);
    for (std::size_t r = 0; r < session->rounds().size(); ++r) {
      const json j = turing::round_to_json(*session, r);
      out << "round " << j["round"] << ": " << j["label"].get<std::string>() << " | forecast "
          << (j["forecast"].is_string() ? j["forecast"].get<std::string>() : j["forecast"].dump()) << " | truth "
          << j["truth"].get<std::string>() << " | score " << fmt(j["score"].get<double>()) << " | mean "
          << fmt(j["running_mean"].get<double>()) << "\n";
    }
  } else {
    session.emplace("interactive", sc, query, a.seed);
    const Variable& qv = sc->human.system()[q];
    out << "scenario " << sc->name << ", forecast '" << query << "' in {";
    for (std::size_t v = 0; v < qv.domain.size(); ++v) out << (v ? ", " : "") << qv.domain[v];
    out << "}\nmachine variables:";
    for (std::size_t i = 0; i < sc->machine.size(); ++i) out << " " << sc->machine.system()[i].name;
    out << "\nenter an action ('do wheel=6', JSON, 'verdict' or 'quit'), then a forecast ('no' or 'no=0.3 yes=0.7')\n";
    std::string line;
    for (;;) {
      out << "action> " << std::flush;
      if (!std::getline(in, line)) break;
      line = trim(line);
      if (line.empty()) continue;
      if (line == "quit" || line == "exit") break;
      if (line == "verdict") {
        print_verdict(session->verdict(threshold, min_rounds), out);
        continue;
      }
      try {
        const CompoundAction action = action_from_json(parse_action_line(line), sc->machine.system());
        translate_action(action, sc->translation);
        out << "forecast> " << std::flush;
        if (!std::getline(in, line)) break;
        const turing::Forecast f = turing::forecast_from_json(parse_forecast_line(trim(line)), qv);
        session->play(action, f);
        print_round(*session, out);
      } catch (const AmbiguousTranslation& e) {
        out << "the human model cannot read that action: " << e.what() << "\n";
      } catch (const Error& e) {
        out << "rejected: " << e.what() << "\n";
      } catch (const json::exception& e) {
        out << "rejected: " << e.what() << "\n";
      }
    }
    session->close();
  }
  const turing::Verdict v = session->verdict(threshold, min_rounds);
  print_verdict(v, out);
  if (!a.transcript.empty()) write_file(a.transcript, dump(turing::transcript_to_json(*session)));
  return v.interpretable ? kExitOk : kExitFailed;
}

// ---- report ---------------------------------------------------------------

std::string cell(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_float()) return fmt(j.get<double>());
  return j.dump();
}

void report_equivariance(const json& r, const std::string& title, std::ostream& md) {
  md << "## " << title << "\n\n";
  if (r.value("estimated", false)) {
    md << "Not enumerated: " << r["reason"].get<std::string>() << "\n\nEstimated cost: " << cell(r["cost"])
       << "\n\n";
    return;
  }
  md << "| mode | holds | max discrepancy | passed | failed | undefined | ambiguous | cost |\n"
     << "|---|---|---|---|---|---|---|---|\n"
     << "| " << cell(r["mode"]) << " | " << (r["holds"].get<bool>() ? "yes" : "no") << " | "
     << cell(r["max_discrepancy"]) << " | " << r["passed"] << " | " << r["failed"] << " | " << r["undefined"]
     << " | " << r["ambiguous"] << " | " << cell(r["cost"]) << " |\n\n";
  if (!r["actions"].empty()) {
    md << "| action | discrepancy | verdict |\n|---|---|---|\n";
    for (const json& a : r["actions"]) {
      md << "| " << (a["label"].get<std::string>().empty() ? "(none)" : a["label"].get<std::string>()) << " | "
         << cell(a["discrepancy"]) << " | " << cell(a["verdict"]) << " |\n";
    }
    md << "\n";
  }
  if (!r["counterexamples"].empty()) {
    md << "Counterexamples:\n\n";
    for (const json& c : r["counterexamples"]) {
      md << "- " << c["label"].get<std::string>() << " at " << c["human_state"].dump() << ": " << cell(c["lhs"])
         << " vs " << cell(c["rhs"]) << "\n";
    }
    md << "\n";
  }
}

std::string render_report(const json& r) {
  std::ostringstream md;
  if (r.contains("rounds") && r.contains("verdict")) {
    md << "# Turing session " << cell(r["id"]) << "\n\n"
       << "Scenario `" << cell(r["scenario"]) << "`, query `" << cell(r["query"]) << "`, seed " << r["seed"]
       << ", " << cell(r["status"]) << ".\n\n"
       << "| round | action | forecast | truth | score | running mean |\n|---|---|---|---|---|---|\n";
    for (const json& round : r["rounds"]) {
      md << "| " << round["round"] << " | " << cell(round["label"]) << " | " << cell(round["forecast"]) << " | "
         << cell(round["truth"]) << " | " << cell(round["score"]) << " | " << cell(round["running_mean"]) << " |\n";
    }
    const json& v = r["verdict"];
    md << "\nVerdict: " << (v["interpretable"].get<bool>() ? "interpretable" : "not interpretable") << " (mean "
       << cell(v["mean_score"]) << " over " << v["rounds_counted"] << " rounds, threshold " << cell(v["threshold"])
       << ", minimum " << v["min_rounds"] << ").\n";
    return md.str();
  }
  if (r.contains("composed")) {
    md << "# Surrogate chain\n\nOverall: " << (r["holds"].get<bool>() ? "holds" : "fails") << "\n\n";
    report_equivariance(r["original_to_surrogate"], "Original to surrogate", md);
    report_equivariance(r["surrogate_to_human"], "Surrogate to human", md);
    report_equivariance(r["composed"], "Composed", md);
    return md.str();
  }
  if (r.contains("mode")) {
    md << "# Equivariance report\n\n";
    report_equivariance(r, "Summary", md);
    return md.str();
  }
  throw ParseError("", 0, "not a verification report or session transcript");
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equivariance checks between machine and human causal models", "equivar"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Check action-equivariance of a scenario");
  verify->add_option("--scenario", va.scenario, "Scenario file or builtin:NAME")->required();
  verify->add_option("--mode", va.mode, "brute, ci, markov, region or surrogate")
      ->check(CLI::IsMember({"brute", "ci", "markov", "region", "surrogate"}));
  verify->add_option("--family", va.family, "observe, do or both")->check(CLI::IsMember({"observe", "do", "both"}));
  verify->add_option("--max-compound", va.max_compound, "Largest compound action size")->check(CLI::PositiveNumber);
  verify->add_option("--method", va.method, "Neighborhood search for markov mode")
      ->check(CLI::IsMember({"auto", "exact", "structural"}));
  verify->add_option("--tolerance", va.tolerance, "Discrepancy tolerance")->check(CLI::NonNegativeNumber);
  verify->add_option("--actions", va.actions, "JSON array of actions (region mode)")->check(CLI::ExistingFile);
  verify->add_option("--json", va.json_out, "Write the JSON report to a file, or '-' for stdout")
      ->expected(0, 1)
      ->default_str("-");

  std::string load_scenario_spec, load_family = "both";
  bool load_human = false;
  auto* load = app.add_subcommand("load", "Cognitive-load profile of a scenario's machine model");
  load->add_option("--scenario", load_scenario_spec, "Scenario file or builtin:NAME")->required();
  load->add_option("--family", load_family, "observe, do or both")->check(CLI::IsMember({"observe", "do", "both"}));
  load->add_flag("--human", load_human, "Profile the human model instead");

  std::string train_scenario, train_config, train_out, train_trace;
  auto* train = app.add_subcommand("train-nir", "Train the concept network on a scenario's dataset rule");
  train->add_option("--scenario", train_scenario, "Scenario with an NIR rule")->required();
  train->add_option("--config", train_config, "Training configuration JSON")->check(CLI::ExistingFile);
  train->add_option("--out", train_out, "Checkpoint to write")->required();
  train->add_option("--trace", train_trace, "Per-epoch loss CSV to write");

  std::string check_model, check_scenario, check_json;
  auto* check = app.add_subcommand("check-nir", "Discretize a trained network and check it against the rule");
  check->add_option("--model", check_model, "Checkpoint")->required()->check(CLI::ExistingFile);
  check->add_option("--scenario", check_scenario, "Scenario with an NIR rule")->required();
  check->add_option("--json", check_json, "Write the region report to a file, or '-' for stdout")
      ->expected(0, 1)
      ->default_str("-");

  TuringArgs ta;
  auto* turing_cmd = app.add_subcommand("turing", "Run a forecasting session");
  turing_cmd->add_option("--scenario", ta.scenario, "Scenario file or builtin:NAME")->required();
  turing_cmd->add_option("--query", ta.query, "Human variable to forecast");
  turing_cmd->add_option("--script", ta.script, "Scripted forecaster JSON")->check(CLI::ExistingFile);
  turing_cmd->add_option("--replay", ta.replay, "Transcript JSON to replay")->check(CLI::ExistingFile);
  turing_cmd->add_flag("--interactive", ta.interactive, "Read actions and forecasts from stdin");
  turing_cmd->add_option("--seed", ta.seed, "Seed for interactive sessions");
  turing_cmd->add_option("--threshold", ta.threshold, "Verdict threshold");
  turing_cmd->add_option("--min-rounds", ta.min_rounds, "Verdict minimum rounds");
  turing_cmd->add_option("--transcript", ta.transcript, "Write the transcript JSON here");

  service::ApiConfig api;
  std::optional<int> port;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API (and the UI when built)");
  serve->add_option("--port", port, "Port (default EQUIVAR_PORT or 8080)")->check(CLI::Range(0, 65535));
  serve->add_option("--bind", api.bind_address, "Address to bind");
  serve->add_option("--persist", api.persist_path, "JSON-lines session log");
  serve->add_option("--static", api.static_dir, "Directory served at /")->check(CLI::ExistingDirectory);
  serve->add_option("--ttl", api.session_ttl_seconds, "Idle session lifetime in seconds");
  serve->add_option("--workers", api.verify_workers, "Verification worker threads");

  std::string report_in, report_out;
  auto* report = app.add_subcommand("report", "Render a JSON report or transcript as Markdown");
  report->add_option("--in", report_in, "verify --json output or a transcript")->required()->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "Markdown file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    if (verify->parsed()) return run_verify(va, out);
    if (load->parsed()) return run_load(load_scenario_spec, load_family, load_human, out);
    if (train->parsed()) return run_train(train_scenario, train_config, train_out, train_trace, out);
    if (check->parsed()) return run_check_nir(check_model, check_scenario, check_json, out);
    if (turing_cmd->parsed()) return run_turing(ta, in, out);
    if (serve->parsed()) {
      api.port = port.value_or(service::port_from_env(8080));
      service::Service svc(api);
      return service::serve(svc) == 0 ? kExitOk : kExitFailed;
    }
    if (report->parsed()) {
      const std::string md = render_report(read_json(report_in));
      if (report_out.empty()) {
        out << md;
      } else {
        write_file(report_out, md);
      }
      return kExitOk;
    }
  } catch (const Divergence& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailed;
  } catch (const ValidationError& e) {
    err << "error: scenario is invalid\n";
    for (const Diagnostic& d : e.diagnostics()) err << "  " << d.field << ": " << d.message << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    // Bad files, unknown scenarios and malformed input are all usage errors.
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace equivar::cli
