// marcheck: command-line front end for the missingness analyses.

#include <unistd.h>

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "marlab/analysis.hpp"
#include "marlab/error.hpp"
#include "marlab/model_file.hpp"
#include "marlab/report.hpp"
#include "marlab/search.hpp"

namespace {

using nlohmann::json;
using namespace marlab;

struct Options {
  std::string input;
  std::string format = "text";
  std::string algebra = "observed";
  bool compare = false;
  std::string predicate;
  std::uint64_t budget = 1000;
  std::uint64_t seed = 0;
  int n = 1;
  std::string ranges;
  std::string mode = "general";
  std::string model_class;
  int denominator_bound = 12;
  int thetas = 1;
  std::string out = "found_model.json";
};

TextStyle text_style() {
  return TextStyle{isatty(STDOUT_FILENO) != 0 && std::getenv("NO_COLOR") == nullptr};
}

bool json_output(const Options& o) { return o.format == "json"; }

Model load_input(const Options& o) {
  if (o.input.starts_with("builtin:")) return builtin_fixture(o.input.substr(8));
  return load_model(o.input);
}

int run_analyze(const Options& o) {
  const AnalysisReport report = analyze(load_input(o));
  if (json_output(o)) {
    std::cout << json(report).dump(2) << '\n';
  } else {
    std::cout << render_text(report, text_style());
  }
  return report.exit_code;
}

int run_realised(const Options& o) {
  const AnalysisReport report = analyze(load_input(o));
  if (json_output(o)) {
    json out = {{"schema", kReportSchema}, {"atoms", report.atoms}, {"members", json::array()}};
    for (const auto& m : report.members) {
      out["members"].push_back({{"theta", m.theta},
                                {"realised_set", m.realised_set},
                                {"realised_is_full", m.realised_is_full},
                                {"realised_patterns", m.realised_patterns}});
    }
    std::cout << out.dump(2) << '\n';
  } else {
    std::cout << "observed-data atoms:\n" << render_atoms(report.atoms) << render_members(report, text_style(), true);
  }
  return report.exit_code;
}

int run_equivalence(const Options& o) {
  const AnalysisReport report = analyze(load_input(o));
  if (json_output(o)) {
    std::cout << json{{"schema", kReportSchema},
                      {"equivalence", report.equivalence},
                      {"verdict", report.verdict},
                      {"exit_code", report.exit_code}}
                     .dump(2)
              << '\n';
  } else {
    std::cout << render_equivalence(report, text_style());
  }
  return report.exit_code;
}

Partition select_algebra(const std::string& selector, const SampleSpace& space, const Filtration& filtration) {
  if (selector == "observed") return observed_data_algebra(space, filtration);
  if (selector == "naive") return naive_observed_algebra(space);
  const auto eq = selector.find('=');
  if (eq != std::string::npos) {
    const std::string kind = selector.substr(0, eq);
    const auto j = space.pattern_index(Pattern::parse(space.n(), selector.substr(eq + 1)));
    if (!j) throw UsageError("pattern " + selector.substr(eq + 1) + " is not admissible in " + to_string(space.mode()) + " mode");
    if (kind == "F_m") return filtration.f_alg[*j];
    if (kind == "Y_m") return filtration.y_alg[*j];
    if (kind == "M_m") return filtration.m_alg[*j];
  }
  throw UsageError("unknown algebra \"" + selector + "\" (expected observed, naive, F_m=[..], Y_m=[..] or M_m=[..])");
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// Two listings in columns; utf-8 is not width-aware but labels are ascii.
std::string side_by_side(const std::string& left_title, const std::string& left, const std::string& right_title,
                         const std::string& right) {
  const auto l = lines_of(left), r = lines_of(right);
  std::size_t width = left_title.size();
  for (const auto& line : l) width = std::max(width, line.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(width + 4)) << left_title << right_title << '\n';
  for (std::size_t i = 0; i < std::max(l.size(), r.size()); ++i) {
    os << std::setw(static_cast<int>(width + 4)) << (i < l.size() ? l[i] : "") << (i < r.size() ? r[i] : "")
       << '\n';
  }
  return os.str();
}

int run_atoms(const Options& o) {
  const Model model = load_input(o);
  const Filtration filtration = build_filtration(model.space);
  if (o.compare) {
    const Partition observed = observed_data_algebra(model.space, filtration);
    const Partition naive = naive_observed_algebra(model.space);
    const bool same = observed == naive;
    if (json_output(o)) {
      std::cout << json{{"schema", kReportSchema},
                        {"observed", atom_entries(observed, model.space)},
                        {"naive", atom_entries(naive, model.space)},
                        {"identical", same}}
                       .dump(2)
                << '\n';
    } else {
      std::cout << side_by_side("observed (stopping-set)", render_atoms(atom_entries(observed, model.space)),
                                "naive", render_atoms(atom_entries(naive, model.space)))
                << (same ? "identical" : "different") << '\n';
    }
    return kExitEverywhere;
  }
  const Partition p = select_algebra(o.algebra, model.space, filtration);
  const auto atoms = atom_entries(p, model.space);
  if (json_output(o)) {
    std::cout << json{{"schema", kReportSchema}, {"algebra", o.algebra}, {"atoms", atoms}}.dump(2) << '\n';
  } else {
    std::cout << o.algebra << ": " << atoms.size() << " atoms\n" << render_atoms(atoms);
  }
  return kExitEverywhere;
}

std::vector<int> parse_sizes(const std::string& text, int n) {
  if (text.empty()) return std::vector<int>(static_cast<std::size_t>(std::max(n, 0)), 2);
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--ranges: \"" + item + "\" is not an integer");
    }
  }
  return out;
}

int run_search(const Options& o) {
  const Predicate predicate = parse_predicate(o.predicate);
  GeneratorSpec spec;
  spec.seed = o.seed;
  spec.n = o.n;
  spec.range_sizes = parse_sizes(o.ranges, o.n);
  spec.mode = parse_pattern_mode(o.mode);
  spec.model_class = o.model_class.empty() ? default_class_for(predicate) : parse_model_class(o.model_class);
  spec.denominator_bound = o.denominator_bound;
  spec.theta_count = o.thetas;
  (void)generate_model(spec);  // dimension errors surface before the sweep

  const auto found = find_example(predicate, o.budget, spec);
  if (!found) {
    if (json_output(o)) {
      std::cout << json{{"schema", kReportSchema}, {"found", false}, {"attempts", o.budget}}.dump(2) << '\n';
    } else {
      std::cout << "not found after " << o.budget << " attempts\n";
    }
    return kExitNotFound;
  }
  save_model(found->model, o.out);
  const AnalysisReport report = analyze(found->model);
  if (json_output(o)) {
    std::cout << json{{"schema", kReportSchema},
                      {"found", true},
                      {"seed", found->seed},
                      {"attempts", found->attempts},
                      {"path", o.out},
                      {"report", report}}
                     .dump(2)
              << '\n';
  } else {
    std::cout << "found at seed " << found->seed << " after " << found->attempts << " attempts; wrote " << o.out
              << "\n"
              << render_text(report, text_style());
  }
  return kExitEverywhere;
}

int run_oracle(const Options& o) {
  const Model model = load_input(o);
  const SampleSpace& space = model.space;
  const Filtration filtration = build_filtration(space);
  const Partition observed = observed_data_algebra(space, filtration);
  std::vector<std::pair<std::string, bool>> checks;

  checks.emplace_back("observed algebra = defining-condition construction",
                      observed == stopping_set_algebra_by_definition(space, filtration));
  checks.emplace_back("observed algebra = naive algebra", observed == naive_observed_algebra(space));
  bool atoms_ok = true;
  for (const auto& block : observed.blocks()) {
    Event e(space.size(), false);
    for (std::size_t w : block) e[w] = true;
    atoms_ok = atoms_ok && in_stopping_set_algebra(e, space, filtration);
  }
  checks.emplace_back("every observed atom satisfies the stopping-set condition", atoms_ok);

  std::vector<QConstruction> qcons;
  for (const Measure& P : model.family.measures) qcons.push_back(build_q(P, space, model.q_m));
  const EquivalenceReport eq = check_equivalence(model.family, qcons, observed, space);
  checks.emplace_back("ratio table = brute-force ratios",
                      eq.ratio_table == brute_force_ratios(model.family, observed, space, model.q_m));
  checks.emplace_back("ratios agree on the witness set", eq.ratios_agree_on_witness);

  bool all = true;
  for (const auto& [name, ok] : checks) all = all && ok;
  if (json_output(o)) {
    json out = {{"schema", kReportSchema}, {"agree", all}, {"checks", json::array()}};
    for (const auto& [name, ok] : checks) out["checks"].push_back({{"name", name}, {"pass", ok}});
    std::cout << out.dump(2) << '\n';
  } else {
    for (const auto& [name, ok] : checks) std::cout << (ok ? "PASS " : "FAIL ") << name << '\n';
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact missing-at-random and ignorability checks on finite models"};
  app.require_subcommand(1, 1);
  Options o;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("model", o.input, "Model file (JSON), or builtin:E1 .. builtin:E4")->required();
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  };

  auto* analyze_cmd = app.add_subcommand("analyze", "MCAR, MAR, realised-set, sequential and equivalence verdicts");
  add_common(analyze_cmd);
  auto* atoms_cmd = app.add_subcommand("atoms", "List the atoms of a sigma algebra");
  add_common(atoms_cmd);
  atoms_cmd->add_option("--algebra", o.algebra, "observed | naive | F_m=[..] | Y_m=[..] | M_m=[..]");
  atoms_cmd->add_flag("--compare", o.compare, "Print observed and naive algebras side by side");
  auto* realised_cmd = app.add_subcommand("realised-set", "The realised MAR set per theta");
  add_common(realised_cmd);
  auto* equivalence_cmd = app.add_subcommand("equivalence", "Equivalence of P and Q' for inference about theta");
  add_common(equivalence_cmd);
  auto* oracle_cmd = app.add_subcommand("oracle", "Cross-check the analysis against brute-force oracles");
  add_common(oracle_cmd);

  auto* search_cmd = app.add_subcommand("search", "Seed sweep for a model satisfying a predicate");
  search_cmd->add_option("--predicate", o.predicate, "Named predicate or verdict:key=value,...")->required();
  search_cmd->add_option("--budget", o.budget, "Number of seeds to try");
  search_cmd->add_option("--seed", o.seed, "First seed");
  search_cmd->add_option("--n", o.n, "Variable count");
  search_cmd->add_option("--ranges", o.ranges, "Comma-separated range sizes (default: all 2)");
  search_cmd->add_option("--mode", o.mode, "general | monotone");
  search_cmd->add_option("--class", o.model_class, "mcar | mar_by_construction | unrestricted");
  search_cmd->add_option("--denominator-bound", o.denominator_bound, "Largest generated denominator");
  search_cmd->add_option("--thetas", o.thetas, "Theta grid size");
  search_cmd->add_option("--out", o.out, "Where to write the found model");
  search_cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (analyze_cmd->parsed()) return run_analyze(o);
    if (atoms_cmd->parsed()) return run_atoms(o);
    if (realised_cmd->parsed()) return run_realised(o);
    if (equivalence_cmd->parsed()) return run_equivalence(o);
    if (oracle_cmd->parsed()) return run_oracle(o);
    if (search_cmd->parsed()) return run_search(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DominationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
