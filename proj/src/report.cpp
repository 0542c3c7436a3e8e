#include "marlab/report.hpp"

#include <algorithm>
#include <sstream>

#include "marlab/error.hpp"

namespace marlab {

using nlohmann::json;

std::string verdict_text(EquivalenceMode mode) {
  switch (mode) {
    case EquivalenceMode::everywhere:
      return "everywhere ignorable";
    case EquivalenceMode::on_set:
      return "ignorable on a set";
    case EquivalenceMode::none:
      return "not ignorable";
  }
  return "not ignorable";
}

int exit_code_for(EquivalenceMode mode) {
  switch (mode) {
    case EquivalenceMode::everywhere:
      return kExitEverywhere;
    case EquivalenceMode::on_set:
      return kExitOnSet;
    case EquivalenceMode::none:
      return kExitNotIgnorable;
  }
  return kExitNotIgnorable;
}

std::vector<AtomEntry> atom_entries(const Partition& p, const SampleSpace& space) {
  std::vector<AtomEntry> out;
  const auto blocks = p.blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    AtomEntry e{b, {}};
    for (std::size_t w : blocks[b]) e.outcomes.push_back(space.describe(w));
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

std::string opt_str(const std::optional<Rational>& r) { return r ? r->str() : "undefined"; }

}  // namespace

AnalysisReport analyze(const Model& model) {
  const SampleSpace& space = model.space;
  const Filtration filtration = build_filtration(space);
  AnalysisReport report;
  report.model = model.name;
  report.n = space.n();
  report.mode = to_string(space.mode());
  report.outcomes = space.size();
  report.thetas = model.family.thetas;
  const Partition observed = observed_data_algebra(space, filtration);
  report.atoms = atom_entries(observed, space);

  for (std::size_t t = 0; t < model.family.size(); ++t) {
    const Measure& P = model.family.measures[t];
    MemberReport member;
    member.theta = model.family.thetas[t];
    member.mcar = check_mcar(P, space);
    const EverywhereMar mar = check_everywhere_mar(P, space, filtration);
    member.everywhere_mar = mar.holds;
    for (const auto& v : mar.violations) {
      member.violations.push_back({v.pattern.str(), space.describe_y(v.y_atom), v.lambda.str(), opt_str(v.conditional)});
    }
    const RealisedSet rs = realised_mar_set(P, space, filtration);
    member.realised_set = rs.atoms;
    member.realised_is_full = rs.is_full;
    std::vector<bool> in_set(observed.block_count(), false);
    for (std::size_t b : rs.atoms) in_set[b] = true;
    std::size_t slice_atoms = 0;
    for (std::size_t j = 0; j < space.pattern_count(); ++j) {
      bool covered = true;
      for (std::size_t y = 0; y < space.y_count() && covered; ++y) covered = in_set[observed.block_of(space.outcome(y, j))];
      if (!covered) continue;
      member.realised_patterns.push_back(space.patterns()[j].str());
      std::vector<std::size_t> ids;
      for (std::size_t y = 0; y < space.y_count(); ++y) ids.push_back(observed.block_of(space.outcome(y, j)));
      std::sort(ids.begin(), ids.end());
      slice_atoms += static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
    }
    member.realised_is_slices = slice_atoms == rs.atoms.size();
    if (space.mode() == PatternMode::monotone) {
      const SequentialMar seq = check_sequential_mar(P, space, filtration);
      member.sequential_mar = seq.holds;
      for (const auto& h : seq.violations) {
        member.hazard_violations.push_back({h.stage, space.describe_y(h.y_atom), h.hazard.str()});
      }
    }
    member.theorem = to_string(verify_theorem(P, space, filtration, model.q_m));
    report.members.push_back(std::move(member));
  }

  const EquivalenceReport eq = check_equivalence(model.family, space, model.q_m);
  report.equivalence.mode = to_string(eq.mode);
  report.equivalence.witness_set = eq.witness_set;
  report.equivalence.theta_invariant_lambda = eq.theta_invariant_lambda;
  report.equivalence.ratios_agree_on_witness = eq.ratios_agree_on_witness;
  for (const auto& row : eq.ratio_table) {
    RatioEntry e{model.family.thetas[row.theta], model.family.thetas[row.theta_other], row.atom, std::nullopt,
                 std::nullopt};
    if (row.p_ratio) e.p_ratio = row.p_ratio->str();
    if (row.q_ratio) e.q_ratio = row.q_ratio->str();
    report.equivalence.ratio_table.push_back(std::move(e));
  }
  report.verdict = verdict_text(eq.mode);
  report.exit_code = exit_code_for(eq.mode);
  return report;
}

void to_json(json& j, const AtomEntry& v) { j = {{"id", v.id}, {"outcomes", v.outcomes}}; }
void from_json(const json& j, AtomEntry& v) {
  j.at("id").get_to(v.id);
  j.at("outcomes").get_to(v.outcomes);
}

void to_json(json& j, const ViolationEntry& v) {
  j = {{"pattern", v.pattern}, {"y", v.y}, {"lambda", v.lambda}, {"conditional", v.conditional}};
}
void from_json(const json& j, ViolationEntry& v) {
  j.at("pattern").get_to(v.pattern);
  j.at("y").get_to(v.y);
  j.at("lambda").get_to(v.lambda);
  j.at("conditional").get_to(v.conditional);
}

void to_json(json& j, const HazardEntry& v) { j = {{"stage", v.stage}, {"y", v.y}, {"hazard", v.hazard}}; }
void from_json(const json& j, HazardEntry& v) {
  j.at("stage").get_to(v.stage);
  j.at("y").get_to(v.y);
  j.at("hazard").get_to(v.hazard);
}

void to_json(json& j, const MemberReport& v) {
  j = {{"theta", v.theta},
       {"mcar", v.mcar},
       {"everywhere_mar", v.everywhere_mar},
       {"violations", v.violations},
       {"realised_set", v.realised_set},
       {"realised_is_full", v.realised_is_full},
       {"realised_patterns", v.realised_patterns},
       {"realised_is_slices", v.realised_is_slices},
       {"sequential_mar", v.sequential_mar ? json(*v.sequential_mar) : json()},
       {"hazard_violations", v.hazard_violations},
       {"theorem", v.theorem}};
}
void from_json(const json& j, MemberReport& v) {
  j.at("theta").get_to(v.theta);
  j.at("mcar").get_to(v.mcar);
  j.at("everywhere_mar").get_to(v.everywhere_mar);
  j.at("violations").get_to(v.violations);
  j.at("realised_set").get_to(v.realised_set);
  j.at("realised_is_full").get_to(v.realised_is_full);
  j.at("realised_patterns").get_to(v.realised_patterns);
  j.at("realised_is_slices").get_to(v.realised_is_slices);
  const json& seq = j.at("sequential_mar");
  v.sequential_mar = seq.is_null() ? std::nullopt : std::optional<bool>(seq.get<bool>());
  j.at("hazard_violations").get_to(v.hazard_violations);
  j.at("theorem").get_to(v.theorem);
}

void to_json(json& j, const RatioEntry& v) {
  j = {{"theta", v.theta},
       {"theta_other", v.theta_other},
       {"atom", v.atom},
       {"p_ratio", v.p_ratio ? json(*v.p_ratio) : json()},
       {"q_ratio", v.q_ratio ? json(*v.q_ratio) : json()}};
}
void from_json(const json& j, RatioEntry& v) {
  j.at("theta").get_to(v.theta);
  j.at("theta_other").get_to(v.theta_other);
  j.at("atom").get_to(v.atom);
  const auto opt = [&](const char* key) {
    const json& x = j.at(key);
    return x.is_null() ? std::nullopt : std::optional<std::string>(x.get<std::string>());
  };
  v.p_ratio = opt("p_ratio");
  v.q_ratio = opt("q_ratio");
}

void to_json(json& j, const EquivalenceSummary& v) {
  j = {{"mode", v.mode},
       {"witness_set", v.witness_set},
       {"theta_invariant_lambda", v.theta_invariant_lambda},
       {"ratios_agree_on_witness", v.ratios_agree_on_witness},
       {"ratio_table", v.ratio_table}};
}
void from_json(const json& j, EquivalenceSummary& v) {
  j.at("mode").get_to(v.mode);
  j.at("witness_set").get_to(v.witness_set);
  j.at("theta_invariant_lambda").get_to(v.theta_invariant_lambda);
  j.at("ratios_agree_on_witness").get_to(v.ratios_agree_on_witness);
  j.at("ratio_table").get_to(v.ratio_table);
}

void to_json(json& j, const AnalysisReport& v) {
  j = {{"schema", v.schema},   {"model", v.model},     {"n", v.n},
       {"mode", v.mode},       {"outcomes", v.outcomes}, {"thetas", v.thetas},
       {"atoms", v.atoms},     {"members", v.members}, {"equivalence", v.equivalence},
       {"verdict", v.verdict}, {"exit_code", v.exit_code}};
}
void from_json(const json& j, AnalysisReport& v) {
  j.at("schema").get_to(v.schema);
  if (v.schema != kReportSchema) throw ValidationError("unsupported report schema " + std::to_string(v.schema));
  j.at("model").get_to(v.model);
  j.at("n").get_to(v.n);
  j.at("mode").get_to(v.mode);
  j.at("outcomes").get_to(v.outcomes);
  j.at("thetas").get_to(v.thetas);
  j.at("atoms").get_to(v.atoms);
  j.at("members").get_to(v.members);
  j.at("equivalence").get_to(v.equivalence);
  j.at("verdict").get_to(v.verdict);
  j.at("exit_code").get_to(v.exit_code);
}

namespace {

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string paint(const std::string& text, const char* code, const TextStyle& style) {
  if (!style.color) return text;
  return std::string("\033[") + code + "m" + text + "\033[0m";
}

std::string atom_list(const std::vector<std::size_t>& ids) {
  if (ids.empty()) return "(none)";
  std::string out;
  for (std::size_t id : ids) out += (out.empty() ? "#" : " #") + std::to_string(id);
  return out;
}

}  // namespace

std::string render_atoms(const std::vector<AtomEntry>& atoms) {
  std::ostringstream os;
  for (const auto& a : atoms) {
    os << "  #" << a.id << " {";
    for (std::size_t i = 0; i < a.outcomes.size(); ++i) os << (i ? ", " : "") << a.outcomes[i];
    os << "}\n";
  }
  return os.str();
}

std::string render_members(const AnalysisReport& report, const TextStyle& style, bool realised_only) {
  std::ostringstream os;
  for (const auto& m : report.members) {
    os << "theta " << m.theta << ":\n";
    if (!realised_only) {
      os << "  MCAR: " << yes_no(m.mcar) << "\n";
      os << "  everywhere MAR: " << yes_no(m.everywhere_mar) << "\n";
      for (const auto& v : m.violations) {
        os << "    violation at m=" << v.pattern << " y=" << v.y << ": lambda " << v.lambda << ", P(M=m | Y_m) "
           << v.conditional << "\n";
      }
    }
    os << "  realised MAR set: " << atom_list(m.realised_set) << (m.realised_is_full ? " (all atoms)" : "") << "\n";
    if (m.realised_is_full) {
      os << "  realised set = whole space\n";
    } else if (!m.realised_patterns.empty()) {
      os << "  realised set " << (m.realised_is_slices ? "=" : "contains") << " ";
      for (std::size_t i = 0; i < m.realised_patterns.size(); ++i) {
        os << (i ? " u " : "") << "{M=" << m.realised_patterns[i] << "}";
      }
      os << "\n";
    }
    if (realised_only) continue;
    if (m.sequential_mar) {
      os << "  sequential MAR: " << yes_no(*m.sequential_mar) << "\n";
      for (const auto& h : m.hazard_violations) {
        os << "    hazard at stage " << h.stage << " y=" << h.y << ": " << h.hazard << "\n";
      }
    } else {
      os << "  sequential MAR: n/a (general mode)\n";
    }
    os << "  theorem check: " << m.theorem << "\n";
  }
  (void)style;
  return os.str();
}

std::string render_equivalence(const AnalysisReport& report, const TextStyle& style) {
  std::ostringstream os;
  const auto& eq = report.equivalence;
  os << "equivalence for inference: " << eq.mode << "\n";
  os << "  theta-invariant lambda: " << yes_no(eq.theta_invariant_lambda) << "\n";
  os << "  witness atoms: " << atom_list(eq.witness_set) << "\n";
  os << "  ratios agree on witness: " << yes_no(eq.ratios_agree_on_witness) << "\n";
  for (const auto& r : eq.ratio_table) {
    os << "    " << r.theta << " vs " << r.theta_other << " atom #" << r.atom << ": P " << r.p_ratio.value_or("undefined")
       << "  Q' " << r.q_ratio.value_or("undefined") << "\n";
  }
  const char* colour = report.exit_code == kExitEverywhere ? "32" : (report.exit_code == kExitOnSet ? "33" : "31");
  os << "verdict: " << paint(report.verdict, colour, style) << " (exit " << report.exit_code << ")\n";
  return os.str();
}

std::string render_text(const AnalysisReport& report, const TextStyle& style) {
  std::ostringstream os;
  os << "model: " << (report.model.empty() ? "(unnamed)" : report.model) << " (n=" << report.n << ", " << report.mode
     << ", " << report.outcomes << " outcomes, " << report.thetas.size() << " theta)\n";
  os << "observed-data atoms:\n" << render_atoms(report.atoms);
  os << render_members(report, style);
  os << render_equivalence(report, style);
  return os.str();
}

}  // namespace marlab
