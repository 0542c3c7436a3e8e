#include "marlab/model_file.hpp"

#include <fstream>
#include <set>

#include "marlab/error.hpp"

namespace marlab {

using nlohmann::json;

namespace {

Rational rational_at(const json& value, const std::string& where) {
  if (value.is_string()) {
    try {
      return Rational::parse(value.get<std::string>());
    } catch (const UsageError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
  throw ValidationError(where + ": expected a rational string like \"1/2\"");
}

std::string label_at(const json& value, const std::string& where) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return value.dump();
  throw ValidationError(where + ": labels must be strings or integers");
}

const json& required(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(where + ": missing field \"" + key + "\"");
  return *it;
}

RealFn rational_list(const json& arr, std::size_t expected, const std::string& where) {
  if (!arr.is_array()) throw ValidationError(where + ": expected a list");
  if (arr.size() != expected) {
    throw ValidationError(where + ": expected " + std::to_string(expected) + " entries, got " +
                          std::to_string(arr.size()));
  }
  RealFn out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(rational_at(arr[i], where + "[" + std::to_string(i) + "]"));
    if (out.back().sign() < 0) {
      throw ValidationError(where + "[" + std::to_string(i) + "]: negative probability " + out.back().str());
    }
  }
  return out;
}

Measure measure_from_json(const json& spec, const SampleSpace& space, const std::string& where) {
  if (!spec.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& [key, _] : spec.items()) {
    if (key != "joint" && key != "y_marginal" && key != "m_given_y") {
      throw ValidationError(where + ": unknown field \"" + key + "\"");
    }
  }
  RealFn masses;
  if (spec.contains("joint")) {
    if (spec.contains("y_marginal") || spec.contains("m_given_y")) {
      throw ValidationError(where + ": give either \"joint\" or \"y_marginal\"/\"m_given_y\", not both");
    }
    masses = rational_list(spec["joint"], space.size(), where + ".joint");
  } else {
    const RealFn p_y = rational_list(required(spec, "y_marginal", where), space.y_count(), where + ".y_marginal");
    const json& rows = required(spec, "m_given_y", where);
    if (!rows.is_array() || rows.size() != space.y_count()) {
      throw ValidationError(where + ".m_given_y: expected " + std::to_string(space.y_count()) + " rows");
    }
    masses.resize(space.size());
    for (std::size_t y = 0; y < space.y_count(); ++y) {
      const std::string row_where = where + ".m_given_y[" + std::to_string(y) + "]";
      const RealFn row = rational_list(rows[y], space.pattern_count(), row_where);
      Rational row_total;
      for (const auto& r : row) row_total += r;
      if (row_total != Rational(1)) {
        throw ValidationError(row_where + ": row for y=" + space.describe_y(y) + " sums to " + row_total.str() +
                              ", expected 1");
      }
      for (std::size_t j = 0; j < row.size(); ++j) masses[space.outcome(y, j)] = p_y[y] * row[j];
    }
  }
  Measure m(std::move(masses));
  if (!m.is_probability()) throw ValidationError(where + ": total mass " + m.total().str() + " ≠ 1");
  return m;
}

}  // namespace

Model model_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("model: expected a JSON object");
  static const std::set<std::string> kKnown = {"name", "n", "mode", "ranges", "theta", "p", "q_m", "provenance"};
  for (const auto& [key, _] : doc.items()) {
    if (!kKnown.contains(key)) throw ValidationError("model: unknown field \"" + key + "\"");
  }
  const json& n_json = required(doc, "n", "model");
  if (!n_json.is_number_integer()) throw ValidationError("n: expected an integer");
  const int n = n_json.get<int>();
  const json& mode_json = required(doc, "mode", "model");
  if (!mode_json.is_string()) throw ValidationError("mode: expected \"general\" or \"monotone\"");
  PatternMode mode;
  try {
    mode = parse_pattern_mode(mode_json.get<std::string>());
  } catch (const UsageError& e) {
    throw ValidationError(std::string("mode: ") + e.what());
  }
  const json& ranges_json = required(doc, "ranges", "model");
  if (!ranges_json.is_array()) throw ValidationError("ranges: expected a list of label lists");
  std::vector<std::vector<std::string>> ranges;
  for (std::size_t i = 0; i < ranges_json.size(); ++i) {
    const std::string where = "ranges[" + std::to_string(i) + "]";
    if (!ranges_json[i].is_array()) throw ValidationError(where + ": expected a label list");
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < ranges_json[i].size(); ++k) {
      labels.push_back(label_at(ranges_json[i][k], where + "[" + std::to_string(k) + "]"));
      for (std::size_t u = 0; u + 1 < labels.size(); ++u) {
        if (labels[u] == labels.back()) throw ValidationError(where + ": duplicate label \"" + labels.back() + "\"");
      }
    }
    ranges.push_back(std::move(labels));
  }
  std::optional<SampleSpace> space;
  try {
    space = SampleSpace::build(n, std::move(ranges), mode);
  } catch (const UsageError& e) {
    throw ValidationError(std::string("space: ") + e.what());
  }

  Model model{doc.value("name", std::string()), *space, {}, std::nullopt, doc.value("provenance", json())};
  const json& theta_json = required(doc, "theta", "model");
  if (!theta_json.is_array() || theta_json.empty()) throw ValidationError("theta: expected a non-empty label list");
  const json& p_json = required(doc, "p", "model");
  if (!p_json.is_object()) throw ValidationError("p: expected an object keyed by theta label");
  for (std::size_t t = 0; t < theta_json.size(); ++t) {
    std::string label = label_at(theta_json[t], "theta[" + std::to_string(t) + "]");
    if (!p_json.contains(label)) throw ValidationError("p: no measure for theta \"" + label + "\"");
    model.family.measures.push_back(measure_from_json(p_json[label], model.space, "p." + label));
    model.family.thetas.push_back(std::move(label));
  }
  for (const auto& [key, _] : p_json.items()) {
    if (std::find(model.family.thetas.begin(), model.family.thetas.end(), key) == model.family.thetas.end()) {
      throw ValidationError("p: theta \"" + key + "\" is not listed in theta");
    }
  }
  model.family.validate(model.space);

  if (doc.contains("q_m") && !doc["q_m"].is_null()) {
    const json& q_json = doc["q_m"];
    if (!q_json.is_object()) throw ValidationError("q_m: expected an object keyed by pattern, e.g. \"[1]\"");
    RealFn q(model.space.pattern_count());
    for (const auto& [key, value] : q_json.items()) {
      std::optional<std::size_t> j;
      try {
        j = model.space.pattern_index(Pattern::parse(n, key));
      } catch (const UsageError& e) {
        throw ValidationError("q_m." + key + ": " + e.what());
      }
      if (!j) throw ValidationError("q_m." + key + ": unknown pattern for " + to_string(mode) + " mode");
      q[*j] = rational_at(value, "q_m." + key);
    }
    // Admissibility (sum, domination) is checked where Q is built.
    try {
      for (const Measure& P : model.family.measures) (void)build_q(P, model.space, q);
    } catch (const std::runtime_error& e) {
      throw ValidationError(std::string("q_m: ") + e.what());
    }
    model.q_m = std::move(q);
  }
  return model;
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.string() + ": cannot open");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  try {
    return model_from_json(doc);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

json model_to_json(const Model& model) {
  json doc;
  if (!model.name.empty()) doc["name"] = model.name;
  doc["n"] = model.space.n();
  doc["mode"] = to_string(model.space.mode());
  doc["ranges"] = model.space.ranges();
  doc["theta"] = model.family.thetas;
  json p = json::object();
  for (std::size_t t = 0; t < model.family.size(); ++t) {
    json joint = json::array();
    for (const auto& m : model.family.measures[t].masses()) joint.push_back(m.str());
    p[model.family.thetas[t]] = {{"joint", joint}};
  }
  doc["p"] = p;
  if (model.q_m) {
    json q = json::object();
    for (std::size_t j = 0; j < model.q_m->size(); ++j) q[model.space.patterns()[j].str()] = (*model.q_m)[j].str();
    doc["q_m"] = q;
  }
  if (!model.provenance.is_null()) doc["provenance"] = model.provenance;
  return doc;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw UsageError(path.string() + ": cannot write");
  out << model_to_json(model).dump(2) << '\n';
}

namespace {

Measure factored(const SampleSpace& space, const RealFn& p_y, const std::vector<RealFn>& m_given_y) {
  RealFn masses(space.size());
  for (std::size_t y = 0; y < space.y_count(); ++y) {
    for (std::size_t j = 0; j < space.pattern_count(); ++j) masses[space.outcome(y, j)] = p_y[y] * m_given_y[y][j];
  }
  return Measure::probability(std::move(masses));
}

Model binary_model(std::string name, int n, PatternMode mode) {
  std::vector<std::vector<std::string>> ranges(n, {"0", "1"});
  return Model{std::move(name), SampleSpace::build(n, ranges, mode), {}, std::nullopt, json()};
}

}  // namespace

Model builtin_fixture(std::string_view name) {
  const Rational half(1, 2), quarter(1, 4), third(1, 3);
  if (name == "E1" || name == "E2") {
    Model m = binary_model(std::string(name), 1, PatternMode::general);
    const std::vector<RealFn> rows = name == "E1"
                                         ? std::vector<RealFn>{{half, half}, {half, half}}
                                         : std::vector<RealFn>{{half, half}, {Rational(3, 4), quarter}};
    m.family.thetas = {"base"};
    m.family.measures = {factored(m.space, {half, half}, rows)};
    return m;
  }
  if (name == "E3" || name == "E3-theta-mechanism") {
    Model m = binary_model(std::string(name), 2, PatternMode::monotone);
    for (const Rational& theta : {quarter, half}) {
      const Rational off = (Rational(1) - theta) / Rational(2), on = theta / Rational(2);
      // Patterns: [], [1], [1,2]; dropout after Y_1 depends on Y_1 only.
      const Rational drop0 = name == "E3" ? third : theta;
      const Rational drop1 = name == "E3" ? Rational(2, 3) : Rational(1) - theta;
      const std::vector<RealFn> rows = {{0, drop0, Rational(1) - drop0},
                                        {0, drop0, Rational(1) - drop0},
                                        {0, drop1, Rational(1) - drop1},
                                        {0, drop1, Rational(1) - drop1}};
      m.family.thetas.push_back(theta.str());
      m.family.measures.push_back(factored(m.space, {off, off, on, on}, rows));
    }
    return m;
  }
  if (name == "E4") {
    Model m = binary_model("E4", 2, PatternMode::general);
    // Patterns: [], [1], [2], [1,2]; P(M=[1] | Y) depends on the unobserved Y_2.
    const RealFn y2_zero = {half, half, 0, 0}, y2_one = {Rational(3, 4), quarter, 0, 0};
    m.family.thetas = {"base"};
    m.family.measures = {factored(m.space, {quarter, quarter, quarter, quarter}, {y2_zero, y2_one, y2_zero, y2_one})};
    return m;
  }
  throw UsageError("unknown fixture \"" + std::string(name) + "\" (known: E1, E2, E3, E4, E3-theta-mechanism)");
}

}  // namespace marlab
