#include "marlab/search.hpp"

#include <map>
#include <numeric>

#include "marlab/error.hpp"

namespace marlab {

using nlohmann::json;

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  if (bound == 0) throw UsageError("SplitMix64::below(0)");
  return next() % bound;
}

std::string to_string(ModelClass c) {
  switch (c) {
    case ModelClass::mcar:
      return "mcar";
    case ModelClass::mar_by_construction:
      return "mar_by_construction";
    case ModelClass::unrestricted:
      return "unrestricted";
  }
  return "unrestricted";
}

ModelClass parse_model_class(std::string_view text) {
  if (text == "mcar") return ModelClass::mcar;
  if (text == "mar_by_construction") return ModelClass::mar_by_construction;
  if (text == "unrestricted") return ModelClass::unrestricted;
  throw UsageError("unknown model class \"" + std::string(text) +
                   "\" (expected mcar, mar_by_construction or unrestricted)");
}

namespace {

/// Distributes between 1 and `bound` units over `cells`; entries are c/D with D <= bound.
RealFn random_composition(SplitMix64& rng, std::size_t cells, int bound) {
  const auto units = static_cast<std::int64_t>(1 + rng.below(static_cast<std::uint64_t>(bound)));
  std::vector<std::int64_t> counts(cells, 0);
  for (std::int64_t u = 0; u < units; ++u) ++counts[rng.below(cells)];
  RealFn out;
  for (auto c : counts) out.emplace_back(c, units);
  return out;
}

/// `bound` units spread over the cells, so every entry is c/bound in lowest
/// terms and cells left empty give null y-vectors.
RealFn random_marginal(SplitMix64& rng, std::size_t cells, int bound) {
  std::vector<std::int64_t> counts(cells, 0);
  for (int u = 0; u < bound; ++u) ++counts[rng.below(cells)];
  RealFn out;
  for (auto c : counts) out.emplace_back(c, bound);
  return out;
}

/// Rows of P(M | y): λ_m(y) = a_m(y restricted to m) / bound with
/// a_m <= bound / (K - 1) for every m below the full pattern, which takes the
/// remainder. When K - 1 > bound that cap is 0, so the draw falls back to
/// a_m / (bound (K - 1)) with a_m <= bound.
std::vector<RealFn> mar_mechanism(SplitMix64& rng, const SampleSpace& space, int bound) {
  const std::size_t k = space.pattern_count();
  std::vector<RealFn> rows(space.y_count(), RealFn(k));
  const auto others = static_cast<std::int64_t>(k - 1);
  std::int64_t cap = others == 0 ? bound : bound / others;
  Rational scale(bound);
  if (cap == 0) {
    cap = bound;
    scale = Rational(static_cast<std::int64_t>(bound) * others);
  }
  for (std::size_t j = 0; j + 1 < k; ++j) {
    std::map<std::uint64_t, Rational> drawn;
    for (std::size_t y = 0; y < space.y_count(); ++y) {
      const auto code = space.restrict_code(y, space.patterns()[j]);
      auto it = drawn.find(code);
      if (it == drawn.end()) {
        const auto a = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(cap) + 1));
        it = drawn.emplace(code, Rational(a) / scale).first;
      }
      rows[y][j] = it->second;
    }
  }
  for (auto& row : rows) {
    Rational rest(1);
    for (std::size_t j = 0; j + 1 < k; ++j) rest -= row[j];
    row[k - 1] = rest;
  }
  return rows;
}

}  // namespace

Model generate_model(const GeneratorSpec& spec) {
  if (spec.denominator_bound < 1) throw UsageError("denominator bound must be at least 1");
  if (spec.theta_count < 1) throw UsageError("theta count must be at least 1");
  if (spec.range_sizes.size() != static_cast<std::size_t>(spec.n)) {
    throw UsageError("expected " + std::to_string(spec.n) + " range sizes, got " +
                     std::to_string(spec.range_sizes.size()));
  }
  std::vector<std::vector<std::string>> ranges;
  for (int size : spec.range_sizes) {
    if (size < 1) throw UsageError("range sizes must be positive");
    if (static_cast<std::size_t>(size) > kMaxOutcomes) throw ResourceError("range size exceeds outcome cap");
    std::vector<std::string> labels;
    for (int v = 0; v < size; ++v) labels.push_back(std::to_string(v));
    ranges.push_back(std::move(labels));
  }
  SampleSpace space = SampleSpace::build(spec.n, std::move(ranges), spec.mode);
  SplitMix64 rng(spec.seed);
  const int bound = spec.denominator_bound;
  const std::size_t k = space.pattern_count();

  std::vector<RealFn> mechanism;
  switch (spec.model_class) {
    case ModelClass::mcar:
      mechanism.assign(space.y_count(), random_composition(rng, k, bound));
      break;
    case ModelClass::mar_by_construction:
      mechanism = mar_mechanism(rng, space, bound);
      break;
    case ModelClass::unrestricted:
      for (std::size_t y = 0; y < space.y_count(); ++y) mechanism.push_back(random_composition(rng, k, bound));
      break;
  }

  Model model{"generated", space, {}, std::nullopt, json()};
  for (int t = 0; t < spec.theta_count; ++t) {
    const RealFn p_y = random_marginal(rng, space.y_count(), bound);
    if (t > 0 && spec.model_class == ModelClass::unrestricted) {
      for (auto& row : mechanism) {
        if (rng.below(2) == 1) row = random_composition(rng, k, bound);
      }
    }
    RealFn masses(space.size());
    for (std::size_t y = 0; y < space.y_count(); ++y) {
      for (std::size_t j = 0; j < k; ++j) masses[space.outcome(y, j)] = p_y[y] * mechanism[y][j];
    }
    model.family.thetas.push_back("t" + std::to_string(t));
    model.family.measures.push_back(Measure::probability(std::move(masses)));
  }
  model.provenance = {{"generator",
                       {{"seed", spec.seed},
                        {"n", spec.n},
                        {"range_sizes", spec.range_sizes},
                        {"mode", to_string(spec.mode)},
                        {"class", to_string(spec.model_class)},
                        {"denominator_bound", spec.denominator_bound},
                        {"theta_count", spec.theta_count}}}};
  return model;
}

RealFn random_admissible_q_m(const Measure& P, const SampleSpace& space, SplitMix64& rng, int denominator_bound) {
  const RealFn p_m = m_marginal(P, space);
  std::vector<std::int64_t> weights(p_m.size());
  std::int64_t total = 0;
  for (std::size_t j = 0; j < p_m.size(); ++j) {
    const auto lo = p_m[j].is_zero() ? 0 : 1;
    weights[j] = lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(denominator_bound)));
    total += weights[j];
  }
  if (total == 0) {
    weights.back() = 1;
    total = 1;
  }
  RealFn q;
  for (auto w : weights) q.emplace_back(w, total);
  return q;
}

std::vector<RatioRow> brute_force_ratios(const MeasureFamily& family, const Partition& D, const SampleSpace& space,
                                         const std::optional<RealFn>& q_m) {
  const auto atoms = D.blocks();
  const std::size_t thetas = family.size();
  // f[t][b], g[t][b] straight from sums over the atom members.
  std::vector<std::vector<Rational>> f(thetas, std::vector<Rational>(atoms.size()));
  std::vector<std::vector<std::optional<Rational>>> g(thetas, std::vector<std::optional<Rational>>(atoms.size()));
  for (std::size_t t = 0; t < thetas; ++t) {
    const Measure& P = family.measures[t];
    std::vector<bool> pattern_positive(space.pattern_count(), false);
    if (q_m) {
      for (std::size_t j = 0; j < space.pattern_count(); ++j) pattern_positive[j] = !(*q_m)[j].is_zero();
    } else {
      for (std::size_t w = 0; w < space.size(); ++w) {
        if (!P.mass(w).is_zero()) pattern_positive[space.pattern_index_of(w)] = true;
      }
    }
    // Q′(· | M = m) at (y, m) is the P-probability of the y-vector.
    std::vector<Rational> y_probability(space.y_count());
    for (std::size_t w = 0; w < space.size(); ++w) y_probability[space.y_index(w)] += P.mass(w);
    for (std::size_t b = 0; b < atoms.size(); ++b) {
      const Rational size(static_cast<std::int64_t>(atoms[b].size()));
      const Pattern& m = space.pattern_of(atoms[b].front());
      const auto j = *space.pattern_index(m);
      Rational p_sum, q_sum;
      for (std::size_t w : atoms[b]) {
        p_sum += P.mass(w);
        if (space.pattern_of(w) == m) q_sum += y_probability[space.y_index(w)];
      }
      f[t][b] = p_sum / size;
      if (pattern_positive[j]) g[t][b] = q_sum / size;
    }
  }
  std::vector<RatioRow> rows;
  for (std::size_t t = 0; t < thetas; ++t) {
    for (std::size_t u = 0; u < thetas; ++u) {
      if (t == u) continue;
      for (std::size_t b = 0; b < atoms.size(); ++b) {
        RatioRow row{t, u, b, std::nullopt, std::nullopt};
        if (!f[u][b].is_zero()) row.p_ratio = f[t][b] / f[u][b];
        if (g[t][b] && g[u][b] && !g[u][b]->is_zero()) row.q_ratio = *g[t][b] / *g[u][b];
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

Partition stopping_set_algebra_by_definition(const SampleSpace& space, const Filtration& filtration) {
  std::vector<std::size_t> parent(space.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t j = 0; j < space.pattern_count(); ++j) {
    const Pattern& m = space.patterns()[j];
    const Partition& fm = filtration.f_alg[j];
    std::vector<std::optional<std::size_t>> first(fm.block_count());
    for (std::size_t w = 0; w < space.size(); ++w) {
      if (!is_leq(space.pattern_of(w), m)) continue;
      auto& rep = first[fm.block_of(w)];
      if (!rep) {
        rep = w;
      } else {
        const auto a = find(*rep), b = find(w);
        parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::vector<std::size_t> ids(space.size());
  for (std::size_t w = 0; w < ids.size(); ++w) ids[w] = find(w);
  return Partition::from_block_ids(ids);
}

bool in_stopping_set_algebra(const Event& event, const SampleSpace& space, const Filtration& filtration) {
  if (event.size() != space.size()) throw UsageError("event does not live on the space");
  for (std::size_t j = 0; j < space.pattern_count(); ++j) {
    const Pattern& m = space.patterns()[j];
    const Partition& fm = filtration.f_alg[j];
    // event ∩ {M ⊆ m} must be all-or-nothing on every F_m block.
    std::vector<int> state(fm.block_count(), -1);
    for (std::size_t w = 0; w < space.size(); ++w) {
      const int inside = event[w] && is_leq(space.pattern_of(w), m) ? 1 : 0;
      int& s = state[fm.block_of(w)];
      if (s < 0) {
        s = inside;
      } else if (s != inside) {
        return false;
      }
    }
  }
  return true;
}

namespace {

const std::vector<std::string> kNamedPredicates = {"realised_not_everywhere", "mar_not_mcar",
                                                   "sequential_counterexample_probe", "realised_empty"};

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw UsageError("predicate clause " + key + "=" + value + ": expected true or false");
}

}  // namespace

Predicate parse_predicate(std::string_view text) {
  Predicate p{std::string(text), {}};
  constexpr std::string_view kPrefix = "verdict:";
  if (text.starts_with(kPrefix)) {
    std::string_view body = text.substr(kPrefix.size());
    while (!body.empty()) {
      const auto comma = body.find(',');
      const std::string_view clause = body.substr(0, comma);
      const auto eq = clause.find('=');
      if (eq == std::string_view::npos) throw UsageError("predicate clause \"" + std::string(clause) + "\" lacks '='");
      std::string key(clause.substr(0, eq)), value(clause.substr(eq + 1));
      if (key == "mode") {
        (void)parse_equivalence_mode(value);
      } else if (key == "mcar" || key == "everywhere_mar" || key == "realised_full" || key == "sequential_mar") {
        (void)parse_bool(key, value);
      } else {
        throw UsageError("unknown predicate key \"" + key + "\"");
      }
      p.clauses.emplace_back(std::move(key), std::move(value));
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
    if (p.clauses.empty()) throw UsageError("empty verdict predicate");
    return p;
  }
  if (std::find(kNamedPredicates.begin(), kNamedPredicates.end(), text) == kNamedPredicates.end()) {
    throw UsageError("unknown predicate \"" + std::string(text) +
                     "\" (known: realised_not_everywhere, mar_not_mcar, sequential_counterexample_probe, "
                     "realised_empty, verdict:...)");
  }
  return p;
}

ModelClass default_class_for(const Predicate& predicate) {
  if (predicate.text == "mar_not_mcar" || predicate.text == "sequential_counterexample_probe") {
    return ModelClass::mar_by_construction;
  }
  return ModelClass::unrestricted;
}

bool evaluate_predicate(const Predicate& predicate, const Model& model) {
  const SampleSpace& space = model.space;
  const Measure& P = model.family.measures.front();
  const Filtration filtration = build_filtration(space);
  const auto everywhere = [&] { return check_everywhere_mar(P, space, filtration).holds; };
  const auto realised = [&] { return realised_mar_set(P, space, filtration); };

  if (predicate.text == "realised_not_everywhere") {
    if (everywhere()) return false;
    const RealisedSet rs = realised();
    const auto atoms = rs.observed.blocks();
    for (std::size_t b : rs.atoms) {
      for (std::size_t w : atoms[b]) {
        if (!P.mass(w).is_zero()) return true;
      }
    }
    return false;
  }
  if (predicate.text == "mar_not_mcar") return everywhere() && !check_mcar(P, space);
  if (predicate.text == "sequential_counterexample_probe") {
    return space.mode() == PatternMode::monotone && everywhere() &&
           !check_sequential_mar(P, space, filtration).holds;
  }
  if (predicate.text == "realised_empty") return realised().atoms.empty();

  for (const auto& [key, value] : predicate.clauses) {
    bool ok = true;
    if (key == "mode") {
      ok = to_string(check_equivalence(model.family, space, model.q_m).mode) == value;
    } else {
      const bool want = parse_bool(key, value);
      if (key == "mcar") ok = check_mcar(P, space) == want;
      if (key == "everywhere_mar") ok = everywhere() == want;
      if (key == "realised_full") ok = realised().is_full == want;
      if (key == "sequential_mar") {
        ok = space.mode() == PatternMode::monotone && check_sequential_mar(P, space, filtration).holds == want;
      }
    }
    if (!ok) return false;
  }
  return true;
}

std::optional<FoundExample> find_example(const Predicate& predicate, std::uint64_t budget,
                                         const GeneratorSpec& spec_template) {
  GeneratorSpec spec = spec_template;
  for (std::uint64_t attempt = 0; attempt < budget; ++attempt) {
    spec.seed = spec_template.seed + attempt;
    Model model = generate_model(spec);
    if (evaluate_predicate(predicate, model)) {
      model.name = "found";
      model.provenance["predicate"] = predicate.text;
      model.provenance["seed"] = spec.seed;
      return FoundExample{std::move(model), spec.seed, attempt + 1};
    }
  }
  return std::nullopt;
}

}  // namespace marlab
