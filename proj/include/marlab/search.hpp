#pragma once

// Deterministic random model generation, brute-force ratio oracle and
// seed-sweep counterexample search.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "marlab/analysis.hpp"
#include "marlab/model_file.hpp"

namespace marlab {

/// splitmix64: state += 0x9E3779B97F4A7C15, then
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// next() % bound; bound must be positive.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

enum class ModelClass { mcar, mar_by_construction, unrestricted };
std::string to_string(ModelClass c);
ModelClass parse_model_class(std::string_view text);

struct GeneratorSpec {
  std::uint64_t seed = 0;
  int n = 1;
  std::vector<int> range_sizes{2};
  PatternMode mode = PatternMode::general;
  ModelClass model_class = ModelClass::unrestricted;
  int denominator_bound = 12;
  int theta_count = 1;
};

/// Pure function of the spec. Throws UsageError on a malformed spec and
/// ResourceError past the space caps.
Model generate_model(const GeneratorSpec& spec);

/// A random q_m that is a probability vector and positive wherever P(M = m) > 0.
RealFn random_admissible_q_m(const Measure& P, const SampleSpace& space, SplitMix64& rng,
                             int denominator_bound = 12);

/// f and g ratios on every atom of D, summed straight from the masses.
/// Same row order as check_equivalence: θ, then θ′ ≠ θ, then atom.
std::vector<RatioRow> brute_force_ratios(const MeasureFamily& family, const Partition& D, const SampleSpace& space,
                                         const std::optional<RealFn>& q_m = std::nullopt);

/// F_M built from its defining condition alone: a block must be saturated by
/// every F_m-block inside {M ⊆ m}, for every m; atoms are the components of
/// that relation. Independent of observed_data_algebra.
Partition stopping_set_algebra_by_definition(const SampleSpace& space, const Filtration& filtration);

/// The literal test "event ∩ {M ⊆ m} ∈ F_m for every admissible m".
bool in_stopping_set_algebra(const Event& event, const SampleSpace& space, const Filtration& filtration);

/// Named predicates:
///   realised_not_everywhere           not everywhere MAR, realised set has a positive atom
///   mar_not_mcar                      everywhere MAR but not MCAR
///   sequential_counterexample_probe   monotone, everywhere MAR, not sequential MAR
///   realised_empty                    realised set has no atoms
/// plus "verdict:key=value,..." with keys mcar, everywhere_mar,
/// realised_full, sequential_mar (true/false) and mode (everywhere/on_set/none).
/// Verdict keys are evaluated on the first θ member; mode on the family.
struct Predicate {
  std::string text;
  std::vector<std::pair<std::string, std::string>> clauses;
};

Predicate parse_predicate(std::string_view text);
bool evaluate_predicate(const Predicate& predicate, const Model& model);

/// Class a named predicate is usually searched with.
ModelClass default_class_for(const Predicate& predicate);

struct FoundExample {
  Model model;
  std::uint64_t seed;
  std::uint64_t attempts;
};

/// Sweeps seeds template.seed, template.seed + 1, ... for `budget` attempts.
std::optional<FoundExample> find_example(const Predicate& predicate, std::uint64_t budget,
                                         const GeneratorSpec& spec_template);

}  // namespace marlab
