#pragma once

// Decision procedures for missingness at random and ignorability.
//
// All checks quantify over the P-positive part only: λ is defined on
// y-vectors of positive probability, and comparisons skip undefined entries.

#include <optional>
#include <string>
#include <vector>

#include "marlab/model.hpp"

namespace marlab {

struct MarViolation {
  Pattern pattern;
  std::size_t y_atom;  // block of the 𝒴 partition (= y_index)
  Rational lambda;
  std::optional<Rational> conditional;  // P(M = m | 𝒴_m) on the same outcome
};

struct EverywhereMar {
  bool holds = true;
  std::vector<MarViolation> violations;
};

/// P(M = m | 𝒴) = P(M = m | 𝒴_m) for every admissible m. Also checks the
/// adaptedness form (λ_m is 𝒴_m-measurable) and throws std::logic_error if
/// the two disagree.
EverywhereMar check_everywhere_mar(const Measure& P, const SampleSpace& space, const Filtration& filtration);

/// P(A ∩ B) = P(A) P(B) for all 𝒴-atoms A and 𝓜-atoms B.
bool check_mcar(const Measure& P, const SampleSpace& space);

struct RealisedSet {
  Partition observed;               // F_M
  std::vector<std::size_t> atoms;   // F_M atoms on which λ_M is constant where defined
  bool is_full = false;
};

RealisedSet realised_mar_set(const Measure& P, const SampleSpace& space, const Filtration& filtration);

struct HazardViolation {
  int stage;            // k: dropout right after observing Y_1..Y_{k-1}
  std::size_t y_atom;   // y_index
  Rational hazard;
};

struct SequentialMar {
  bool holds = true;
  std::vector<HazardViolation> violations;
};

/// Monotone spaces only (UsageError otherwise). h_k = P(M = {1..k-1} | M ⊇
/// {1..k-1}, 𝒴) must be 𝒴_{k-1}-measurable on outcomes where the
/// conditioning event has positive probability.
SequentialMar check_sequential_mar(const Measure& P, const SampleSpace& space, const Filtration& filtration);

enum class EquivalenceMode { everywhere, on_set, none };
std::string to_string(EquivalenceMode mode);
EquivalenceMode parse_equivalence_mode(std::string_view text);

struct RatioRow {
  std::size_t theta;
  std::size_t theta_other;
  std::size_t atom;
  std::optional<Rational> p_ratio;  // f(θ)/f(θ′); undefined on a zero denominator
  std::optional<Rational> q_ratio;  // g(θ)/g(θ′)

  friend bool operator==(const RatioRow&, const RatioRow&) = default;
};

struct EquivalenceReport {
  EquivalenceMode mode = EquivalenceMode::none;
  std::vector<std::size_t> witness_set;
  std::vector<std::size_t> positive_atoms;  // atoms of positive mass under some θ
  bool theta_invariant_lambda = true;
  std::vector<RatioRow> ratio_table;
  bool ratios_agree_on_witness = true;
};

/// Compares the family with its working-independence counterpart Q′_θ on
/// the atoms of D. The ratio table ranges over ordered pairs θ ≠ θ′.
EquivalenceReport check_equivalence(const MeasureFamily& family, const std::vector<QConstruction>& qcons,
                                    const Partition& D, const SampleSpace& space);

/// Convenience: default Q per θ (or q_m when given) and D = F_M.
EquivalenceReport check_equivalence(const MeasureFamily& family, const SampleSpace& space,
                                    const std::optional<RealFn>& q_m = std::nullopt);

struct Lemma1Check {
  bool holds = true;
  std::vector<std::size_t> excluded_atoms;  // zero denominators for some θ′
};

/// Direct check that ratios of ν(dP_θ/dν | D) equal ratios of ν(dQ_θ/dν | D)
/// on every atom in `atoms` and every θ, θ′ with non-zero denominators.
/// p_masses and q_masses hold one mass function per θ.
Lemma1Check verify_lemma1(const std::vector<RealFn>& p_masses, const std::vector<RealFn>& q_masses,
                          const std::vector<std::size_t>& atoms, const Partition& D);

enum class TheoremOutcome { holds, fails, not_applicable };
std::string to_string(TheoremOutcome outcome);

/// Under everywhere MAR: λ_M is constant on every F_M atom (where defined)
/// and P(ω) / Q′(ω | M = M(ω)) = λ_M(ω) wherever the denominator is positive.
TheoremOutcome verify_theorem(const Measure& P, const SampleSpace& space, const Filtration& filtration,
                              const std::optional<RealFn>& q_m = std::nullopt);

/// X_m per pattern index, as functions on Ω.
using AdaptedProcess = std::vector<RealFn>;

/// An (F_m)-adapted X with X_M = λ_M wherever λ_M is defined, or nullopt
/// when λ_M is not F_M-measurable.
std::optional<AdaptedProcess> adapted_witness(const Measure& P, const SampleSpace& space,
                                              const Filtration& filtration);

}  // namespace marlab
