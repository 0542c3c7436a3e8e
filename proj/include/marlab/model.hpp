#pragma once

// The missing-data objects on a concrete finite product space: outcomes
// (y, M), the pattern-indexed filtrations, the observed-data algebra, the
// conditional pattern probabilities λ_m, the working-independence measures
// Q and Q′, and the observed/working likelihood tables.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "marlab/measure.hpp"
#include "marlab/partition.hpp"
#include "marlab/pattern.hpp"

namespace marlab {

enum class PatternMode { general, monotone };

std::string to_string(PatternMode mode);
PatternMode parse_pattern_mode(std::string_view text);

inline constexpr std::size_t kMaxOutcomes = 1'000'000;

/// Ω = (product of the Y ranges) × (admissible patterns).
///
/// Outcome index ω = y_index * pattern_count + pattern_index. y_index is the
/// mixed-radix number whose digits are the label positions of Y_1..Y_n with
/// Y_1 most significant. Patterns are listed in ascending bit encoding: all
/// 2^n subsets in general mode, the prefixes {}, {1}, {1,2}, ... in monotone mode.
class SampleSpace {
 public:
  /// Throws UsageError on a bad n or empty range, ResourceError above kMaxOutcomes.
  static SampleSpace build(int n, std::vector<std::vector<std::string>> ranges, PatternMode mode);

  int n() const { return n_; }
  PatternMode mode() const { return mode_; }
  const std::vector<std::vector<std::string>>& ranges() const { return ranges_; }
  const std::vector<Pattern>& patterns() const { return patterns_; }
  std::size_t pattern_count() const { return patterns_.size(); }
  std::size_t y_count() const { return y_count_; }
  std::size_t size() const { return y_count_ * patterns_.size(); }

  std::optional<std::size_t> pattern_index(const Pattern& m) const;
  std::size_t full_pattern_index() const { return patterns_.size() - 1; }

  std::size_t outcome(std::size_t y_index, std::size_t pattern_index) const {
    return y_index * patterns_.size() + pattern_index;
  }
  std::size_t y_index(std::size_t outcome) const { return outcome / patterns_.size(); }
  std::size_t pattern_index_of(std::size_t outcome) const { return outcome % patterns_.size(); }
  const Pattern& pattern_of(std::size_t outcome) const { return patterns_[pattern_index_of(outcome)]; }

  /// Label position of Y_variable (1-based) in y-vector y_index.
  std::size_t digit(std::size_t y_index, int variable) const;
  /// Injective code of (Y_i : i ∈ m) for the y-vector.
  std::uint64_t restrict_code(std::size_t y_index, const Pattern& m) const;

  /// "(0,1,[1])" style label of an outcome.
  std::string describe(std::size_t outcome) const;
  /// "(0,1)" style label of a y-vector.
  std::string describe_y(std::size_t y_index) const;

  /// {M = patterns()[pattern_index]}.
  Event pattern_event(std::size_t pattern_index) const;

  friend bool operator==(const SampleSpace&, const SampleSpace&) = default;

 private:
  SampleSpace(int n, PatternMode mode) : n_(n), mode_(mode) {}

  int n_;
  PatternMode mode_;
  std::vector<std::vector<std::string>> ranges_;
  std::vector<std::size_t> strides_;
  std::vector<Pattern> patterns_;
  std::size_t y_count_ = 1;
};

/// 𝒴_m, 𝓜_m and F_m = 𝒴_m ∨ 𝓜_m, indexed like SampleSpace::patterns().
struct Filtration {
  std::vector<Partition> y_alg;
  std::vector<Partition> m_alg;
  std::vector<Partition> f_alg;
};

/// 𝓜_m is generated by the indicators {M ⊆ i} for admissible i ⊆ m; those
/// pin down M when M ⊆ m and are all zero otherwise, which is the label used.
Filtration build_filtration(const SampleSpace& space);

/// 𝒴 = σ(Y): blocks are the y-vectors.
Partition y_partition(const SampleSpace& space);
/// 𝓜 = σ(M): blocks are the patterns.
Partition m_partition(const SampleSpace& space);

/// The stopping-set algebra F_M: the atom of ω is its F_{M(ω)}-block, which
/// already lies inside {M = M(ω)}.
Partition observed_data_algebra(const SampleSpace& space, const Filtration& filtration);

/// σ(M, (Y_i : i ∈ M)).
Partition naive_observed_algebra(const SampleSpace& space);

/// A θ-labelled list of probability measures on one space.
struct MeasureFamily {
  std::vector<std::string> thetas;
  std::vector<Measure> measures;

  std::size_t size() const { return measures.size(); }
  /// Throws ValidationError unless labels are unique, non-empty and every
  /// member is a probability measure on `space`.
  void validate(const SampleSpace& space) const;
};

/// P(Y = y) per y_index.
RealFn y_marginal(const Measure& P, const SampleSpace& space);
/// P(M = m) per pattern index.
RealFn m_marginal(const Measure& P, const SampleSpace& space);

/// λ_m = P(M = m | 𝒴), stored per (pattern, y-vector) because it is
/// 𝒴-measurable; undefined on P-null y-vectors.
struct LambdaProcess {
  std::size_t pattern_count = 0;
  std::size_t y_count = 0;
  std::vector<std::optional<Rational>> table;  // pattern-major
  PartialFn stopped;                           // λ_M per outcome

  const std::optional<Rational>& at(std::size_t pattern_index, std::size_t y_index) const {
    return table[pattern_index * y_count + y_index];
  }
  /// λ_m as a function on Ω.
  PartialFn values(std::size_t pattern_index, const SampleSpace& space) const;
};

LambdaProcess lambda_process(const Measure& P, const SampleSpace& space);

/// Q(y, m) = P_Y(y) μ(m) and, for μ(m) > 0, Q′_m(y, m) = P_Y(y).
struct QConstruction {
  RealFn p_y;  // per y_index
  RealFn mu;   // per pattern index
  Measure q;

  bool has_qprime(std::size_t pattern_index) const { return !mu[pattern_index].is_zero(); }
  /// Mass of Q′(· | M = pattern) at ω; undefined when μ(pattern) = 0.
  std::optional<Rational> qprime_mass(std::size_t pattern_index, std::size_t outcome,
                                      const SampleSpace& space) const;
  /// Q′(· | M = pattern) as a measure on Ω. Throws UsageError when μ(pattern) = 0.
  Measure qprime(std::size_t pattern_index, const SampleSpace& space) const;
  /// ω ↦ Q′(ω | M = M(ω)), with 0 where μ(M(ω)) = 0.
  RealFn qprime_stitched(const SampleSpace& space) const;
};

/// q_m defaults to the P-marginal of M. A supplied q_m must be a probability
/// vector over the patterns with q_m(m) > 0 wherever P(M = m) > 0;
/// violations throw DominationError / ValidationError naming the pattern.
QConstruction build_q(const Measure& P, const SampleSpace& space,
                      const std::optional<RealFn>& q_m = std::nullopt);

/// f(θ)(ω) = ν(dP_θ/dν | D)(ω).
std::vector<RealFn> observed_likelihood(const MeasureFamily& family, const Partition& D);

/// g(θ)(ω) = ν(dQ′_θ(· | M = M(ω))/dν | D)(ω); undefined where μ_θ(M(ω)) = 0.
std::vector<PartialFn> working_likelihood(const MeasureFamily& family,
                                          const std::vector<QConstruction>& qcons,
                                          const Partition& D, const SampleSpace& space);

}  // namespace marlab
