#pragma once

// Exact finite measures, conditional expectation and Radon-Nikodym
// derivatives. The reference measure is counting measure on the outcome
// space and is never stored.

#include <optional>
#include <span>
#include <vector>

#include "marlab/partition.hpp"
#include "marlab/rational.hpp"

namespace marlab {

using RealFn = std::vector<Rational>;
/// A function defined only off null blocks; std::nullopt marks "undefined".
using PartialFn = std::vector<std::optional<Rational>>;
/// Event as a membership mask over outcomes.
using Event = std::vector<bool>;

class Measure {
 public:
  /// Throws ValidationError on a negative mass or an empty space.
  explicit Measure(RealFn masses);

  /// Like the constructor but also demands total mass exactly 1.
  static Measure probability(RealFn masses);

  std::size_t space_size() const { return mass_.size(); }
  const Rational& mass(std::size_t outcome) const { return mass_[outcome]; }
  const RealFn& masses() const { return mass_; }
  const Rational& total() const { return total_; }
  bool is_probability() const { return total_ == Rational(1); }

  Rational of(const Event& event) const;

  friend bool operator==(const Measure&, const Measure&) = default;

 private:
  RealFn mass_;
  Rational total_;
};

/// ω ↦ block average of f: the counting-measure conditional expectation.
RealFn cond_expectation_nu(std::span<const Rational> f, const Partition& p);

/// ω ↦ P(event ∩ block(ω)) / P(block(ω)); undefined on P-null blocks.
PartialFn cond_probability(const Measure& P, const Event& event, const Partition& p);

/// dP/dQ pointwise, 0 on Q-null outcomes. Throws DominationError naming the
/// first outcome with Q(ω) = 0 < P(ω).
RealFn radon_nikodym(const Measure& P, const Measure& Q);

}  // namespace marlab
