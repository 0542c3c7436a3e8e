#include "marlab/measure.hpp"

#include <string>

#include "marlab/error.hpp"

namespace marlab {

Measure::Measure(RealFn masses) : mass_(std::move(masses)) {
  if (mass_.empty()) throw ValidationError("measure on an empty space");
  for (std::size_t w = 0; w < mass_.size(); ++w) {
    if (mass_[w].sign() < 0) {
      throw ValidationError("negative mass " + mass_[w].str() + " at outcome " + std::to_string(w));
    }
    total_ += mass_[w];
  }
}

Measure Measure::probability(RealFn masses) {
  Measure m(std::move(masses));
  if (!m.is_probability()) throw ValidationError("total mass " + m.total().str() + " ≠ 1");
  return m;
}

Rational Measure::of(const Event& event) const {
  if (event.size() != mass_.size()) throw UsageError("event and measure sizes differ");
  Rational sum;
  for (std::size_t w = 0; w < mass_.size(); ++w) {
    if (event[w]) sum += mass_[w];
  }
  return sum;
}

RealFn cond_expectation_nu(std::span<const Rational> f, const Partition& p) {
  if (f.size() != p.space_size()) throw UsageError("function and partition sizes differ");
  std::vector<Rational> sums(p.block_count());
  std::vector<std::int64_t> counts(p.block_count(), 0);
  for (std::size_t w = 0; w < f.size(); ++w) {
    sums[p.block_of(w)] += f[w];
    ++counts[p.block_of(w)];
  }
  for (std::size_t b = 0; b < sums.size(); ++b) sums[b] /= Rational(counts[b]);
  RealFn out(f.size());
  for (std::size_t w = 0; w < f.size(); ++w) out[w] = sums[p.block_of(w)];
  return out;
}

PartialFn cond_probability(const Measure& P, const Event& event, const Partition& p) {
  if (event.size() != p.space_size() || P.space_size() != p.space_size()) {
    throw UsageError("measure, event and partition sizes differ");
  }
  std::vector<Rational> joint(p.block_count()), block_mass(p.block_count());
  for (std::size_t w = 0; w < event.size(); ++w) {
    block_mass[p.block_of(w)] += P.mass(w);
    if (event[w]) joint[p.block_of(w)] += P.mass(w);
  }
  PartialFn out(event.size());
  for (std::size_t w = 0; w < event.size(); ++w) {
    const auto b = p.block_of(w);
    if (!block_mass[b].is_zero()) out[w] = joint[b] / block_mass[b];
  }
  return out;
}

RealFn radon_nikodym(const Measure& P, const Measure& Q) {
  if (P.space_size() != Q.space_size()) throw UsageError("measures over different spaces");
  RealFn out(P.space_size());
  for (std::size_t w = 0; w < out.size(); ++w) {
    if (Q.mass(w).is_zero()) {
      if (!P.mass(w).is_zero()) {
        throw DominationError("not dominated at outcome " + std::to_string(w) + ": mass " +
                              P.mass(w).str() + " against 0");
      }
      continue;
    }
    out[w] = P.mass(w) / Q.mass(w);
  }
  return out;
}

}  // namespace marlab
