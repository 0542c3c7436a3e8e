#include "marlab/model.hpp"

#include <map>
#include <utility>

#include "marlab/error.hpp"

namespace marlab {

std::string to_string(PatternMode mode) { return mode == PatternMode::general ? "general" : "monotone"; }

PatternMode parse_pattern_mode(std::string_view text) {
  if (text == "general") return PatternMode::general;
  if (text == "monotone") return PatternMode::monotone;
  throw UsageError("unknown mode \"" + std::string(text) + "\" (expected general or monotone)");
}

SampleSpace SampleSpace::build(int n, std::vector<std::vector<std::string>> ranges, PatternMode mode) {
  if (n < 1 || n > Pattern::kMaxVariables) {
    throw UsageError("variable count " + std::to_string(n) + " outside 1.." +
                     std::to_string(Pattern::kMaxVariables));
  }
  if (ranges.size() != static_cast<std::size_t>(n)) {
    throw UsageError("expected " + std::to_string(n) + " ranges, got " + std::to_string(ranges.size()));
  }
  SampleSpace s(n, mode);
  if (mode == PatternMode::general) {
    for (std::uint32_t bits = 0; bits < (std::uint32_t{1} << n); ++bits) {
      s.patterns_.push_back(Pattern::from_bits(n, bits));
    }
  } else {
    for (int k = 0; k <= n; ++k) s.patterns_.push_back(monotone_embed(k, n));
  }
  std::size_t y_count = 1;
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (ranges[i].empty()) throw UsageError("range of Y_" + std::to_string(i + 1) + " is empty");
    for (std::size_t a = 0; a < ranges[i].size(); ++a) {
      for (std::size_t b = a + 1; b < ranges[i].size(); ++b) {
        if (ranges[i][a] == ranges[i][b]) {
          throw UsageError("range of Y_" + std::to_string(i + 1) + " repeats label \"" + ranges[i][a] + "\"");
        }
      }
    }
    if (y_count > kMaxOutcomes / ranges[i].size()) {
      throw ResourceError("outcome space exceeds " + std::to_string(kMaxOutcomes) + " outcomes");
    }
    y_count *= ranges[i].size();
  }
  if (y_count > kMaxOutcomes / s.patterns_.size()) {
    throw ResourceError("outcome space exceeds " + std::to_string(kMaxOutcomes) + " outcomes");
  }
  s.strides_.assign(n, 1);
  for (int i = n - 2; i >= 0; --i) s.strides_[i] = s.strides_[i + 1] * ranges[i + 1].size();
  s.y_count_ = y_count;
  s.ranges_ = std::move(ranges);
  return s;
}

std::optional<std::size_t> SampleSpace::pattern_index(const Pattern& m) const {
  if (m.n() != n_) return std::nullopt;
  if (mode_ == PatternMode::general) return m.bits();
  if (m == monotone_embed(m.size(), n_)) return static_cast<std::size_t>(m.size());
  return std::nullopt;
}

std::size_t SampleSpace::digit(std::size_t y_index, int variable) const {
  const auto i = static_cast<std::size_t>(variable - 1);
  return y_index / strides_[i] % ranges_[i].size();
}

std::uint64_t SampleSpace::restrict_code(std::size_t y_index, const Pattern& m) const {
  std::uint64_t code = 0;
  for (int i = 1; i <= n_; ++i) {
    if (m.contains(i)) code += digit(y_index, i) * strides_[i - 1];
  }
  return code;
}

std::string SampleSpace::describe_y(std::size_t y_index) const {
  std::string out = "(";
  for (int i = 1; i <= n_; ++i) {
    if (i > 1) out += ',';
    out += ranges_[i - 1][digit(y_index, i)];
  }
  return out + ")";
}

std::string SampleSpace::describe(std::size_t outcome) const {
  std::string y = describe_y(y_index(outcome));
  y.pop_back();
  return y + "," + pattern_of(outcome).str() + ")";
}

Event SampleSpace::pattern_event(std::size_t pattern_index) const {
  Event e(size(), false);
  for (std::size_t y = 0; y < y_count_; ++y) e[outcome(y, pattern_index)] = true;
  return e;
}

Filtration build_filtration(const SampleSpace& space) {
  Filtration f;
  const auto none = space.pattern_count();
  for (const Pattern& m : space.patterns()) {
    f.y_alg.push_back(generated_partition(
        space.size(), [&](std::size_t w) { return space.restrict_code(space.y_index(w), m); }));
    f.m_alg.push_back(generated_partition(space.size(), [&](std::size_t w) {
      return is_leq(space.pattern_of(w), m) ? space.pattern_index_of(w) : none;
    }));
    f.f_alg.push_back(join(f.y_alg.back(), f.m_alg.back()));
  }
  return f;
}

Partition y_partition(const SampleSpace& space) {
  return generated_partition(space.size(), [&](std::size_t w) { return space.y_index(w); });
}

Partition m_partition(const SampleSpace& space) {
  return generated_partition(space.size(), [&](std::size_t w) { return space.pattern_index_of(w); });
}

Partition observed_data_algebra(const SampleSpace& space, const Filtration& filtration) {
  return generated_partition(space.size(), [&](std::size_t w) {
    const auto j = space.pattern_index_of(w);
    return std::pair{j, filtration.f_alg[j].block_of(w)};
  });
}

Partition naive_observed_algebra(const SampleSpace& space) {
  return generated_partition(space.size(), [&](std::size_t w) {
    return std::pair{space.pattern_index_of(w), space.restrict_code(space.y_index(w), space.pattern_of(w))};
  });
}

void MeasureFamily::validate(const SampleSpace& space) const {
  if (measures.empty()) throw ValidationError("measure family is empty");
  if (thetas.size() != measures.size()) throw ValidationError("theta labels and measures differ in number");
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    for (std::size_t u = 0; u < t; ++u) {
      if (thetas[u] == thetas[t]) throw ValidationError("duplicate theta label \"" + thetas[t] + "\"");
    }
    if (measures[t].space_size() != space.size()) {
      throw ValidationError("theta " + thetas[t] + ": measure has " + std::to_string(measures[t].space_size()) +
                            " outcomes, space has " + std::to_string(space.size()));
    }
    if (!measures[t].is_probability()) {
      throw ValidationError("theta " + thetas[t] + ": total mass " + measures[t].total().str() + " ≠ 1");
    }
  }
}

RealFn y_marginal(const Measure& P, const SampleSpace& space) {
  RealFn out(space.y_count());
  for (std::size_t w = 0; w < space.size(); ++w) out[space.y_index(w)] += P.mass(w);
  return out;
}

RealFn m_marginal(const Measure& P, const SampleSpace& space) {
  RealFn out(space.pattern_count());
  for (std::size_t w = 0; w < space.size(); ++w) out[space.pattern_index_of(w)] += P.mass(w);
  return out;
}

PartialFn LambdaProcess::values(std::size_t pattern_index, const SampleSpace& space) const {
  PartialFn out(space.size());
  for (std::size_t w = 0; w < space.size(); ++w) out[w] = at(pattern_index, space.y_index(w));
  return out;
}

LambdaProcess lambda_process(const Measure& P, const SampleSpace& space) {
  if (P.space_size() != space.size()) throw UsageError("measure does not live on the space");
  const RealFn p_y = y_marginal(P, space);
  LambdaProcess lp;
  lp.pattern_count = space.pattern_count();
  lp.y_count = space.y_count();
  lp.table.resize(lp.pattern_count * lp.y_count);
  for (std::size_t j = 0; j < lp.pattern_count; ++j) {
    for (std::size_t y = 0; y < lp.y_count; ++y) {
      if (!p_y[y].is_zero()) lp.table[j * lp.y_count + y] = P.mass(space.outcome(y, j)) / p_y[y];
    }
  }
  lp.stopped.resize(space.size());
  for (std::size_t w = 0; w < space.size(); ++w) {
    lp.stopped[w] = lp.at(space.pattern_index_of(w), space.y_index(w));
  }
  return lp;
}

std::optional<Rational> QConstruction::qprime_mass(std::size_t pattern_index, std::size_t outcome,
                                                   const SampleSpace& space) const {
  if (!has_qprime(pattern_index)) return std::nullopt;
  if (space.pattern_index_of(outcome) != pattern_index) return Rational(0);
  return p_y[space.y_index(outcome)];
}

Measure QConstruction::qprime(std::size_t pattern_index, const SampleSpace& space) const {
  if (!has_qprime(pattern_index)) {
    throw UsageError("no conditional measure for pattern " + space.patterns()[pattern_index].str() +
                     " (zero probability under Q)");
  }
  RealFn masses(space.size());
  for (std::size_t y = 0; y < space.y_count(); ++y) masses[space.outcome(y, pattern_index)] = p_y[y];
  return Measure(std::move(masses));
}

RealFn QConstruction::qprime_stitched(const SampleSpace& space) const {
  RealFn out(space.size());
  for (std::size_t w = 0; w < space.size(); ++w) {
    if (has_qprime(space.pattern_index_of(w))) out[w] = p_y[space.y_index(w)];
  }
  return out;
}

QConstruction build_q(const Measure& P, const SampleSpace& space, const std::optional<RealFn>& q_m) {
  if (P.space_size() != space.size()) throw UsageError("measure does not live on the space");
  RealFn p_y = y_marginal(P, space);
  RealFn p_m = m_marginal(P, space);
  RealFn mu = p_m;
  if (q_m) {
    if (q_m->size() != space.pattern_count()) {
      throw ValidationError("q_m has " + std::to_string(q_m->size()) + " entries, expected " +
                            std::to_string(space.pattern_count()));
    }
    Rational total;
    for (std::size_t j = 0; j < q_m->size(); ++j) {
      if ((*q_m)[j].sign() < 0) {
        throw ValidationError("q_m is negative at pattern " + space.patterns()[j].str());
      }
      total += (*q_m)[j];
    }
    if (total != Rational(1)) throw ValidationError("q_m total " + total.str() + " ≠ 1");
    for (std::size_t j = 0; j < q_m->size(); ++j) {
      if ((*q_m)[j].is_zero() && !p_m[j].is_zero()) {
        throw DominationError("q_m does not dominate P at pattern " + space.patterns()[j].str() +
                              " (P(M=" + space.patterns()[j].str() + ") = " + p_m[j].str() + ")");
      }
    }
    mu = *q_m;
  }
  RealFn masses(space.size());
  for (std::size_t w = 0; w < space.size(); ++w) {
    masses[w] = p_y[space.y_index(w)] * mu[space.pattern_index_of(w)];
  }
  return QConstruction{std::move(p_y), std::move(mu), Measure(std::move(masses))};
}

std::vector<RealFn> observed_likelihood(const MeasureFamily& family, const Partition& D) {
  std::vector<RealFn> out;
  out.reserve(family.size());
  for (const Measure& P : family.measures) {
    if (P.space_size() != D.space_size()) throw UsageError("measure and partition sizes differ");
    out.push_back(cond_expectation_nu(P.masses(), D));
  }
  return out;
}

std::vector<PartialFn> working_likelihood(const MeasureFamily& family,
                                          const std::vector<QConstruction>& qcons,
                                          const Partition& D, const SampleSpace& space) {
  if (qcons.size() != family.size()) throw UsageError("one Q construction per theta required");
  if (D.space_size() != space.size()) throw UsageError("partition does not live on the space");
  std::vector<std::int64_t> block_size(D.block_count(), 0);
  for (std::size_t w = 0; w < space.size(); ++w) ++block_size[D.block_of(w)];
  std::vector<PartialFn> out;
  for (const QConstruction& qc : qcons) {
    // Q′(· | M = m) lives on {M = m}, so a block's integral only collects
    // the outcomes that carry pattern m.
    std::map<std::pair<std::size_t, std::size_t>, Rational> block_sums;
    for (std::size_t w = 0; w < space.size(); ++w) {
      block_sums[{D.block_of(w), space.pattern_index_of(w)}] += qc.p_y[space.y_index(w)];
    }
    PartialFn g(space.size());
    for (std::size_t w = 0; w < space.size(); ++w) {
      const auto j = space.pattern_index_of(w);
      if (!qc.has_qprime(j)) continue;
      const auto b = D.block_of(w);
      g[w] = block_sums[{b, j}] / Rational(block_size[b]);
    }
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace marlab
