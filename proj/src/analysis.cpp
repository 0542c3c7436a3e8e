#include "marlab/analysis.hpp"

#include <algorithm>
#include <stdexcept>

#include "marlab/error.hpp"

namespace marlab {

namespace {

/// Tracks whether all defined entries seen so far are equal.
struct ConstantScan {
  const Rational* value = nullptr;
  bool consistent = true;

  void add(const std::optional<Rational>& x) {
    if (!x || !consistent) return;
    if (value == nullptr) {
      value = &*x;
    } else if (!(*value == *x)) {
      consistent = false;
    }
  }
};

void check_measure_on_space(const Measure& P, const SampleSpace& space) {
  if (P.space_size() != space.size()) throw UsageError("measure does not live on the space");
}

}  // namespace

EverywhereMar check_everywhere_mar(const Measure& P, const SampleSpace& space, const Filtration& filtration) {
  check_measure_on_space(P, space);
  const LambdaProcess lp = lambda_process(P, space);
  const RealFn p_y = y_marginal(P, space);
  EverywhereMar out;
  bool adapted = true;
  for (std::size_t j = 0; j < space.pattern_count(); ++j) {
    const Pattern& m = space.patterns()[j];
    const Partition& ym = filtration.y_alg[j];
    // 𝒴_m-blocks are unions of whole y-vectors, so one outcome per y-vector suffices.
    const auto block_of_y = [&](std::size_t y) { return ym.block_of(space.outcome(y, 0)); };
    struct Block {
      Rational joint, mass;
      ConstantScan lambda;
    };
    std::vector<Block> blocks(ym.block_count());
    for (std::size_t y = 0; y < space.y_count(); ++y) {
      Block& b = blocks[block_of_y(y)];
      b.joint += P.mass(space.outcome(y, j));
      b.mass += p_y[y];
      b.lambda.add(lp.at(j, y));
    }
    for (const Block& b : blocks) adapted = adapted && b.lambda.consistent;
    for (std::size_t y = 0; y < space.y_count(); ++y) {
      const auto& lambda = lp.at(j, y);
      if (!lambda) continue;
      const Block& b = blocks[block_of_y(y)];
      const Rational conditional = b.joint / b.mass;
      if (*lambda != conditional) out.violations.push_back({m, y, *lambda, conditional});
    }
  }
  out.holds = out.violations.empty();
  if (out.holds != adapted) {
    throw std::logic_error("conditional and adaptedness forms of everywhere MAR disagree");
  }
  return out;
}

bool check_mcar(const Measure& P, const SampleSpace& space) {
  check_measure_on_space(P, space);
  const RealFn p_y = y_marginal(P, space);
  const RealFn p_m = m_marginal(P, space);
  for (std::size_t y = 0; y < space.y_count(); ++y) {
    for (std::size_t j = 0; j < space.pattern_count(); ++j) {
      if (P.mass(space.outcome(y, j)) != p_y[y] * p_m[j]) return false;
    }
  }
  return true;
}

RealisedSet realised_mar_set(const Measure& P, const SampleSpace& space, const Filtration& filtration) {
  check_measure_on_space(P, space);
  RealisedSet out{observed_data_algebra(space, filtration), {}, false};
  const LambdaProcess lp = lambda_process(P, space);
  std::vector<ConstantScan> scans(out.observed.block_count());
  for (std::size_t w = 0; w < space.size(); ++w) scans[out.observed.block_of(w)].add(lp.stopped[w]);
  for (std::size_t b = 0; b < scans.size(); ++b) {
    if (scans[b].consistent) out.atoms.push_back(b);
  }
  out.is_full = out.atoms.size() == out.observed.block_count();
  return out;
}

SequentialMar check_sequential_mar(const Measure& P, const SampleSpace& space, const Filtration& filtration) {
  if (space.mode() != PatternMode::monotone) {
    throw UsageError("sequential MAR is defined for monotone spaces only");
  }
  check_measure_on_space(P, space);
  SequentialMar out;
  // Monotone pattern index k is the prefix {1..k}.
  for (int stage = 1; stage <= space.n(); ++stage) {
    const auto stop = static_cast<std::size_t>(stage - 1);
    const Partition& past = filtration.y_alg[stop];
    std::vector<std::optional<Rational>> hazard(space.y_count());
    std::vector<ConstantScan> groups(past.block_count());
    for (std::size_t y = 0; y < space.y_count(); ++y) {
      Rational survival;
      for (std::size_t j = stop; j < space.pattern_count(); ++j) survival += P.mass(space.outcome(y, j));
      if (!survival.is_zero()) hazard[y] = P.mass(space.outcome(y, stop)) / survival;
    }
    const auto block_of_y = [&](std::size_t y) { return past.block_of(space.outcome(y, 0)); };
    for (std::size_t y = 0; y < space.y_count(); ++y) groups[block_of_y(y)].add(hazard[y]);
    for (std::size_t y = 0; y < space.y_count(); ++y) {
      if (hazard[y] && !groups[block_of_y(y)].consistent) {
        out.violations.push_back({stage, y, *hazard[y]});
      }
    }
  }
  out.holds = out.violations.empty();
  return out;
}

std::string to_string(EquivalenceMode mode) {
  switch (mode) {
    case EquivalenceMode::everywhere:
      return "everywhere";
    case EquivalenceMode::on_set:
      return "on_set";
    case EquivalenceMode::none:
      return "none";
  }
  return "none";
}

EquivalenceMode parse_equivalence_mode(std::string_view text) {
  if (text == "everywhere") return EquivalenceMode::everywhere;
  if (text == "on_set") return EquivalenceMode::on_set;
  if (text == "none") return EquivalenceMode::none;
  throw UsageError("unknown equivalence mode \"" + std::string(text) + "\"");
}

EquivalenceReport check_equivalence(const MeasureFamily& family, const std::vector<QConstruction>& qcons,
                                    const Partition& D, const SampleSpace& space) {
  if (family.size() == 0) throw UsageError("empty measure family");
  if (D.space_size() != space.size()) throw UsageError("partition does not live on the space");
  std::vector<LambdaProcess> lambdas;
  for (const Measure& P : family.measures) {
    check_measure_on_space(P, space);
    lambdas.push_back(lambda_process(P, space));
  }
  const std::vector<RealFn> f = observed_likelihood(family, D);
  const std::vector<PartialFn> g = working_likelihood(family, qcons, D, space);
  const auto blocks = D.blocks();

  EquivalenceReport out;
  for (std::size_t w = 0; w < space.size() && out.theta_invariant_lambda; ++w) {
    ConstantScan scan;
    for (const auto& lp : lambdas) scan.add(lp.stopped[w]);
    out.theta_invariant_lambda = scan.consistent;
  }

  for (std::size_t b = 0; b < blocks.size(); ++b) {
    bool positive = false;
    ConstantScan scan;
    for (std::size_t t = 0; t < family.size(); ++t) {
      for (std::size_t w : blocks[b]) {
        positive = positive || !family.measures[t].mass(w).is_zero();
        scan.add(lambdas[t].stopped[w]);
      }
    }
    if (positive) out.positive_atoms.push_back(b);
    if (scan.consistent) out.witness_set.push_back(b);
  }

  std::size_t covered = 0;
  for (std::size_t b : out.positive_atoms) {
    if (std::binary_search(out.witness_set.begin(), out.witness_set.end(), b)) ++covered;
  }
  out.mode = covered == out.positive_atoms.size() ? EquivalenceMode::everywhere
             : covered > 0                        ? EquivalenceMode::on_set
                                                  : EquivalenceMode::none;

  for (std::size_t t = 0; t < family.size(); ++t) {
    for (std::size_t u = 0; u < family.size(); ++u) {
      if (t == u) continue;
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        const std::size_t w = blocks[b].front();
        RatioRow row{t, u, b, std::nullopt, std::nullopt};
        if (!f[u][w].is_zero()) row.p_ratio = f[t][w] / f[u][w];
        if (g[t][w] && g[u][w] && !g[u][w]->is_zero()) row.q_ratio = *g[t][w] / *g[u][w];
        const bool in_witness = std::binary_search(out.witness_set.begin(), out.witness_set.end(), b);
        if (in_witness && row.p_ratio && row.p_ratio != row.q_ratio) out.ratios_agree_on_witness = false;
        out.ratio_table.push_back(std::move(row));
      }
    }
  }
  return out;
}

EquivalenceReport check_equivalence(const MeasureFamily& family, const SampleSpace& space,
                                    const std::optional<RealFn>& q_m) {
  const Filtration filtration = build_filtration(space);
  std::vector<QConstruction> qcons;
  for (const Measure& P : family.measures) qcons.push_back(build_q(P, space, q_m));
  return check_equivalence(family, qcons, observed_data_algebra(space, filtration), space);
}

Lemma1Check verify_lemma1(const std::vector<RealFn>& p_masses, const std::vector<RealFn>& q_masses,
                          const std::vector<std::size_t>& atoms, const Partition& D) {
  if (p_masses.size() != q_masses.size()) throw UsageError("families differ in size");
  std::vector<RealFn> f, g;
  for (std::size_t t = 0; t < p_masses.size(); ++t) {
    f.push_back(cond_expectation_nu(p_masses[t], D));
    g.push_back(cond_expectation_nu(q_masses[t], D));
  }
  const auto blocks = D.blocks();
  Lemma1Check out;
  for (std::size_t b : atoms) {
    if (b >= blocks.size()) throw UsageError("atom " + std::to_string(b) + " is not an atom of D");
    const std::size_t w = blocks[b].front();
    bool excluded = false;
    for (std::size_t t = 0; t < f.size(); ++t) {
      for (std::size_t u = 0; u < f.size(); ++u) {
        if (f[u][w].is_zero() || g[u][w].is_zero()) {
          excluded = true;
          continue;
        }
        if (f[t][w] / f[u][w] != g[t][w] / g[u][w]) out.holds = false;
      }
    }
    if (excluded) out.excluded_atoms.push_back(b);
  }
  return out;
}

std::string to_string(TheoremOutcome outcome) {
  switch (outcome) {
    case TheoremOutcome::holds:
      return "holds";
    case TheoremOutcome::fails:
      return "fails";
    case TheoremOutcome::not_applicable:
      return "not_applicable";
  }
  return "not_applicable";
}

TheoremOutcome verify_theorem(const Measure& P, const SampleSpace& space, const Filtration& filtration,
                              const std::optional<RealFn>& q_m) {
  if (!check_everywhere_mar(P, space, filtration).holds) return TheoremOutcome::not_applicable;
  if (!realised_mar_set(P, space, filtration).is_full) return TheoremOutcome::fails;
  const LambdaProcess lp = lambda_process(P, space);
  const QConstruction qc = build_q(P, space, q_m);
  // dP/dQ′ computed directly and through dP/dQ × dQ/dQ′ with dQ/dQ′ = μ(M).
  const RealFn dp_dq = radon_nikodym(P, qc.q);
  for (std::size_t w = 0; w < space.size(); ++w) {
    const auto j = space.pattern_index_of(w);
    const auto qprime = qc.qprime_mass(j, w, space);
    if (!qprime || qprime->is_zero()) continue;
    const auto& lambda = lp.stopped[w];
    if (!lambda) return TheoremOutcome::fails;
    if (P.mass(w) / *qprime != *lambda) return TheoremOutcome::fails;
    if (dp_dq[w] * qc.mu[j] != *lambda) return TheoremOutcome::fails;
  }
  return TheoremOutcome::holds;
}

std::optional<AdaptedProcess> adapted_witness(const Measure& P, const SampleSpace& space,
                                              const Filtration& filtration) {
  if (!realised_mar_set(P, space, filtration).is_full) return std::nullopt;
  const LambdaProcess lp = lambda_process(P, space);
  AdaptedProcess x;
  for (std::size_t j = 0; j < space.pattern_count(); ++j) {
    const Partition& fm = filtration.f_alg[j];
    std::vector<Rational> block_value(fm.block_count());
    for (std::size_t w = 0; w < space.size(); ++w) {
      // F_m-blocks meeting {M = m} lie inside it; λ_M is constant there.
      if (space.pattern_index_of(w) == j && lp.stopped[w]) block_value[fm.block_of(w)] = *lp.stopped[w];
    }
    RealFn xm(space.size());
    for (std::size_t w = 0; w < space.size(); ++w) xm[w] = block_value[fm.block_of(w)];
    x.push_back(std::move(xm));
  }
  return x;
}

}  // namespace marlab
