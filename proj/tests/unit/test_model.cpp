#include <doctest.h>

#include <set>

#include "marlab/error.hpp"
#include "marlab/model.hpp"
#include "marlab/model_file.hpp"

using namespace marlab;

namespace {

Rational R(std::int64_t p, std::int64_t q = 1) { return Rational(p, q); }

SampleSpace binary_space(int n, PatternMode mode) {
  return SampleSpace::build(n, std::vector<std::vector<std::string>>(n, {"0", "1"}), mode);
}

bool in_algebra(const std::vector<bool>& event, const Partition& p) {
  std::vector<int> seen(p.block_count(), -1);
  for (std::size_t w = 0; w < event.size(); ++w) {
    int& s = seen[p.block_of(w)];
    if (s == -1) s = event[w];
    else if (s != static_cast<int>(event[w])) return false;
  }
  return true;
}

// F_M by brute force: keep every subset of Ω that satisfies the stopping-set
// condition, then read off atoms as intersections of the members containing ω.
Partition stopping_set_by_enumeration(const SampleSpace& space, const Filtration& filt) {
  const std::size_t size = space.size();
  REQUIRE(size <= 18);
  std::vector<std::uint32_t> atom_mask(size, (1u << size) - 1);
  for (std::uint32_t a = 0; a < (1u << size); ++a) {
    bool member = true;
    for (std::size_t j = 0; j < space.pattern_count() && member; ++j) {
      std::vector<bool> cut(size);
      for (std::size_t w = 0; w < size; ++w) {
        cut[w] = ((a >> w) & 1u) && is_leq(space.pattern_of(w), space.patterns()[j]);
      }
      member = in_algebra(cut, filt.f_alg[j]);
    }
    if (!member) continue;
    for (std::size_t w = 0; w < size; ++w) {
      atom_mask[w] &= ((a >> w) & 1u) ? a : ~a;
    }
  }
  return generated_partition(size, [&](std::size_t w) { return atom_mask[w]; });
}

// 𝓜_m straight from its generators: the indicator vector of {M ⊆ i}, i ⊆ m.
Partition m_alg_by_indicators(const SampleSpace& space, const Pattern& m) {
  return generated_partition(space.size(), [&](std::size_t w) {
    std::vector<bool> ind;
    for (const Pattern& i : space.patterns()) {
      if (is_leq(i, m)) ind.push_back(is_leq(space.pattern_of(w), i));
    }
    return ind;
  });
}

Partition y_alg_by_digits(const SampleSpace& space, const Pattern& m) {
  return generated_partition(space.size(), [&](std::size_t w) {
    std::vector<std::size_t> d;
    for (int i : m.indices()) d.push_back(space.digit(space.y_index(w), i));
    return d;
  });
}

}  // namespace

TEST_CASE("sample space enumeration") {
  const SampleSpace e1 = binary_space(1, PatternMode::general);
  REQUIRE(e1.size() == 4);
  CHECK(e1.describe(0) == "(0,[])");
  CHECK(e1.describe(1) == "(0,[1])");
  CHECK(e1.describe(2) == "(1,[])");
  CHECK(e1.describe(3) == "(1,[1])");
  CHECK(binary_space(2, PatternMode::monotone).size() == 12);
  CHECK(binary_space(2, PatternMode::general).size() == 16);

  const auto mono = binary_space(3, PatternMode::monotone);
  REQUIRE(mono.pattern_count() == 4);
  for (int k = 0; k <= 3; ++k) CHECK(mono.patterns()[k] == monotone_embed(k, 3));
  CHECK_FALSE(mono.pattern_index(Pattern::parse(3, "[2]")).has_value());

  // Y_1 is the most significant digit.
  const auto s = SampleSpace::build(2, {{"a", "b", "c"}, {"x", "y"}}, PatternMode::general);
  CHECK(s.y_count() == 6);
  CHECK(s.describe_y(1) == "(a,y)");
  CHECK(s.describe_y(2) == "(b,x)");
  CHECK(s.digit(5, 1) == 2);
  CHECK(s.digit(5, 2) == 1);
  // every (y, m) appears once
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t w = 0; w < s.size(); ++w) seen.emplace(s.y_index(w), s.pattern_index_of(w));
  CHECK(seen.size() == s.size());
}

TEST_CASE("sample space errors") {
  CHECK_THROWS_AS(SampleSpace::build(0, {}, PatternMode::general), UsageError);
  CHECK_THROWS_AS(SampleSpace::build(2, {{"0"}}, PatternMode::general), UsageError);
  CHECK_THROWS_AS(SampleSpace::build(1, {{}}, PatternMode::general), UsageError);
  CHECK_THROWS_AS(SampleSpace::build(1, {{"0", "0"}}, PatternMode::general), UsageError);
  std::vector<std::vector<std::string>> wide(10, std::vector<std::string>(10, ""));
  for (auto& r : wide) {
    for (int i = 0; i < 10; ++i) r[i] = std::to_string(i);
  }
  CHECK_THROWS_AS(SampleSpace::build(10, wide, PatternMode::general), ResourceError);
}

TEST_CASE("filtration matches the generating definitions") {
  for (PatternMode mode : {PatternMode::general, PatternMode::monotone}) {
    for (int n = 1; n <= 3; ++n) {
      const auto space = SampleSpace::build(n, std::vector<std::vector<std::string>>(n, {"0", "1", "2"}), mode);
      const Filtration filt = build_filtration(space);
      for (std::size_t j = 0; j < space.pattern_count(); ++j) {
        const Pattern& m = space.patterns()[j];
        CHECK(filt.y_alg[j] == y_alg_by_digits(space, m));
        CHECK(filt.m_alg[j] == m_alg_by_indicators(space, m));
        CHECK(filt.f_alg[j] == join(filt.y_alg[j], filt.m_alg[j]));
        for (std::size_t i = 0; i < space.pattern_count(); ++i) {
          if (!is_leq(space.patterns()[i], m)) continue;
          CHECK(filt.f_alg[i].block_count() <= filt.f_alg[j].block_count());
          CHECK(filt.f_alg[j].refines(filt.f_alg[i]));
        }
      }
      CHECK(filt.f_alg[space.full_pattern_index()] == Partition::full(space.size()));
      CHECK(filt.y_alg[0] == Partition::trivial(space.size()));
    }
  }
}

TEST_CASE("E1 filtration blocks") {
  const auto space = binary_space(1, PatternMode::general);
  const Filtration filt = build_filtration(space);
  CHECK(filt.y_alg[1].block_count() == 2);
  // {M ⊆ []} is among the generators of 𝓜_[1], so M itself is known
  CHECK(filt.m_alg[1] == Partition::from_blocks(4, {{0, 2}, {1, 3}}));
  CHECK(filt.m_alg[0] == Partition::from_blocks(4, {{0, 2}, {1, 3}}));
}

TEST_CASE("observed-data algebra against brute-force enumeration") {
  const auto e1 = binary_space(1, PatternMode::general);
  const Partition fm = observed_data_algebra(e1, build_filtration(e1));
  CHECK(fm == Partition::from_blocks(4, {{0, 2}, {1}, {3}}));
  CHECK(fm == stopping_set_by_enumeration(e1, build_filtration(e1)));
  CHECK(fm == naive_observed_algebra(e1));

  const std::vector<SampleSpace> spaces{
      binary_space(1, PatternMode::monotone), binary_space(2, PatternMode::monotone),
      binary_space(2, PatternMode::general),
      SampleSpace::build(1, {{"0", "1", "2"}}, PatternMode::general),
      SampleSpace::build(2, {{"0", "1", "2"}, {"0", "1"}}, PatternMode::monotone)};
  for (const auto& space : spaces) {
    const Filtration filt = build_filtration(space);
    const Partition observed = observed_data_algebra(space, filt);
    CHECK(observed == stopping_set_by_enumeration(space, filt));
    CHECK(observed == naive_observed_algebra(space));
    CHECK(observed.refines(m_partition(space)));
    for (std::size_t w = 0; w < space.size(); ++w) {
      if (space.pattern_index_of(w) == space.full_pattern_index()) {
        CHECK(observed.blocks()[observed.block_of(w)].size() == 1);
      }
    }
  }
}

TEST_CASE("meet identity on a small space") {
  const auto space = binary_space(2, PatternMode::general);
  const Filtration filt = build_filtration(space);
  for (std::size_t j = 0; j < space.pattern_count(); ++j) {
    CHECK(meet(y_partition(space), filt.f_alg[j]) == filt.y_alg[j]);
  }
}

TEST_CASE("lambda process of the fixtures") {
  const Model e1 = builtin_fixture("E1");
  const auto l1 = lambda_process(e1.family.measures[0], e1.space);
  for (std::size_t j = 0; j < 2; ++j) {
    for (std::size_t y = 0; y < 2; ++y) CHECK(l1.at(j, y) == R(1, 2));
  }

  const Model e2 = builtin_fixture("E2");
  const auto l2 = lambda_process(e2.family.measures[0], e2.space);
  CHECK(l2.at(0, 0) == R(1, 2));
  CHECK(l2.at(0, 1) == R(3, 4));
  CHECK(l2.at(1, 0) == R(1, 2));
  CHECK(l2.at(1, 1) == R(1, 4));
  CHECK(l2.stopped == PartialFn{R(1, 2), R(1, 2), R(3, 4), R(1, 4)});

  const Model e3 = builtin_fixture("E3");
  for (const Measure& P : e3.family.measures) {
    const auto l3 = lambda_process(P, e3.space);
    for (std::size_t y = 0; y < 4; ++y) {
      const bool y1 = e3.space.digit(y, 1) == 1;
      CHECK(l3.at(0, y) == R(0));
      CHECK(l3.at(1, y) == (y1 ? R(2, 3) : R(1, 3)));
      CHECK(l3.at(2, y) == (y1 ? R(1, 3) : R(2, 3)));
    }
  }
}

TEST_CASE("lambda invariants on a skewed measure with a null y-vector") {
  const auto space = binary_space(2, PatternMode::general);
  RealFn mass(space.size(), 0);
  // y = (0,0) carries nothing
  const std::vector<std::int64_t> weights{0, 0, 0, 0, 1, 2, 3, 4, 2, 2, 0, 1, 5, 0, 0, 1};
  for (std::size_t w = 0; w < mass.size(); ++w) mass[w] = R(weights[w], 21);
  const Measure P = Measure::probability(mass);
  const auto lp = lambda_process(P, space);
  for (std::size_t j = 0; j < 4; ++j) CHECK_FALSE(lp.at(j, 0).has_value());
  for (std::size_t y = 1; y < 4; ++y) {
    Rational sum;
    for (std::size_t j = 0; j < 4; ++j) sum += *lp.at(j, y);
    CHECK(sum == R(1));
  }
  for (std::size_t w = 0; w < space.size(); ++w) {
    CHECK(lp.stopped[w] == lp.values(space.pattern_index_of(w), space)[w]);
  }
  for (std::size_t j = 0; j < 4; ++j) {
    const auto v = lp.values(j, space);
    CHECK(is_measurable_where_defined(std::span<const std::optional<Rational>>(v), y_partition(space)));
  }
}

TEST_CASE("working-independence measure Q") {
  const Model e2 = builtin_fixture("E2");
  const Measure& P = e2.family.measures[0];
  const QConstruction q = build_q(P, e2.space);
  CHECK(q.mu == RealFn{R(5, 8), R(3, 8)});
  CHECK(q.q.mass(e2.space.outcome(1, 1)) == R(3, 16));
  const QConstruction u = build_q(P, e2.space, RealFn{R(1, 2), R(1, 2)});
  CHECK(u.q.mass(e2.space.outcome(1, 1)) == R(1, 4));

  const Model e1 = builtin_fixture("E1");
  CHECK(build_q(e1.family.measures[0], e1.space).q == e1.family.measures[0]);

  CHECK_THROWS_AS(build_q(P, e2.space, RealFn{R(1), R(0)}), DominationError);
  CHECK_THROWS_AS(build_q(P, e2.space, RealFn{R(1, 2), R(1, 4)}), ValidationError);
  CHECK_THROWS_AS(build_q(P, e2.space, RealFn{R(1)}), ValidationError);
}

TEST_CASE("Q invariants and densities") {
  for (const char* name : {"E1", "E2", "E3", "E4", "E3-theta-mechanism"}) {
    const Model model = builtin_fixture(name);
    const SampleSpace& space = model.space;
    for (const Measure& P : model.family.measures) {
      const QConstruction qc = build_q(P, space);
      CHECK(y_marginal(qc.q, space) == y_marginal(P, space));
      CHECK(m_marginal(qc.q, space) == m_marginal(P, space));
      for (std::size_t y = 0; y < space.y_count(); ++y) {
        for (std::size_t j = 0; j < space.pattern_count(); ++j) {
          CHECK(qc.q.mass(space.outcome(y, j)) == y_marginal(qc.q, space)[y] * m_marginal(qc.q, space)[j]);
        }
      }
      const auto lp = lambda_process(P, space);
      const RealFn dpdq = radon_nikodym(P, qc.q);
      for (std::size_t j = 0; j < space.pattern_count(); ++j) {
        if (!qc.has_qprime(j)) {
          CHECK_THROWS_AS(qc.qprime(j, space), UsageError);
          continue;
        }
        const Measure qp = qc.qprime(j, space);
        CHECK(qp.is_probability());
        CHECK(qp.of(space.pattern_event(j)) == R(1));
        for (std::size_t w = 0; w < space.size(); ++w) {
          if (space.pattern_index_of(w) != j || qp.mass(w).is_zero()) continue;
          // dP/dQ′ = λ on {M = m}, and dP/dQ · dQ/dQ′ with dQ/dQ′ = μ(m)
          CHECK(P.mass(w) / qp.mass(w) == *lp.stopped[w]);
          CHECK(dpdq[w] * qc.mu[j] == *lp.stopped[w]);
        }
      }
    }
  }
}

TEST_CASE("likelihood tables for the E3 family") {
  const Model e3 = builtin_fixture("E3");
  const Filtration filt = build_filtration(e3.space);
  const Partition D = observed_data_algebra(e3.space, filt);
  std::vector<QConstruction> qcons;
  for (const auto& P : e3.family.measures) qcons.push_back(build_q(P, e3.space));
  const auto f = observed_likelihood(e3.family, D);
  const auto g = working_likelihood(e3.family, qcons, D, e3.space);
  const Pattern one = Pattern::parse(2, "[1]");
  const std::size_t j = *e3.space.pattern_index(one);
  const std::size_t w = e3.space.outcome(2, j);  // Y = (1,0), M = [1]
  const Rational thetas[] = {R(1, 4), R(1, 2)};
  for (std::size_t t = 0; t < 2; ++t) {
    CHECK(f[t][w] == thetas[t] / 3);
    CHECK(g[t][w] == thetas[t] / 2);
  }
  CHECK(f[0][w] / f[1][w] == R(1, 2));
  CHECK(*g[0][w] / *g[1][w] == R(1, 2));

  // D = full partition gives back the masses
  const auto full = observed_likelihood(e3.family, Partition::full(e3.space.size()));
  CHECK(full[0] == e3.family.measures[0].masses());

  // M = [] has μ = 0, so g is undefined there
  for (std::size_t y = 0; y < 4; ++y) CHECK_FALSE(g[0][e3.space.outcome(y, 0)].has_value());
}

TEST_CASE("E1 working likelihood is f up to a theta-free factor") {
  const Model e1 = builtin_fixture("E1");
  const Partition D = observed_data_algebra(e1.space, build_filtration(e1.space));
  const auto f = observed_likelihood(e1.family, D);
  const auto g = working_likelihood(e1.family, {build_q(e1.family.measures[0], e1.space)}, D, e1.space);
  for (std::size_t w = 0; w < 4; ++w) CHECK(*g[0][w] * R(1, 2) == f[0][w]);
}

TEST_CASE("family validation") {
  Model e3 = builtin_fixture("E3");
  CHECK_NOTHROW(e3.family.validate(e3.space));
  e3.family.thetas[1] = e3.family.thetas[0];
  CHECK_THROWS_AS(e3.family.validate(e3.space), ValidationError);
}
