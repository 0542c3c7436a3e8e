// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "marlab/analysis.hpp"
#include "marlab/model_file.hpp"
#include "marlab/report.hpp"
#include "marlab/search.hpp"

using namespace marlab;
using nlohmann::json;

namespace {

const std::filesystem::path kFixtures = MARLAB_FIXTURE_DIR;
const std::string kCli = MARLAB_CLI_PATH;

constexpr int kModelsPerClass = 1000;

// Shared failure log for one criterion; prints the first few problems only.
struct Tally {
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    ++failures;
    if (notes.size() < 5) notes.push_back(what);
  }
};

GeneratorSpec spec_for(std::uint64_t seed, ModelClass c, PatternMode mode) {
  GeneratorSpec s;
  s.seed = seed;
  s.n = 1 + static_cast<int>(seed % 3);
  s.range_sizes.clear();
  for (int i = 0; i < s.n; ++i) s.range_sizes.push_back(1 + static_cast<int>((seed / 3 + 2 * i + 1) % 3));
  s.mode = mode;
  s.model_class = c;
  s.theta_count = 2;
  return s;
}

std::string tag(const Model& m) {
  return m.provenance.is_null() ? m.name : m.provenance["generator"].dump();
}

std::vector<Model> lemma_models() {
  std::vector<Model> out;
  for (ModelClass c : {ModelClass::mcar, ModelClass::mar_by_construction, ModelClass::unrestricted}) {
    for (int i = 0; i < kModelsPerClass; ++i) {
      const PatternMode mode = i % 2 ? PatternMode::monotone : PatternMode::general;
      out.push_back(generate_model(spec_for(static_cast<std::uint64_t>(i), c, mode)));
    }
  }
  return out;
}

std::vector<Model> theorem_models() {
  std::vector<Model> out;
  for (int i = 0; i < kModelsPerClass; ++i) {
    out.push_back(generate_model(
        spec_for(static_cast<std::uint64_t>(100000 + i), ModelClass::mar_by_construction, PatternMode::general)));
  }
  return out;
}

std::vector<Model> fixtures() {
  std::vector<Model> out;
  for (const char* f : {"e1.json", "e2.json", "e3.json", "e4.json"}) out.push_back(load_model(kFixtures / f));
  out.push_back(builtin_fixture("E3-theta-mechanism"));
  return out;
}

/// Q′ stitched per member: the working measure P_θ is compared against.
std::vector<RealFn> working_masses(const Model& m, const std::optional<RealFn>& q_m = std::nullopt) {
  std::vector<RealFn> out;
  for (const Measure& P : m.family.measures) out.push_back(build_q(P, m.space, q_m).qprime_stitched(m.space));
  return out;
}

std::vector<RealFn> masses(const Model& m) {
  std::vector<RealFn> out;
  for (const Measure& P : m.family.measures) out.push_back(P.masses());
  return out;
}

/// A q_m admissible for every member: drawn against the members' average.
RealFn family_q_m(const Model& m, SplitMix64& rng) {
  RealFn avg(m.space.size());
  for (const Measure& P : m.family.measures) {
    for (std::size_t w = 0; w < avg.size(); ++w) avg[w] += P.mass(w);
  }
  for (auto& v : avg) v /= Rational(static_cast<std::int64_t>(m.family.size()));
  return random_admissible_q_m(Measure(avg), m.space, rng);
}

std::vector<SampleSpace> product_spaces() {
  std::vector<SampleSpace> out;
  for (PatternMode mode : {PatternMode::general, PatternMode::monotone}) {
    for (int n = 1; n <= 3; ++n) {
      const int combos = n == 1 ? 3 : (n == 2 ? 9 : 27);
      for (int c = 0; c < combos; ++c) {
        std::vector<std::vector<std::string>> ranges;
        int rest = c;
        for (int i = 0; i < n; ++i, rest /= 3) {
          std::vector<std::string> labels;
          for (int v = 0; v <= rest % 3; ++v) labels.push_back(std::to_string(v));
          ranges.push_back(labels);
        }
        out.push_back(SampleSpace::build(n, ranges, mode));
      }
    }
  }
  return out;
}

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run_cli(const std::string& args) {
  const std::string cmd = "NO_COLOR=1 '" + kCli + "' " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// ---------------------------------------------------------------------------

Tally lemma_suite(const std::vector<Model>& models, std::size_t& invariant_models, std::size_t& compared) {
  Tally t;
  for (const Model& m : models) {
    const EquivalenceReport eq = check_equivalence(m.family, m.space);
    const Partition D = observed_data_algebra(m.space, build_filtration(m.space));
    if (eq.theta_invariant_lambda) ++invariant_models;
    // The witness atoms are exactly where λ_M is one constant across θ and the atom.
    const Lemma1Check check = verify_lemma1(masses(m), working_masses(m), eq.witness_set, D);
    t.expect(check.holds, "likelihood ratios differ on " + tag(m));
    compared += eq.witness_set.size() - check.excluded_atoms.size();
  }
  return t;
}

Tally theorem_suite(const std::vector<Model>& models) {
  Tally t;
  SplitMix64 rng(0xC0FFEE);
  for (const Model& m : models) {
    const Filtration filt = build_filtration(m.space);
    for (const Measure& P : m.family.measures) {
      t.expect(verify_theorem(P, m.space, filt) == TheoremOutcome::holds, "default q_M: " + tag(m));
      const RealFn q = random_admissible_q_m(P, m.space, rng);
      t.expect(verify_theorem(P, m.space, filt, q) == TheoremOutcome::holds, "random q_M: " + tag(m));
    }
  }
  return t;
}

Tally realised_suite(const std::vector<const Model*>& models) {
  Tally t;
  for (const Model* m : models) {
    const Filtration filt = build_filtration(m->space);
    for (const Measure& P : m->family.measures) {
      const RealisedSet rs = realised_mar_set(P, m->space, filt);
      for (std::size_t w = 0; w < m->space.size(); ++w) {
        if (m->space.pattern_index_of(w) != m->space.full_pattern_index()) continue;
        const std::size_t atom = rs.observed.block_of(w);
        t.expect(std::binary_search(rs.atoms.begin(), rs.atoms.end(), atom),
                 "{M = full} atom missing from realised set: " + tag(*m));
      }
    }
  }
  return t;
}

Tally meet_suite() {
  Tally t;
  for (const SampleSpace& space : product_spaces()) {
    const Filtration filt = build_filtration(space);
    const Partition Y = y_partition(space);
    for (std::size_t j = 0; j < space.pattern_count(); ++j) {
      t.expect(meet(Y, filt.f_alg[j]) == filt.y_alg[j], "meet identity at m=" + space.patterns()[j].str());
    }
  }
  return t;
}

Tally stopping_set_suite() {
  Tally t;
  std::vector<SampleSpace> spaces = product_spaces();
  SplitMix64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    const int n = 1 + static_cast<int>(rng.below(3));
    std::vector<std::vector<std::string>> ranges;
    for (int v = 0; v < n; ++v) {
      std::vector<std::string> labels;
      const auto size = 1 + rng.below(4);
      for (std::uint64_t l = 0; l < size; ++l) labels.push_back("v" + std::to_string(l));
      ranges.push_back(labels);
    }
    spaces.push_back(SampleSpace::build(n, ranges, rng.below(2) ? PatternMode::monotone : PatternMode::general));
  }
  for (const Model& m : fixtures()) spaces.push_back(m.space);

  for (const SampleSpace& space : spaces) {
    const Filtration filt = build_filtration(space);
    const Partition observed = observed_data_algebra(space, filt);
    const Partition by_definition = stopping_set_algebra_by_definition(space, filt);
    t.expect(observed == by_definition, "definition construction differs");
    t.expect(observed == naive_observed_algebra(space), "naive algebra differs");
    // atom by atom: each atom passes the literal condition, and no outcome of
    // a different atom could be added to it
    for (const auto& block : observed.blocks()) {
      Event e(space.size(), false);
      for (std::size_t w : block) e[w] = true;
      t.expect(in_stopping_set_algebra(e, space, filt), "atom fails the stopping-set condition");
      for (std::size_t w : block) {
        t.expect(by_definition.block_of(w) == by_definition.block_of(block.front()), "atom split by definition");
      }
    }
  }
  return t;
}

// E2 λ and realised set, and the E3 likelihood ratios, each by direct
// enumeration before comparing with the library.
Tally golden_suite() {
  Tally t;
  const Model e2 = load_model(kFixtures / "e2.json");
  const Measure& P2 = e2.family.measures[0];
  const SampleSpace& s2 = e2.space;
  const Rational half(1, 2), three_quarters(3, 4);
  // λ_∅(y) = P(y, ∅) / (P(y, ∅) + P(y, [1]))
  std::vector<Rational> direct;
  for (std::size_t y = 0; y < 2; ++y) {
    direct.push_back(P2.mass(s2.outcome(y, 0)) / (P2.mass(s2.outcome(y, 0)) + P2.mass(s2.outcome(y, 1))));
  }
  t.expect(direct == std::vector<Rational>{half, three_quarters}, "E2 direct λ_∅ differs from (1/2, 3/4)");
  const LambdaProcess lp = lambda_process(P2, s2);
  t.expect(lp.at(0, 0) == half && lp.at(0, 1) == three_quarters, "E2 lambda_process λ_∅ differs from (1/2, 3/4)");

  const Filtration f2 = build_filtration(s2);
  const RealisedSet rs = realised_mar_set(P2, s2, f2);
  std::vector<std::size_t> expected_atoms;
  for (std::size_t w = 0; w < s2.size(); ++w) {
    if (s2.pattern_of(w) == Pattern::full(1)) expected_atoms.push_back(rs.observed.block_of(w));
  }
  t.expect(rs.atoms == expected_atoms, "E2 realised set is not {M={1}}");

  const Model e3 = load_model(kFixtures / "e3.json");
  const SampleSpace& s3 = e3.space;
  const Partition D3 = observed_data_algebra(s3, build_filtration(s3));
  const std::vector<Rational> theta{Rational(1, 4), Rational(1, 2)};
  const auto brute = brute_force_ratios(e3.family, D3, s3);
  const auto library = check_equivalence(e3.family, s3).ratio_table;
  const std::size_t atom_y1_m1 = D3.block_of(s3.outcome(2, 1));  // (Y1=1, Y2=0, M=[1])
  std::size_t positive_rows = 0;
  for (const RatioRow& row : brute) {
    const std::size_t w = D3.blocks()[row.atom].front();
    if (!row.p_ratio) continue;
    ++positive_rows;
    t.expect(row.p_ratio == row.q_ratio, "E3 f ratio differs from g ratio (brute force)");
    const bool y1 = s3.digit(s3.y_index(w), 1) == 1;
    const Rational expected = y1 ? theta[row.theta] / theta[row.theta_other]
                                 : (Rational(1) - theta[row.theta]) / (Rational(1) - theta[row.theta_other]);
    t.expect(*row.p_ratio == expected, "E3 brute ratio at atom " + std::to_string(row.atom));
    if (row.atom == atom_y1_m1) {
      t.expect(*row.p_ratio == theta[row.theta] / theta[row.theta_other], "E3 θ/θ′ at (Y1=1, M=[1])");
    }
  }
  t.expect(positive_rows == 12, "E3 should have 6 positive atoms per ordered pair");
  t.expect(library == brute, "E3 check_equivalence ratios differ from brute force");
  return t;
}

Tally oracle_suite(const std::vector<const Model*>& models) {
  Tally t;
  SplitMix64 rng(77);
  for (const Model* m : models) {
    const Partition D = observed_data_algebra(m->space, build_filtration(m->space));
    t.expect(check_equivalence(m->family, m->space).ratio_table == brute_force_ratios(m->family, D, m->space),
             "default q_M: " + tag(*m));
    const RealFn q = family_q_m(*m, rng);
    t.expect(check_equivalence(m->family, m->space, q).ratio_table == brute_force_ratios(m->family, D, m->space, q),
             "random q_M: " + tag(*m));
  }
  return t;
}

Tally implication_suite(const std::vector<const Model*>& models, std::size_t& mcar, std::size_t& mar) {
  Tally t;
  for (const Model* m : models) {
    const Filtration filt = build_filtration(m->space);
    for (const Measure& P : m->family.measures) {
      const bool is_mcar = check_mcar(P, m->space);
      const bool is_mar = check_everywhere_mar(P, m->space, filt).holds;
      const bool full = realised_mar_set(P, m->space, filt).is_full;
      mcar += is_mcar;
      mar += is_mar;
      t.expect(!is_mcar || is_mar, "MCAR but not everywhere MAR: " + tag(*m));
      t.expect(!is_mar || full, "everywhere MAR but realised set not full: " + tag(*m));
    }
  }
  return t;
}

Tally cli_suite() {
  Tally t;
  const std::vector<std::pair<const char*, int>> expected{{"e1.json", 0}, {"e2.json", 3}, {"e3.json", 0}, {"e4.json", 4}};
  for (const auto& [file, code] : expected) {
    const std::string path = "'" + (kFixtures / file).string() + "'";
    t.expect(run_cli("analyze " + path).code == code, std::string(file) + " exit code");
    const CliRun js = run_cli("analyze " + path + " --format json");
    t.expect(js.code == code, std::string(file) + " exit code (json)");
    try {
      const json parsed = json::parse(js.out);
      const AnalysisReport report = parsed.get<AnalysisReport>();
      t.expect(json(report) == parsed, std::string(file) + " report does not round-trip");
      t.expect(report == analyze(load_model(kFixtures / file)), std::string(file) + " report differs from library");
    } catch (const std::exception& e) {
      t.expect(false, std::string(file) + ": " + e.what());
    }
  }
  return t;
}

}  // namespace

int main() {
  bool all = true;
  const auto report = [&](const char* id, const std::string& title, const Tally& t, double seconds,
                          const std::string& extra = "", bool ok_extra = true) {
    const bool ok = t.failures == 0 && t.checks > 0 && ok_extra;
    all = all && ok;
    std::ostringstream line;
    line << (ok ? "PASS " : "FAIL ") << id << "  " << title << "  [" << t.checks << " checks, " << t.failures
         << " failures, " << std::fixed;
    line.precision(2);
    line << seconds << " s" << (extra.empty() ? "" : "; " + extra) << "]";
    std::cout << line.str() << '\n';
    for (const auto& n : t.notes) std::cout << "       " << n << '\n';
    std::cout.flush();
  };
  const auto timed = [](const std::function<Tally()>& fn, double& seconds) {
    const auto start = std::chrono::steady_clock::now();
    Tally t = fn();
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return t;
  };

  double secs = 0;
  const std::vector<Model> lemma = lemma_models();
  const std::vector<Model> theorem = theorem_models();
  const std::vector<Model> fixed = fixtures();
  std::vector<const Model*> generated, everything;
  for (const auto& m : lemma) generated.push_back(&m);
  for (const auto& m : theorem) generated.push_back(&m);
  everything = generated;
  for (const auto& m : fixed) everything.push_back(&m);

  std::size_t invariant = 0, compared = 0;
  Tally t1 = timed([&] { return lemma_suite(lemma, invariant, compared); }, secs);
  report("AC1", "P and Q′ likelihood ratios agree on witness atoms, 3000 generated families", t1, secs,
         std::to_string(invariant) + " families with theta-invariant lambda, " + std::to_string(compared) +
             " witness atoms compared",
         secs < 60.0);

  Tally t2 = timed([&] { return theorem_suite(theorem); }, secs);
  report("AC2", "dP/dQ′ = lambda_M on 1000 MAR-by-construction general models, default and random q_M", t2, secs);

  Tally t3 = timed([&] { return realised_suite(everything); }, secs);
  report("AC3", "{M = full} atoms lie in the realised set", t3, secs);

  Tally t4 = timed(meet_suite, secs);
  report("AC4", "meet identity Y ^ F_m = Y_m on all product spaces n <= 3", t4, secs);

  Tally t5 = timed(stopping_set_suite, secs);
  report("AC5", "observed algebra = definition construction = naive algebra", t5, secs);

  Tally t6 = timed(golden_suite, secs);
  report("AC6", "fixture golden values via brute force first", t6, secs);

  Tally t7 = timed([&] { return oracle_suite(everything); }, secs);
  report("AC7", "check_equivalence ratio tables = brute-force tables", t7, secs);

  std::size_t mcar = 0, mar = 0;
  Tally t8 = timed([&] { return implication_suite(everything, mcar, mar); }, secs);
  report("AC8", "MCAR => everywhere MAR => realised set full", t8, secs,
         std::to_string(mcar) + " MCAR members, " + std::to_string(mar) + " MAR members");

  Tally t9 = timed(cli_suite, secs);
  report("AC9", "CLI exit codes 0, 3, 0, 4 and JSON round trip", t9, secs);

  std::cout << (all ? "all acceptance criteria passed" : "acceptance FAILED") << '\n';
  return all ? 0 : 1;
}
