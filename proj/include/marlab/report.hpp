#pragma once

// Serializable analysis reports (schema 1). Rationals are "p/q" strings.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "marlab/analysis.hpp"
#include "marlab/model_file.hpp"

namespace marlab {

inline constexpr int kReportSchema = 1;

/// Exit-code contract shared by the CLI and the reports.
inline constexpr int kExitEverywhere = 0;
inline constexpr int kExitNotFound = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitOnSet = 3;
inline constexpr int kExitNotIgnorable = 4;

struct AtomEntry {
  std::size_t id = 0;
  std::vector<std::string> outcomes;
  friend bool operator==(const AtomEntry&, const AtomEntry&) = default;
};

struct ViolationEntry {
  std::string pattern;
  std::string y;
  std::string lambda;
  std::string conditional;
  friend bool operator==(const ViolationEntry&, const ViolationEntry&) = default;
};

struct HazardEntry {
  int stage = 0;
  std::string y;
  std::string hazard;
  friend bool operator==(const HazardEntry&, const HazardEntry&) = default;
};

struct MemberReport {
  std::string theta;
  bool mcar = false;
  bool everywhere_mar = false;
  std::vector<ViolationEntry> violations;
  std::vector<std::size_t> realised_set;
  bool realised_is_full = false;
  std::vector<std::string> realised_patterns;  // patterns whose whole slice is in the set
  bool realised_is_slices = false;             // the set is exactly those slices
  std::optional<bool> sequential_mar;          // monotone spaces only
  std::vector<HazardEntry> hazard_violations;
  std::string theorem;
  friend bool operator==(const MemberReport&, const MemberReport&) = default;
};

struct RatioEntry {
  std::string theta;
  std::string theta_other;
  std::size_t atom = 0;
  std::optional<std::string> p_ratio;
  std::optional<std::string> q_ratio;
  friend bool operator==(const RatioEntry&, const RatioEntry&) = default;
};

struct EquivalenceSummary {
  std::string mode;
  std::vector<std::size_t> witness_set;
  bool theta_invariant_lambda = true;
  bool ratios_agree_on_witness = true;
  std::vector<RatioEntry> ratio_table;
  friend bool operator==(const EquivalenceSummary&, const EquivalenceSummary&) = default;
};

struct AnalysisReport {
  int schema = kReportSchema;
  std::string model;
  int n = 0;
  std::string mode;
  std::size_t outcomes = 0;
  std::vector<std::string> thetas;
  std::vector<AtomEntry> atoms;  // F_M
  std::vector<MemberReport> members;
  EquivalenceSummary equivalence;
  std::string verdict;
  int exit_code = kExitNotIgnorable;
  friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

AnalysisReport analyze(const Model& model);

std::string verdict_text(EquivalenceMode mode);
int exit_code_for(EquivalenceMode mode);

std::vector<AtomEntry> atom_entries(const Partition& p, const SampleSpace& space);

void to_json(nlohmann::json& j, const AtomEntry& v);
void from_json(const nlohmann::json& j, AtomEntry& v);
void to_json(nlohmann::json& j, const ViolationEntry& v);
void from_json(const nlohmann::json& j, ViolationEntry& v);
void to_json(nlohmann::json& j, const HazardEntry& v);
void from_json(const nlohmann::json& j, HazardEntry& v);
void to_json(nlohmann::json& j, const MemberReport& v);
void from_json(const nlohmann::json& j, MemberReport& v);
void to_json(nlohmann::json& j, const RatioEntry& v);
void from_json(const nlohmann::json& j, RatioEntry& v);
void to_json(nlohmann::json& j, const EquivalenceSummary& v);
void from_json(const nlohmann::json& j, EquivalenceSummary& v);
/// from_json throws ValidationError on an unknown schema version.
void to_json(nlohmann::json& j, const AnalysisReport& v);
void from_json(const nlohmann::json& j, AnalysisReport& v);

struct TextStyle {
  bool color = false;
};

std::string render_atoms(const std::vector<AtomEntry>& atoms);
std::string render_members(const AnalysisReport& report, const TextStyle& style, bool realised_only = false);
std::string render_equivalence(const AnalysisReport& report, const TextStyle& style);
std::string render_text(const AnalysisReport& report, const TextStyle& style);

}  // namespace marlab
