#pragma once

// Missingness patterns: subsets of {1..n} ordered by inclusion.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace marlab {

class Pattern {
 public:
  static constexpr int kMaxVariables = 16;

  /// Empty pattern over n variables.
  explicit Pattern(int n);

  /// Variable i (1-based) is stored at bit i-1.
  static Pattern from_bits(int n, std::uint32_t bits);
  static Pattern from_indices(int n, std::span<const int> indices);
  static Pattern from_indices(int n, std::initializer_list<int> indices);
  static Pattern full(int n);

  /// Parses "[1,3]" / "[]"; whitespace is ignored.
  static Pattern parse(int n, std::string_view text);

  int n() const { return n_; }
  std::uint32_t bits() const { return bits_; }
  int size() const;
  bool contains(int index) const;
  bool empty() const { return bits_ == 0; }
  std::vector<int> indices() const;

  /// Sorted index list, e.g. "[1,3]".
  std::string str() const;

  friend bool operator==(const Pattern&, const Pattern&) = default;
  /// Canonical order: variable count, then numeric bit encoding.
  friend std::strong_ordering operator<=>(const Pattern& a, const Pattern& b) {
    if (auto c = a.n_ <=> b.n_; c != 0) return c;
    return a.bits_ <=> b.bits_;
  }

 private:
  Pattern(int n, std::uint32_t bits) : n_(n), bits_(bits) {}

  int n_;
  std::uint32_t bits_ = 0;
};

/// i ⊆ m. Throws UsageError when the variable counts differ.
bool is_leq(const Pattern& i, const Pattern& m);

/// Every i ⊆ m in canonical order (2^|m| entries).
std::vector<Pattern> subsets_leq(const Pattern& m);

/// Neither i ⊆ m nor m ⊆ i.
bool incomparable(const Pattern& i, const Pattern& m);

/// The prefix {1..k}; throws UsageError unless 0 <= k <= n.
Pattern monotone_embed(int k, int n);

}  // namespace marlab
