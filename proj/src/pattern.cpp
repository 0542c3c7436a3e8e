#include "marlab/pattern.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>

#include "marlab/error.hpp"

namespace marlab {

namespace {

void check_variable_count(int n) {
  if (n < 1 || n > Pattern::kMaxVariables) {
    throw UsageError("variable count " + std::to_string(n) + " outside 1.." +
                     std::to_string(Pattern::kMaxVariables));
  }
}

std::uint32_t full_mask(int n) { return (std::uint32_t{1} << n) - 1; }

}  // namespace

Pattern::Pattern(int n) : n_(n) { check_variable_count(n); }

Pattern Pattern::from_bits(int n, std::uint32_t bits) {
  check_variable_count(n);
  if ((bits & ~full_mask(n)) != 0) {
    throw UsageError("pattern bits exceed variable count " + std::to_string(n));
  }
  return Pattern(n, bits);
}

Pattern Pattern::from_indices(int n, std::span<const int> indices) {
  check_variable_count(n);
  std::uint32_t bits = 0;
  for (int i : indices) {
    if (i < 1 || i > n) {
      throw UsageError("variable index " + std::to_string(i) + " outside 1.." + std::to_string(n));
    }
    bits |= std::uint32_t{1} << (i - 1);
  }
  return Pattern(n, bits);
}

Pattern Pattern::from_indices(int n, std::initializer_list<int> indices) {
  return from_indices(n, std::span<const int>(indices.begin(), indices.size()));
}

Pattern Pattern::full(int n) {
  check_variable_count(n);
  return Pattern(n, full_mask(n));
}

Pattern Pattern::parse(int n, std::string_view text) {
  std::string compact;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
  }
  if (compact.size() < 2 || compact.front() != '[' || compact.back() != ']') {
    throw UsageError("malformed pattern \"" + std::string(text) + "\" (expected e.g. [1,3])");
  }
  std::vector<int> indices;
  std::string_view body(compact);
  body = body.substr(1, body.size() - 2);
  while (!body.empty()) {
    const auto comma = body.find(',');
    const std::string_view item = body.substr(0, comma);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw UsageError("malformed pattern \"" + std::string(text) + "\"");
    }
    indices.push_back(value);
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
    if (body.empty()) throw UsageError("malformed pattern \"" + std::string(text) + "\"");
  }
  return from_indices(n, indices);
}

int Pattern::size() const { return std::popcount(bits_); }

bool Pattern::contains(int index) const {
  return index >= 1 && index <= n_ && ((bits_ >> (index - 1)) & 1U) != 0;
}

std::vector<int> Pattern::indices() const {
  std::vector<int> out;
  for (int i = 1; i <= n_; ++i) {
    if (contains(i)) out.push_back(i);
  }
  return out;
}

std::string Pattern::str() const {
  std::string out = "[";
  bool first = true;
  for (int i : indices()) {
    if (!first) out += ',';
    out += std::to_string(i);
    first = false;
  }
  return out + "]";
}

bool is_leq(const Pattern& i, const Pattern& m) {
  if (i.n() != m.n()) {
    throw UsageError("patterns over different variable counts (" + std::to_string(i.n()) + " vs " +
                     std::to_string(m.n()) + ")");
  }
  return (i.bits() & ~m.bits()) == 0;
}

std::vector<Pattern> subsets_leq(const Pattern& m) {
  // Submask walk visits descending encodings; reverse for canonical order.
  std::vector<Pattern> out;
  out.reserve(std::size_t{1} << m.size());
  std::uint32_t s = m.bits();
  while (true) {
    out.push_back(Pattern::from_bits(m.n(), s));
    if (s == 0) break;
    s = (s - 1) & m.bits();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

bool incomparable(const Pattern& i, const Pattern& m) { return !is_leq(i, m) && !is_leq(m, i); }

Pattern monotone_embed(int k, int n) {
  check_variable_count(n);
  if (k < 0 || k > n) {
    throw UsageError("prefix length " + std::to_string(k) + " outside 0.." + std::to_string(n));
  }
  return Pattern::from_bits(n, full_mask(k));
}

}  // namespace marlab
